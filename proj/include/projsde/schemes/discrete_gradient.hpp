#pragma once

#include "projsde/core/model.hpp"
#include "projsde/core/state.hpp"

namespace projsde {

/**
 * @brief Gonzalez midpoint discrete gradient.
 *
 * gbar(x,y) = grad I(mu) + [(I(y) - I(x) - grad I(mu).(y-x)) / |y-x|^2] (y-x),
 * mu = (x+y)/2. Satisfies gbar(x,y).(y-x) = I(y) - I(x) exactly, and reduces
 * to grad I at the midpoint for quadratic I. Limit grad I(x) for y -> x.
 */
inline StateVec gonzalez_gradient(const Invariant& inv, const StateVec& x, const StateVec& y) {
    StateVec d = y - x;
    const double n2 = dot(d, d);
    if (n2 < 1e-20) return inv.gradient(x); // |y - x| < 1e-10
    const StateVec mu = 0.5 * (x + y);
    StateVec g = inv.gradient(mu);
    const double correction = (inv.value(y) - inv.value(x) - dot(g, d)) / n2;
    g.axpy(correction, d);
    return g;
}

} // namespace projsde
