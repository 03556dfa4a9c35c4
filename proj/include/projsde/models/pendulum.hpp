#pragma once

#include <cmath>

#include "projsde/core/model.hpp"

namespace projsde {

/**
 * @brief Stochastic mathematical pendulum with two noise channels:
 * d(P,Q) = (-sin Q, P)(dt + c1 o dW1 + c2 o dW2).
 *
 * Conserved quantity I(p,q) = p^2/2 - cos q (non-quadratic).
 */
inline SdeModel make_pendulum(double c1 = 1.0, double c2 = 0.5) {
    SdeModel model;
    model.name = "pendulum";
    model.dim = 2;
    model.noise_count = 2;

    auto field = [](const StateVec& x) { return StateVec{-std::sin(x[1]), x[0]}; };
    model.drift = field;
    model.diffusions = {
        [field, c1](const StateVec& x) { return c1 * field(x); },
        [field, c2](const StateVec& x) { return c2 * field(x); },
    };
    auto field_jacobian = [](const StateVec& x) {
        Mat j(2);
        j(0, 1) = -std::cos(x[1]);
        j(1, 0) = 1.0;
        return j;
    };
    model.diffusion_jacobians = {
        [field_jacobian, c1](const StateVec& x) {
            Mat j = field_jacobian(x);
            j *= c1;
            return j;
        },
        [field_jacobian, c2](const StateVec& x) {
            Mat j = field_jacobian(x);
            j *= c2;
            return j;
        },
    };

    Invariant inv;
    inv.label = "I";
    inv.value = [](const StateVec& x) { return 0.5 * x[0] * x[0] - std::cos(x[1]); };
    inv.gradient = [](const StateVec& x) { return StateVec{x[0], std::sin(x[1])}; };
    inv.hessian = [](const StateVec& x) {
        Mat h(2);
        h(0, 0) = 1.0;
        h(1, 1) = std::cos(x[1]);
        return h;
    };
    model.invariants = {inv};

    SpecialClassData sc;
    sc.c = {c1, c2};
    // Derivatives of the flow phi' = (-sin q, p) along itself:
    //   p'   = -sin q
    //   q'   = p
    //   p''  = -p cos q
    //   q''  = -sin q
    //   p''' = sin q cos q + p^2 sin q
    //   q''' = -p cos q
    //   p'''' = p (cos^2 q - 3 sin^2 q) + p^3 cos q
    //   q'''' = sin q cos q + p^2 sin q
    // v_k = (p^(k), q^(k)) / k!.
    sc.ode_taylor_coeffs = [](const StateVec& x, int order, StateVec* out) {
        const double p = x[0];
        const double sq = std::sin(x[1]);
        const double cq = std::cos(x[1]);
        out[0] = StateVec{-sq, p};
        if (order >= 2) out[1] = StateVec{-p * cq / 2.0, -sq / 2.0};
        if (order >= 3) out[2] = StateVec{(sq * cq + p * p * sq) / 6.0, -p * cq / 6.0};
        if (order >= 4)
            out[3] = StateVec{(p * (cq * cq - 3.0 * sq * sq) + p * p * p * cq) / 24.0,
                              (sq * cq + p * p * sq) / 24.0};
    };
    model.special_class = sc;

    // f grad I^T - grad I f^T = -(p^2 + sin^2 q) J = -|grad I|^2 J, so the
    // default skew-gradient matrices are the constant J = [[0,-1],[1,0]].
    SkewGradientForm sg;
    auto rot = [](double scale) {
        return [scale](const StateVec&) {
            Mat m(2);
            m(0, 1) = -scale;
            m(1, 0) = scale;
            return m;
        };
    };
    sg.S = rot(1.0);
    sg.T = {rot(c1), rot(c2)};
    model.sg_form = sg;

    model.commutative_noise = true;
    model.sampling_box.bounds = {{-2.0, 2.0}, {-2.0, 2.0}};
    model.default_x0 = StateVec{0.1, 1.0};
    return model;
}

} // namespace projsde
