#pragma once

#include <cmath>

#include "projsde/core/errors.hpp"
#include "projsde/core/model.hpp"

namespace projsde {

/**
 * @brief Kubo oscillator: dX1 = -a X2 dt - sigma X2 o dW,
 *                         dX2 =  a X1 dt + sigma X1 o dW.
 *
 * Conserved quantity I = (x^2 + y^2)/2. Drift and diffusion are rotations
 * generated by J = [[0,-1],[1,0]]; with a != 0 the system is in the special
 * class with intensity c = sigma/a, and the flow Taylor coefficients are
 * v_k = A^k x / k! for A = aJ.
 */
inline SdeModel make_kubo(double a = 1.0, double sigma = 1.0) {
    SdeModel model;
    model.name = "kubo";
    model.dim = 2;
    model.noise_count = 1;

    model.drift = [a](const StateVec& x) { return StateVec{-a * x[1], a * x[0]}; };
    model.diffusions = {[sigma](const StateVec& x) {
        return StateVec{-sigma * x[1], sigma * x[0]};
    }};
    model.diffusion_jacobians = {[sigma](const StateVec&) {
        Mat j(2);
        j(0, 1) = -sigma;
        j(1, 0) = sigma;
        return j;
    }};

    Invariant inv;
    inv.label = "I";
    inv.value = [](const StateVec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); };
    inv.gradient = [](const StateVec& x) { return x; };
    inv.hessian = [](const StateVec&) { return Mat::identity(2); };
    model.invariants = {inv};

    if (a != 0.0) {
        SpecialClassData sc;
        sc.c = {sigma / a};
        sc.ode_taylor_coeffs = [a](const StateVec& x, int order, StateVec* out) {
            // v_k = A v_{k-1} / k with A = [[0,-a],[a,0]].
            StateVec prev = x;
            for (int k = 1; k <= order; ++k) {
                const StateVec next{-a * prev[1] / k, a * prev[0] / k};
                out[k - 1] = next;
                prev = next;
            }
        };
        model.special_class = sc;
    }

    SkewGradientForm sg;
    sg.S = [a](const StateVec&) {
        Mat s(2);
        s(0, 1) = -a;
        s(1, 0) = a;
        return s;
    };
    sg.T = {[sigma](const StateVec&) {
        Mat t(2);
        t(0, 1) = -sigma;
        t(1, 0) = sigma;
        return t;
    }};
    model.sg_form = sg;

    model.commutative_noise = true;
    model.sampling_box.bounds = {{-2.0, 2.0}, {-2.0, 2.0}};
    model.default_x0 = StateVec{1.0, 0.0};
    return model;
}

/// Exact Kubo solution: rotation of x0 by the randomized angle a t + sigma W.
inline StateVec exact_kubo(const StateVec& x0, double t, double w, double a = 1.0,
                           double sigma = 1.0) {
    const double theta = a * t + sigma * w;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return StateVec{c * x0[0] - s * x0[1], s * x0[0] + c * x0[1]};
}

} // namespace projsde
