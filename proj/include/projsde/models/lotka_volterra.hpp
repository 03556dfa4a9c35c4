#pragma once

#include "projsde/core/model.hpp"

namespace projsde {

/**
 * @brief Cyclic Lotka-Volterra system of three competing species:
 * d(X,Y,Z) = (X(Z-Y), Y(X-Z), Z(Y-X))(dt + c o dW).
 *
 * Two conserved quantities: I1 = x+y+z (linear) and I2 = xyz (cubic).
 */
inline SdeModel make_lotka_volterra(double c = 0.5) {
    SdeModel model;
    model.name = "lotka";
    model.dim = 3;
    model.noise_count = 1;

    auto field = [](const StateVec& u) {
        return StateVec{u[0] * (u[2] - u[1]), u[1] * (u[0] - u[2]), u[2] * (u[1] - u[0])};
    };
    model.drift = field;
    model.diffusions = {[field, c](const StateVec& u) { return c * field(u); }};
    model.diffusion_jacobians = {[c](const StateVec& u) {
        Mat j(3);
        j(0, 0) = u[2] - u[1];
        j(0, 1) = -u[0];
        j(0, 2) = u[0];
        j(1, 0) = u[1];
        j(1, 1) = u[0] - u[2];
        j(1, 2) = -u[1];
        j(2, 0) = -u[2];
        j(2, 1) = u[2];
        j(2, 2) = u[1] - u[0];
        j *= c;
        return j;
    }};

    Invariant i1;
    i1.label = "I1";
    i1.value = [](const StateVec& u) { return u[0] + u[1] + u[2]; };
    i1.gradient = [](const StateVec&) { return StateVec{1.0, 1.0, 1.0}; };
    i1.hessian = [](const StateVec&) { return Mat(3); };

    Invariant i2;
    i2.label = "I2";
    i2.value = [](const StateVec& u) { return u[0] * u[1] * u[2]; };
    i2.gradient = [](const StateVec& u) {
        return StateVec{u[1] * u[2], u[0] * u[2], u[0] * u[1]};
    };
    i2.hessian = [](const StateVec& u) {
        Mat h(3);
        h(0, 1) = u[2];
        h(0, 2) = u[1];
        h(1, 0) = u[2];
        h(1, 2) = u[0];
        h(2, 0) = u[1];
        h(2, 1) = u[0];
        return h;
    };
    model.invariants = {i1, i2};

    SpecialClassData sc;
    sc.c = {c};
    // Leibniz recursion for the flow derivatives: with a = x^(k), b = y^(k),
    // g = z^(k) along phi' = f(phi),
    //   x^(k+1) = sum_j C(k,j) x^(j) (z^(k-j) - y^(k-j))
    // and cyclically for y, z. v_k = X^(k)/k!.
    sc.ode_taylor_coeffs = [](const StateVec& u, int order, StateVec* out) {
        double a[5], b[5], g[5];
        a[0] = u[0];
        b[0] = u[1];
        g[0] = u[2];
        static const double binom[4][4] = {
            {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
        for (int k = 0; k < order; ++k) {
            double na = 0.0, nb = 0.0, ng = 0.0;
            for (int j = 0; j <= k; ++j) {
                const double w = binom[k][j];
                na += w * a[j] * (g[k - j] - b[k - j]);
                nb += w * b[j] * (a[k - j] - g[k - j]);
                ng += w * g[j] * (b[k - j] - a[k - j]);
            }
            a[k + 1] = na;
            b[k + 1] = nb;
            g[k + 1] = ng;
        }
        double fact = 1.0;
        for (int k = 1; k <= order; ++k) {
            fact *= k;
            out[k - 1] = StateVec{a[k] / fact, b[k] / fact, g[k] / fact};
        }
    };
    model.special_class = sc;

    // State-dependent skew-gradient form from the default construction
    // w.r.t. I1 (grad I1 = (1,1,1), |grad I1|^2 = 3).
    SkewGradientForm sg;
    auto ones = StateVec{1.0, 1.0, 1.0};
    sg.S = [field, ones](const StateVec& u) {
        Mat s = skew_outer(field(u), ones);
        s *= 1.0 / 3.0;
        return s;
    };
    sg.T = {[field, ones, c](const StateVec& u) {
        Mat t = skew_outer(field(u), ones);
        t *= c / 3.0;
        return t;
    }};
    model.sg_form = sg;

    model.commutative_noise = true;
    // Positive box: grad I2 degenerates on the coordinate planes.
    model.sampling_box.bounds = {{0.2, 3.0}, {0.2, 3.0}, {0.2, 3.0}};
    model.default_x0 = StateVec{1.0, 2.0, 1.0};
    return model;
}

} // namespace projsde
