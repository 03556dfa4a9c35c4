#pragma once

// Independent oracles used by the test suites. Everything here is computed
// without going through the scheme/projection code paths it checks.

#include <cmath>
#include <functional>

#include "projsde/core/state.hpp"

namespace oracles {

using projsde::Mat;
using projsde::StateVec;

/// Classic RK4 for phi' = f(phi) with n fixed steps.
inline StateVec rk4(const std::function<StateVec(const StateVec&)>& f, StateVec x, double s,
                    int n) {
    const double h = s / n;
    for (int i = 0; i < n; ++i) {
        const StateVec k1 = f(x);
        const StateVec k2 = f(x + (h / 2) * k1);
        const StateVec k3 = f(x + (h / 2) * k2);
        const StateVec k4 = f(x + h * k3);
        x += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

/// Step-doubled RK4: refine until two successive refinements agree to tol.
inline StateVec ode_flow(const std::function<StateVec(const StateVec&)>& f, const StateVec& x,
                         double s, double tol = 1e-13) {
    int n = 8;
    StateVec coarse = rk4(f, x, s, n);
    for (int round = 0; round < 12; ++round) {
        n *= 2;
        const StateVec fine = rk4(f, x, s, n);
        if (projsde::norm(fine - coarse) <= tol) return fine;
        coarse = fine;
    }
    return coarse;
}

/// Closed-form implicit midpoint step for the linear Kubo system:
/// X = (I - s/2 A)^{-1} (I + s/2 A) x with A = [[0,-1],[1,0]], s = a h + sigma zeta.
inline StateVec kubo_cayley(const StateVec& x, double s) {
    const double t = s / 2.0;
    const double det = 1.0 + t * t;
    // (I - tA)^{-1} = [[1, -t],[t, 1]] / det; (I + tA) x = (x0 - t x1, t x0 + x1).
    const double u0 = x[0] - t * x[1];
    const double u1 = t * x[0] + x[1];
    return StateVec{(u0 - t * u1) / det, (t * u0 + u1) / det};
}

/// Closed-form radial projection for quadratic I = |x|^2 / 2 along grad I(x_hat):
/// X = x_hat * sqrt(2 * target) / |x_hat|, lambda = sqrt(2 target)/|x_hat| - 1.
struct RadialProjection {
    StateVec state;
    double lambda;
};

inline RadialProjection radial_projection(const StateVec& x_hat, double target) {
    const double r = std::sqrt(2.0 * target) / projsde::norm(x_hat);
    return {r * x_hat, r - 1.0};
}

/// Least-squares slope of log y against log x (local re-implementation so the
/// oracle does not share code with the harness fit under test).
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(xs[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(ys[i]) - my);
    }
    return sxy / sxx;
}

} // namespace oracles
