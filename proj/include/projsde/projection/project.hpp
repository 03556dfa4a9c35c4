#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "projsde/core/errors.hpp"
#include "projsde/core/linalg.hpp"
#include "projsde/core/model.hpp"
#include "projsde/core/state.hpp"
#include "projsde/schemes/steppers.hpp"

namespace projsde {

/// Where the projection direction Phi is evaluated: at the supporting step's
/// output X_hat (default) or at the pre-step state x.
enum class ProjectionDirection { grad_at_xhat, grad_at_x };

struct ProjectionConfig {
    ProjectionDirection direction = ProjectionDirection::grad_at_xhat;
    double newton_tol = 1e-12;   // on max_i |I^i(X) - target_i|
    int newton_max_iter = 25;

    /// Invariant targets I^i(x0), fixed at path start. When empty the targets
    /// are read from the pre-step state.
    std::vector<double> targets;
};

struct ProjectionOutcome {
    StateVec state;
    StateVec lambda;   // dim = number of invariants used
    int iterations = 0;
    double residual = 0.0;
};

namespace detail {

inline std::string describe_projection(const StateVec& x_prev, const StateVec& x_hat) {
    std::ostringstream msg;
    msg << "x_prev=(";
    for (std::size_t i = 0; i < x_prev.dim(); ++i) msg << (i ? "," : "") << x_prev[i];
    msg << "), x_hat=(";
    for (std::size_t i = 0; i < x_hat.dim(); ++i) msg << (i ? "," : "") << x_hat[i];
    msg << ")";
    return msg.str();
}

/**
 * @brief Newton iteration for X = x_hat + Phi lambda s.t. I(X) = targets,
 * with lambda_0 = 0 and the Jacobian I'(X) Phi refreshed every iteration.
 *
 * `l` invariants are projected simultaneously; l = 1 reproduces the scalar
 * iteration exactly (the 1x1 solve is the same division).
 */
inline ProjectionOutcome project_newton(const SdeModel& model, const StateVec& x_prev,
                                        const StateVec& x_hat, const ProjectionConfig& cfg,
                                        std::size_t l) {
    if (l > model.dim)
        throw ConfigError("projection: more invariants than state dimensions");

    // Columns of Phi.
    std::vector<StateVec> phi(l);
    const StateVec& at = (cfg.direction == ProjectionDirection::grad_at_xhat) ? x_hat : x_prev;
    for (std::size_t i = 0; i < l; ++i) {
        phi[i] = model.invariants[i].gradient(at);
        if (norm(phi[i]) < 1e-12)
            throw DegenerateGradientError("projection: |grad I_" + std::to_string(i + 1) +
                                          "| below 1e-12 at the projection point");
    }

    std::vector<double> targets(l);
    if (!cfg.targets.empty()) {
        if (cfg.targets.size() < l) throw ConfigError("projection: not enough cached targets");
        for (std::size_t i = 0; i < l; ++i) targets[i] = cfg.targets[i];
    } else {
        for (std::size_t i = 0; i < l; ++i) targets[i] = model.invariants[i].value(x_prev);
    }

    StateVec lambda(l);
    StateVec y = x_hat;

    for (int iter = 0; iter <= cfg.newton_max_iter; ++iter) {
        StateVec f(l);
        double res = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            f[i] = model.invariants[i].value(y) - targets[i];
            res = std::max(res, std::fabs(f[i]));
        }
        if (res <= cfg.newton_tol) {
            ProjectionOutcome out;
            out.state = y;
            out.lambda = lambda;
            out.iterations = iter;
            out.residual = res;
            return out;
        }
        if (iter == cfg.newton_max_iter) break;

        Mat jac(l);
        for (std::size_t i = 0; i < l; ++i) {
            const StateVec grad = model.invariants[i].gradient(y);
            for (std::size_t j = 0; j < l; ++j) jac(i, j) = dot(grad, phi[j]);
        }
        StateVec delta;
        try {
            f *= -1.0;
            delta = solve_dense(jac, f);
        } catch (const SingularMatrixError&) {
            throw SingularMatrixError("projection: rank-deficient invariant Jacobian (" +
                                      describe_projection(x_prev, x_hat) + ")");
        }
        lambda += delta;
        y = x_hat;
        for (std::size_t j = 0; j < l; ++j) y.axpy(lambda[j], phi[j]);
    }
    throw NonconvergenceError("projection Newton did not converge in " +
                              std::to_string(cfg.newton_max_iter) + " iterations (" +
                              describe_projection(x_prev, x_hat) + ")");
}

} // namespace detail

/// Project onto the level set of the first declared invariant (scalar Newton).
inline ProjectionOutcome project_single(const SdeModel& model, const StateVec& x_prev,
                                        const StateVec& x_hat, const ProjectionConfig& cfg) {
    return detail::project_newton(model, x_prev, x_hat, cfg, 1);
}

/// Project onto the joint level set of all declared invariants
/// (l-dimensional Newton with Phi = gradient columns).
inline ProjectionOutcome project_multi(const SdeModel& model, const StateVec& x_prev,
                                       const StateVec& x_hat, const ProjectionConfig& cfg) {
    return detail::project_newton(model, x_prev, x_hat, cfg, model.invariants.size());
}

/// Supporting scheme step followed by the projection back onto the invariant
/// manifold of the path's initial state.
inline StateVec projected_step(const SdeModel& model, const StepInput& in,
                               const SchemeConfig& scfg, const ProjectionConfig& pcfg) {
    const StateVec x_hat = scheme_step(model, in, scfg);
    const ProjectionOutcome out = (model.invariants.size() == 1)
                                      ? project_single(model, in.x, x_hat, pcfg)
                                      : project_multi(model, in.x, x_hat, pcfg);
    return out.state;
}

} // namespace projsde
