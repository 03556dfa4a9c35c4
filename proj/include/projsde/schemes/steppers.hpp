#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include "projsde/core/errors.hpp"
#include "projsde/core/linalg.hpp"
#include "projsde/core/model.hpp"
#include "projsde/core/state.hpp"
#include "projsde/schemes/config.hpp"
#include "projsde/schemes/discrete_gradient.hpp"

namespace projsde {

/// One step of input data: current state, step size, and the raw own-step
/// Wiener increments (already coarsened to step h, not yet truncated).
struct StepInput {
    StateVec x;
    double h = 0.0;
    std::span<const double> dW;
};

namespace detail {

/// Truncate the per-channel increments for this step. h == 0 passes raw
/// increments through (the clamp bound diverges as h -> 0).
inline void truncated_increments(const SdeModel& model, const StepInput& in,
                                 const TruncationConfig& cfg, std::array<double, kMaxDim>& zeta) {
    for (std::size_t r = 0; r < model.noise_count; ++r) {
        const double dw = in.dW[r];
        zeta[r] = (cfg.enabled && in.h > 0.0) ? truncate_increment(dw, in.h, cfg) : dw;
    }
}

inline std::string describe_step(const SdeModel& model, const StepInput& in, const char* scheme) {
    std::ostringstream msg;
    msg << scheme << " on " << model.name << " at x=(";
    for (std::size_t i = 0; i < in.x.dim(); ++i) msg << (i ? "," : "") << in.x[i];
    msg << "), h=" << in.h;
    return msg.str();
}

/// sum_r c_r^2 for the special class; the Ito correction there is
/// (1/2) sum_r g_r' g_r = c_eff^2 v_2.
inline double special_c2(const SpecialClassData& sc) {
    double c2 = 0.0;
    for (double c : sc.c) c2 += c * c;
    return c2;
}

struct ImplicitResult {
    StateVec x;
    int iterations = 0;
    double residual = 0.0;
};

/**
 * @brief Solve X = rhs(X): fixed-point iteration first, damped Newton with a
 * finite-difference Jacobian after max_iter/2 non-converging iterations.
 */
template <typename RhsFn>
ImplicitResult solve_implicit(const RhsFn& rhs, const StateVec& start, double tol, int max_iter,
                              const std::string& context) {
    if (!(tol > 0.0) || max_iter < 1)
        throw ConfigError("implicit solve: need tol > 0 and max_iter >= 1");
    ImplicitResult out;
    StateVec x = start;
    int iter = 0;

    // Fixed-point phase.
    const int fp_budget = std::max(1, max_iter / 2);
    double best_res = std::numeric_limits<double>::infinity();
    StateVec best = x;
    for (; iter < fp_budget; ++iter) {
        StateVec next = rhs(x);
        if (!next.all_finite()) {
            x = best;
            break;
        }
        const double res = norm_inf(next - x);
        x = next;
        if (res < best_res) {
            best_res = res;
            best = x;
        }
        if (res <= tol) {
            out.x = x;
            out.iterations = iter + 1;
            out.residual = res;
            return out;
        }
    }
    if (!x.all_finite()) x = best;

    // Damped Newton on G(X) = X - rhs(X).
    const std::size_t d = x.dim();
    auto g_of = [&](const StateVec& y) { return y - rhs(y); };
    StateVec g = g_of(x);
    for (; iter < max_iter; ++iter) {
        const double gn = norm_inf(g);
        if (gn <= tol) {
            out.x = x;
            out.iterations = iter;
            out.residual = gn;
            return out;
        }
        Mat jac(d);
        for (std::size_t j = 0; j < d; ++j) {
            const double eps = std::sqrt(std::numeric_limits<double>::epsilon()) *
                               std::max(1.0, std::fabs(x[j]));
            StateVec xp = x;
            xp[j] += eps;
            const StateVec gp = g_of(xp);
            for (std::size_t i = 0; i < d; ++i) jac(i, j) = (gp[i] - g[i]) / eps;
        }
        StateVec delta;
        try {
            StateVec rhs_vec = g;
            rhs_vec *= -1.0;
            delta = solve_dense(jac, rhs_vec);
        } catch (const SingularMatrixError&) {
            throw NonconvergenceError("implicit solve: singular Newton Jacobian (" + context + ")");
        }
        double t = 1.0;
        StateVec cand = x + delta;
        StateVec gc = g_of(cand);
        while ((!gc.all_finite() || norm_inf(gc) >= gn) && t > 1e-8) {
            t *= 0.5;
            cand = x;
            cand.axpy(t, delta);
            gc = g_of(cand);
        }
        x = cand;
        g = gc;
    }
    const double gn = norm_inf(g);
    if (gn <= tol) {
        out.x = x;
        out.iterations = iter;
        out.residual = gn;
        return out;
    }
    throw NonconvergenceError("implicit solve failed after " + std::to_string(max_iter) +
                              " iterations (" + context + ")");
}

} // namespace detail

/**
 * @brief Euler-Maruyama step for the Stratonovich system, mean-square order 0.5.
 *
 * X = x + h (f + 1/2 sum_r g_r' g_r) + sum_r g_r zeta_r. The drift correction
 * converts the Stratonovich drift to Ito form and is mandatory; it comes from
 * the diffusion Jacobians, or from g_r' g_r = c_r^2 f' f for the special class.
 */
inline StateVec euler_step(const SdeModel& model, const StepInput& in, const SchemeConfig& cfg) {
    std::array<double, kMaxDim> zeta{};
    detail::truncated_increments(model, in, cfg.truncation, zeta);

    StateVec drift = model.drift(in.x);
    if (model.noise_count > 0) {
        if (model.has_diffusion_jacobians()) {
            for (std::size_t r = 0; r < model.noise_count; ++r) {
                const Mat jac = model.diffusion_jacobians[r](in.x);
                drift.axpy(0.5, jac * model.diffusions[r](in.x));
            }
        } else if (model.special_class) {
            StateVec v[4];
            model.special_class->ode_taylor_coeffs(in.x, 2, v);
            drift.axpy(detail::special_c2(*model.special_class), v[1]); // v_2 = (1/2) f' f
        } else {
            throw ConfigError("euler_step: model provides neither diffusion Jacobians nor "
                              "special-class data for the Ito drift correction");
        }
    }

    StateVec x = in.x;
    x.axpy(in.h, drift);
    for (std::size_t r = 0; r < model.noise_count; ++r) x.axpy(zeta[r], model.diffusions[r](in.x));
    return x;
}

/**
 * @brief Milstein step for commutative noise, mean-square order 1.
 *
 * X = x + h f + sum_r g_r zeta_r + sum_{i<r} (Lambda_i g_r) zeta_i zeta_r
 *       + 1/2 sum_r (Lambda_r g_r) zeta_r^2,  Lambda_i g_r = g_r' g_i.
 */
inline StateVec milstein_step(const SdeModel& model, const StepInput& in, const SchemeConfig& cfg) {
    if (model.noise_count > 0 && !model.commutative_noise)
        throw UnsupportedModelError("milstein_step: model is not flagged commutative");

    std::array<double, kMaxDim> zeta{};
    detail::truncated_increments(model, in, cfg.truncation, zeta);

    StateVec x = in.x;
    x.axpy(in.h, model.drift(in.x));
    for (std::size_t r = 0; r < model.noise_count; ++r) x.axpy(zeta[r], model.diffusions[r](in.x));

    if (model.noise_count == 0) return x;

    if (model.has_diffusion_jacobians()) {
        std::array<StateVec, kMaxDim> g;
        for (std::size_t r = 0; r < model.noise_count; ++r) g[r] = model.diffusions[r](in.x);
        for (std::size_t r = 0; r < model.noise_count; ++r) {
            const Mat jac_r = model.diffusion_jacobians[r](in.x);
            for (std::size_t i = 0; i < r; ++i) x.axpy(zeta[i] * zeta[r], jac_r * g[i]);
            x.axpy(0.5 * zeta[r] * zeta[r], jac_r * g[r]);
        }
    } else if (model.special_class) {
        // Lambda_i g_r = c_i c_r f' f, so the double sum collapses to w^2 v_2
        // with w = sum_r c_r zeta_r.
        const auto& sc = *model.special_class;
        double w = 0.0;
        for (std::size_t r = 0; r < model.noise_count; ++r) w += sc.c[r] * zeta[r];
        StateVec v[4];
        sc.ode_taylor_coeffs(in.x, 2, v);
        x.axpy(w * w, v[1]);
    } else {
        throw ConfigError("milstein_step: model provides neither diffusion Jacobians nor "
                          "special-class data for Lambda_i g_r");
    }
    return x;
}

/**
 * @brief Implicit midpoint step, mean-square order 1 for commutative noise.
 *
 * Solves X = x + h f((x+X)/2) + sum_r g_r((x+X)/2) zeta_r. Requires truncated
 * increments (the fixed point / Newton solve needs a bounded right-hand side).
 */
inline StateVec midpoint_step(const SdeModel& model, const StepInput& in, const SchemeConfig& cfg) {
    if (!cfg.truncation.enabled)
        throw ConfigError("midpoint_step: implicit scheme requires increment truncation");

    std::array<double, kMaxDim> zeta{};
    detail::truncated_increments(model, in, cfg.truncation, zeta);

    const StateVec& x0 = in.x;
    auto rhs = [&](const StateVec& x) {
        const StateVec mid = 0.5 * (x0 + x);
        StateVec r = x0;
        r.axpy(in.h, model.drift(mid));
        for (std::size_t k = 0; k < model.noise_count; ++k)
            r.axpy(zeta[k], model.diffusions[k](mid));
        return r;
    };

    // Euler predictor.
    StateVec start = x0;
    start.axpy(in.h, model.drift(x0));
    for (std::size_t k = 0; k < model.noise_count; ++k)
        start.axpy(zeta[k], model.diffusions[k](x0));

    return detail::solve_implicit(rhs, start, cfg.implicit_tol, cfg.implicit_max_iter,
                                  detail::describe_step(model, in, "midpoint"))
        .x;
}

/**
 * @brief Strong Taylor step for the special class dX = f(X)(dt + sum c_r o dW_r).
 *
 * The exact solution is phi(t + sum_r c_r W_r) with phi' = f(phi), so a step
 * expands as sum_k v_k(x) ds^k over the randomized increment ds = h + w,
 * w = sum_r c_r zeta_r ~ N(0, c2 h), c2 = sum c_r^2.
 *
 * T2 keeps k <= 4 unchanged: remaining mean defect O(h^3), mean-square defect
 * O(h^2.5), hence mean-square order 2.
 *
 * T32 keeps k <= 3 with two level-resolved substitutions, each replacing a
 * term by its conditional mean:
 *   ds^3  ->  ds^3 - 3h(w^2 - c2 h)   (the h w^2 fluctuation at level 3)
 *   ds^4  ->  E[ds^4] = 3 c2^2 h^2 + 6 c2 h^3 + h^4
 * Both substitutions are zero-mean and O(h^2) in mean-square, so the one-step
 * defect has mean O(h^3) and mean-square O(h^2): mean-square order 1.5.
 * Keeping ds^3 un-substituted instead leaves the O(h^2) bias E[v_4 ds^4]
 * unrepaired and drops the order to 1.
 */
inline StateVec taylor_step(const SdeModel& model, const StepInput& in, int order_terms,
                            const SchemeConfig& cfg) {
    if (!model.special_class)
        throw UnsupportedModelError("taylor_step: model lacks special-class data");
    const auto& sc = *model.special_class;

    std::array<double, kMaxDim> zeta{};
    detail::truncated_increments(model, in, cfg.truncation, zeta);

    double w = 0.0;
    for (std::size_t r = 0; r < model.noise_count; ++r) w += sc.c[r] * zeta[r];
    const double h = in.h;
    const double ds = h + w;

    StateVec v[4];
    sc.ode_taylor_coeffs(in.x, 4, v);

    StateVec x = in.x;
    if (order_terms == 4) {
        StateVec acc = v[3];
        for (int k = 3; k >= 1; --k) {
            acc *= ds;
            acc += v[k - 1];
        }
        x.axpy(ds, acc);
    } else {
        const double c2 = detail::special_c2(sc);
        const double ds2 = ds * ds;
        x.axpy(ds, v[0]);
        x.axpy(ds2, v[1]);
        x.axpy(ds2 * ds - 3.0 * h * (w * w - c2 * h), v[2]);
        x.axpy(h * h * (3.0 * c2 * c2 + 6.0 * c2 * h + h * h), v[3]);
    }
    return x;
}

/**
 * @brief Discrete gradient step: X = x + [h S + sum_r zeta_r T_r] gbar(x, X)
 * with the Gonzalez discrete gradient of the first declared invariant.
 *
 * I(X) = I(x) holds exactly (up to the solver tolerance) because the bracket
 * is skew-symmetric and gbar(x,X).(X-x) = I(X) - I(x).
 */
inline StateVec discrete_gradient_step(const SdeModel& model, const StepInput& in,
                                       const SchemeConfig& cfg) {
    if (!model.sg_form)
        throw UnsupportedModelError("discrete_gradient_step: model lacks a skew-gradient form");
    const auto& sg = *model.sg_form;
    const Invariant& inv = model.invariants.at(0);

    std::array<double, kMaxDim> zeta{};
    detail::truncated_increments(model, in, cfg.truncation, zeta);

    Mat bracket = sg.S(in.x);
    bracket *= in.h;
    for (std::size_t r = 0; r < model.noise_count; ++r) {
        Mat t = sg.T[r](in.x);
        t *= zeta[r];
        bracket += t;
    }

    const StateVec& x0 = in.x;
    auto rhs = [&](const StateVec& x) { return x0 + bracket * gonzalez_gradient(inv, x0, x); };

    StateVec start = x0 + bracket * inv.gradient(x0);
    return detail::solve_implicit(rhs, start, cfg.implicit_tol, cfg.implicit_max_iter,
                                  detail::describe_step(model, in, "discrete-gradient"))
        .x;
}

/// Dispatch on the configured supporting method.
inline StateVec scheme_step(const SdeModel& model, const StepInput& in, const SchemeConfig& cfg) {
    if (in.h < 0.0) throw ConfigError("scheme_step: negative step size");
    switch (cfg.method) {
        case Method::euler: return euler_step(model, in, cfg);
        case Method::milstein: return milstein_step(model, in, cfg);
        case Method::midpoint: return midpoint_step(model, in, cfg);
        case Method::t32: return taylor_step(model, in, 3, cfg);
        case Method::t2: return taylor_step(model, in, 4, cfg);
        case Method::discrete_gradient: return discrete_gradient_step(model, in, cfg);
    }
    throw ConfigError("scheme_step: unknown method");
}

} // namespace projsde
