#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "projsde/core/errors.hpp"
#include "projsde/core/model.hpp"
#include "projsde/core/state.hpp"
#include "projsde/noise/rng.hpp"

namespace projsde {

/// Draws a state uniformly from the model's sampling box, rejecting states
/// where any declared invariant gradient falls below the box's floor.
inline StateVec sample_state(const SdeModel& model, RngStream& rng) {
    if (model.sampling_box.bounds.size() != model.dim)
        throw ConfigError("sample_state: sampling box does not match model dimension");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        StateVec x(model.dim);
        for (std::size_t i = 0; i < model.dim; ++i) {
            const auto& [lo, hi] = model.sampling_box.bounds[i];
            x[i] = lo + rng.uniform() * (hi - lo);
        }
        bool ok = true;
        for (const auto& inv : model.invariants) {
            if (norm(inv.gradient(x)) < model.sampling_box.min_gradient_norm) {
                ok = false;
                break;
            }
        }
        if (ok) return x;
    }
    throw EvaluationError("sample_state: rejection sampling failed (gradient floor too high?)");
}

struct ConservationRow {
    std::string label;
    double max_residual_drift = 0.0;
    double max_residual_diffusion = 0.0;

    double max_residual() const { return std::max(max_residual_drift, max_residual_diffusion); }
};

struct ConservationReport {
    std::vector<ConservationRow> rows;

    double max_residual() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.max_residual());
        return m;
    }
};

/**
 * @brief Orthogonality check grad I . f = grad I . g_r = 0 over sampled states.
 *
 * Residuals are relative: |grad I . v| / (|grad I| |v| + 1e-300).
 */
inline ConservationReport check_conserved(const SdeModel& model, int samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("check_conserved: samples must be >= 1");
    constexpr double kGuard = 1e-300;

    ConservationReport report;
    report.rows.resize(model.invariants.size());
    for (std::size_t i = 0; i < model.invariants.size(); ++i)
        report.rows[i].label = model.invariants[i].label;

    RngStream rng(seed, 0);
    for (int s = 0; s < samples; ++s) {
        const StateVec x = sample_state(model, rng);
        StateVec f;
        try {
            f = model.drift(x);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "check_conserved: drift evaluation failed at state (";
            for (std::size_t i = 0; i < x.dim(); ++i) msg << (i ? "," : "") << x[i];
            msg << "): " << e.what();
            throw EvaluationError(msg.str());
        }
        const double fn = norm(f);
        for (std::size_t i = 0; i < model.invariants.size(); ++i) {
            const StateVec grad = model.invariants[i].gradient(x);
            const double gn = norm(grad);
            report.rows[i].max_residual_drift = std::max(
                report.rows[i].max_residual_drift, std::fabs(dot(grad, f)) / (gn * fn + kGuard));
            for (std::size_t r = 0; r < model.noise_count; ++r) {
                const StateVec g = model.diffusions[r](x);
                report.rows[i].max_residual_diffusion =
                    std::max(report.rows[i].max_residual_diffusion,
                             std::fabs(dot(grad, g)) / (gn * norm(g) + kGuard));
            }
        }
    }
    return report;
}

/**
 * @brief Default skew-gradient construction for the first declared invariant:
 * S = (f gI^T - gI f^T)/|gI|^2 and likewise T_r from g_r.
 */
inline std::pair<Mat, std::vector<Mat>> default_skew_gradient(const SdeModel& model,
                                                              const StateVec& x) {
    const StateVec grad = model.invariants.at(0).gradient(x);
    const double g2 = dot(grad, grad);
    if (std::sqrt(g2) < 1e-12)
        throw DegenerateGradientError("default_skew_gradient: |grad I| below 1e-12");

    Mat s = skew_outer(model.drift(x), grad);
    s *= 1.0 / g2;
    std::vector<Mat> t;
    t.reserve(model.noise_count);
    for (std::size_t r = 0; r < model.noise_count; ++r) {
        Mat tr = skew_outer(model.diffusions[r](x), grad);
        tr *= 1.0 / g2;
        t.push_back(tr);
    }
    return {s, std::move(t)};
}

/// Central-difference gradient; test utility for validating analytic gradients.
inline StateVec finite_diff_gradient(const Invariant& inv, const StateVec& x, double eps) {
    StateVec g(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        StateVec xp = x, xm = x;
        xp[i] += eps;
        xm[i] -= eps;
        g[i] = (inv.value(xp) - inv.value(xm)) / (2.0 * eps);
    }
    return g;
}

/// Central-difference Hessian column check: d(grad I)/dx_j.
inline Mat finite_diff_hessian(const Invariant& inv, const StateVec& x, double eps) {
    Mat h(x.dim());
    for (std::size_t j = 0; j < x.dim(); ++j) {
        StateVec xp = x, xm = x;
        xp[j] += eps;
        xm[j] -= eps;
        const StateVec gp = inv.gradient(xp);
        const StateVec gm = inv.gradient(xm);
        for (std::size_t i = 0; i < x.dim(); ++i) h(i, j) = (gp[i] - gm[i]) / (2.0 * eps);
    }
    return h;
}

} // namespace projsde
