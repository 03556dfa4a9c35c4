#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "projsde/core/errors.hpp"
#include "projsde/core/model.hpp"
#include "projsde/harness/report.hpp"
#include "projsde/harness/sum.hpp"
#include "projsde/noise/brownian.hpp"
#include "projsde/noise/rng.hpp"
#include "projsde/projection/project.hpp"
#include "projsde/schemes/config.hpp"
#include "projsde/schemes/steppers.hpp"

namespace projsde {

/**
 * @brief Configuration of a Monte-Carlo convergence study.
 *
 * Every method and step size consumes coarsenings of the same per-path fine
 * grid; the reference solution is T2 at h_ref on that grid. Results are
 * deterministic in (seed, paths, levels) regardless of the worker count.
 */
struct StudyConfig {
    std::vector<MethodSpec> methods;
    std::vector<double> h_levels;
    double t_end = 1.0;
    double h_ref = 0x1p-14;
    std::uint64_t paths = 10000;
    std::uint64_t seed = 42;
    unsigned workers = 0; // 0 = hardware concurrency

    TruncationConfig truncation{};
    ProjectionDirection projection_direction = ProjectionDirection::grad_at_xhat;
    double newton_tol = 1e-12;
    int newton_max_iter = 25;
    double implicit_tol = 1e-14;
    int implicit_max_iter = 50;

    std::optional<StateVec> x0;

    /// Integrate the reference on a coarsening of the grid (consistency
    /// experiments); 1 means the fine grid itself.
    std::size_t ref_coarsen_factor = 1;

    /// Extra metadata copied into the report (CLI parameter echo).
    std::map<std::string, double> params;
};

struct OrderFitResult {
    double order = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

/// Least-squares slope of log e against log h.
inline OrderFitResult fit_order(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw NumericError("fit_order: need at least 3 levels");
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [h, e] : points) {
        if (!(e > 0.0)) throw NumericError("fit_order: nonpositive error value");
        if (!(h > 0.0)) throw NumericError("fit_order: nonpositive step size");
        sx += std::log(h);
        sy += std::log(e);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [h, e] : points) {
        const double dx = std::log(h) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(e) - my);
    }
    OrderFitResult fit;
    fit.order = sxy / sxx;
    fit.intercept = my - fit.order * mx;
    double ss = 0.0;
    for (const auto& [h, e] : points) {
        const double r = std::log(e) - (fit.intercept + fit.order * std::log(h));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

namespace detail {

inline std::size_t checked_dyadic_factor(double h, double h_ref, std::size_t n_fine,
                                         const char* what) {
    const double ratio = h / h_ref;
    const auto factor = static_cast<std::size_t>(std::llround(ratio));
    if (factor < 1 || std::fabs(ratio - static_cast<double>(factor)) > 1e-9 * ratio ||
        !is_power_of_two(factor) || n_fine % factor != 0)
        throw ConfigError(std::string(what) +
                          ": step must be a power-of-two multiple of h_ref dividing the grid");
    return factor;
}

inline std::size_t checked_step_count(double t_end, double h, const char* what) {
    const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
    if (steps < 1 || std::fabs(static_cast<double>(steps) * h - t_end) > 1e-9 * t_end)
        throw ConfigError(std::string(what) + ": t_end must be an integer multiple of the step");
    return steps;
}

/// Integrate one path over per-channel increment sequences at fixed step h.
/// scfg.method must already match spec.method. For projected methods, tracks
/// the worst post-step invariant residual.
inline StateVec integrate_path(const SdeModel& model, const MethodSpec& spec, const StateVec& x0,
                               double h, std::span<const std::span<const double>> channels,
                               std::size_t steps, const SchemeConfig& scfg,
                               const ProjectionConfig& pcfg, double* max_inv_residual) {
    StateVec x = x0;
    std::array<double, kMaxDim> dw{};
    const std::size_t m = model.noise_count;
    for (std::size_t i = 0; i < steps; ++i) {
        for (std::size_t r = 0; r < m; ++r) dw[r] = channels[r][i];
        const StepInput in{x, h, {dw.data(), m}};
        if (spec.projected) {
            x = projected_step(model, in, scfg, pcfg);
            if (max_inv_residual) {
                for (std::size_t q = 0; q < model.invariants.size(); ++q) {
                    const double res =
                        std::fabs(model.invariants[q].value(x) - pcfg.targets[q]);
                    *max_inv_residual = std::max(*max_inv_residual, res);
                }
            }
        } else {
            x = scheme_step(model, in, scfg);
        }
        if (!x.all_finite())
            throw NumericError("integration produced a non-finite state (" + spec.display() +
                               ", h=" + std::to_string(h) + ", step " + std::to_string(i) + ")");
    }
    return x;
}

} // namespace detail

using detail::is_power_of_two;

/**
 * @brief Run the common-random-path mean-square convergence study.
 *
 * Per path: sample one Brownian grid at h_ref, compute the T2 reference on it,
 * then integrate every (method, h) on coarsenings of the same grid and
 * accumulate |X_N - X_ref(T)|^2. Path reduction is a fixed pairwise tree, so
 * the report is bitwise identical for any worker count.
 */
inline ConvergenceReport run_convergence(const SdeModel& model, const StudyConfig& cfg) {
    if (cfg.methods.empty()) throw ConfigError("run_convergence: no methods given");
    if (cfg.h_levels.empty()) throw ConfigError("run_convergence: no step levels given");
    if (cfg.paths < 1) throw ConfigError("run_convergence: need at least one path");
    if (!model.special_class)
        throw ConfigError("run_convergence: reference solution needs special-class (T2) support");

    const std::size_t n_fine = detail::checked_step_count(cfg.t_end, cfg.h_ref, "run_convergence");
    std::vector<std::size_t> factors;
    factors.reserve(cfg.h_levels.size());
    for (double h : cfg.h_levels)
        factors.push_back(detail::checked_dyadic_factor(h, cfg.h_ref, n_fine, "run_convergence"));
    if (!is_power_of_two(cfg.ref_coarsen_factor) || n_fine % cfg.ref_coarsen_factor != 0)
        throw ConfigError("run_convergence: invalid reference coarsening factor");

    const StateVec x0 = cfg.x0 ? *cfg.x0 : model.default_x0;
    if (x0.dim() != model.dim) throw ConfigError("run_convergence: x0 dimension mismatch");

    SchemeConfig scfg;
    scfg.truncation = cfg.truncation;
    scfg.implicit_tol = cfg.implicit_tol;
    scfg.implicit_max_iter = cfg.implicit_max_iter;

    ProjectionConfig pcfg;
    pcfg.direction = cfg.projection_direction;
    pcfg.newton_tol = cfg.newton_tol;
    pcfg.newton_max_iter = cfg.newton_max_iter;
    pcfg.targets.resize(model.invariants.size());
    for (std::size_t q = 0; q < model.invariants.size(); ++q)
        pcfg.targets[q] = model.invariants[q].value(x0);

    const std::size_t n_methods = cfg.methods.size();
    const std::size_t n_levels = cfg.h_levels.size();
    const std::size_t n_paths = cfg.paths;
    const std::size_t m = model.noise_count;

    std::vector<double> err2(n_methods * n_levels * n_paths, 0.0);
    std::vector<double> resid(n_methods * n_levels * n_paths, 0.0);
    auto slot = [&](std::size_t k, std::size_t l, std::size_t p) {
        return (k * n_levels + l) * n_paths + p;
    };

    std::atomic<std::uint64_t> next_path{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&]() {
        std::vector<std::vector<double>> coarse(m);
        std::vector<std::span<const double>> channels(m);
        while (!failed.load(std::memory_order_relaxed)) {
            const std::uint64_t p = next_path.fetch_add(1);
            if (p >= n_paths) break;
            try {
                RngStream stream(cfg.seed, p);
                const BrownianGrid grid = sample_grid(stream, m, cfg.h_ref, n_fine);

                SchemeConfig ref_cfg = scfg;
                ref_cfg.method = Method::t2;
                StateVec x_ref;
                if (cfg.ref_coarsen_factor == 1) {
                    for (std::size_t r = 0; r < m; ++r) channels[r] = grid.channel(r);
                    x_ref = detail::integrate_path(model, MethodSpec{Method::t2, false}, x0,
                                                   cfg.h_ref, channels, n_fine, ref_cfg, pcfg,
                                                   nullptr);
                } else {
                    for (std::size_t r = 0; r < m; ++r) {
                        coarse[r] = coarsen(grid, r, cfg.ref_coarsen_factor);
                        channels[r] = coarse[r];
                    }
                    x_ref = detail::integrate_path(
                        model, MethodSpec{Method::t2, false}, x0,
                        cfg.h_ref * static_cast<double>(cfg.ref_coarsen_factor), channels,
                        n_fine / cfg.ref_coarsen_factor, ref_cfg, pcfg, nullptr);
                }

                for (std::size_t l = 0; l < n_levels; ++l) {
                    for (std::size_t r = 0; r < m; ++r) {
                        coarse[r] = coarsen(grid, r, factors[l]);
                        channels[r] = coarse[r];
                    }
                    const std::size_t steps = n_fine / factors[l];
                    for (std::size_t k = 0; k < n_methods; ++k) {
                        SchemeConfig mcfg = scfg;
                        mcfg.method = cfg.methods[k].method;
                        double path_resid = 0.0;
                        const StateVec x_end = detail::integrate_path(
                            model, cfg.methods[k], x0, cfg.h_levels[l], channels, steps, mcfg,
                            pcfg, cfg.methods[k].projected ? &path_resid : nullptr);
                        const StateVec d = x_end - x_ref;
                        err2[slot(k, l, p)] = dot(d, d);
                        resid[slot(k, l, p)] = path_resid;
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    try {
                        std::rethrow_exception(std::current_exception());
                    } catch (const ConfigError&) {
                        first_error = std::current_exception();
                    } catch (const std::exception& e) {
                        first_error = std::make_exception_ptr(NumericError(
                            "path " + std::to_string(p) + ": " + e.what()));
                    }
                }
                failed.store(true);
            }
        }
    };

    unsigned n_workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
    if (n_workers == 0) n_workers = 1;
    n_workers = static_cast<unsigned>(
        std::min<std::uint64_t>(n_workers, n_paths));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ConvergenceReport report;
    report.model = model.name;
    report.params = cfg.params;
    report.x0.assign(x0.begin(), x0.end());
    report.seed = cfg.seed;
    report.paths = cfg.paths;
    report.t_end = cfg.t_end;
    report.h_ref = cfg.h_ref;
    report.truncation_k = cfg.truncation.k;
    report.truncation_enabled = cfg.truncation.enabled;
    report.projection_direction =
        cfg.projection_direction == ProjectionDirection::grad_at_xhat ? "xhat" : "x";
    report.newton_tol = cfg.newton_tol;
    report.created_at = iso8601_now();
    report.h_levels = cfg.h_levels;
    for (const auto& spec : cfg.methods) report.methods.push_back(spec.display());

    for (std::size_t k = 0; k < n_methods; ++k) {
        std::vector<std::pair<double, double>> points;
        bool fit_ok = n_levels >= 3;
        for (std::size_t l = 0; l < n_levels; ++l) {
            const double mse2 =
                pairwise_sum({err2.data() + slot(k, l, 0), n_paths}) / static_cast<double>(n_paths);
            const double e = std::sqrt(mse2);
            report.entries.push_back({cfg.methods[k].display(), cfg.h_levels[l], e});
            if (e > 0.0)
                points.emplace_back(cfg.h_levels[l], e);
            else
                fit_ok = false;

            if (cfg.methods[k].projected) {
                double worst = 0.0;
                for (std::size_t p = 0; p < n_paths; ++p)
                    worst = std::max(worst, resid[slot(k, l, p)]);
                if (worst > cfg.newton_tol)
                    throw NumericError("post-projection invariant residual " + sci6(worst) +
                                       " exceeds newton_tol for " + cfg.methods[k].display());
            }
        }
        if (fit_ok) {
            const OrderFitResult fit = fit_order(points);
            report.orders.push_back(
                {cfg.methods[k].display(), fit.order, fit.intercept, fit.residual});
        }
    }
    return report;
}

/**
 * @brief Single-path integration recording state and invariant errors each step.
 */
inline DriftReport run_drift(const SdeModel& model, const MethodSpec& spec, double h,
                             double t_end, std::uint64_t seed, const StudyConfig& opts = {}) {
    const std::size_t steps = detail::checked_step_count(t_end, h, "run_drift");

    const StateVec x0 = opts.x0 ? *opts.x0 : model.default_x0;
    if (x0.dim() != model.dim) throw ConfigError("run_drift: x0 dimension mismatch");

    SchemeConfig scfg;
    scfg.method = spec.method;
    scfg.truncation = opts.truncation;
    scfg.implicit_tol = opts.implicit_tol;
    scfg.implicit_max_iter = opts.implicit_max_iter;

    ProjectionConfig pcfg;
    pcfg.direction = opts.projection_direction;
    pcfg.newton_tol = opts.newton_tol;
    pcfg.newton_max_iter = opts.newton_max_iter;

    const std::size_t l = model.invariants.size();
    std::vector<double> targets(l);
    pcfg.targets.resize(l);
    for (std::size_t q = 0; q < l; ++q) pcfg.targets[q] = targets[q] = model.invariants[q].value(x0);

    DriftReport report;
    report.model = model.name;
    report.method = spec.display();
    report.h = h;
    report.t_end = t_end;
    report.seed = seed;
    report.created_at = iso8601_now();
    for (const auto& inv : model.invariants) report.invariant_labels.push_back(inv.label);
    report.max_inv_err.assign(l, 0.0);
    report.rows.reserve(steps + 1);

    RngStream stream(seed, 0);
    const std::size_t m = model.noise_count;
    StateVec x = x0;
    const double sqrt_h = std::sqrt(h);
    std::array<double, kMaxDim> dw{};

    auto record = [&](std::uint64_t step) {
        DriftRow row;
        row.step = step;
        row.t = static_cast<double>(step) * h;
        row.state.assign(x.begin(), x.end());
        double sum2 = 0.0;
        for (std::size_t q = 0; q < l; ++q) {
            const double diff = model.invariants[q].value(x) - targets[q];
            row.inv_err.push_back(std::fabs(diff));
            report.max_inv_err[q] = std::max(report.max_inv_err[q], std::fabs(diff));
            sum2 += diff * diff;
        }
        row.combined = std::sqrt(sum2);
        report.max_combined = std::max(report.max_combined, row.combined);
        report.rows.push_back(std::move(row));
    };

    record(0);
    for (std::size_t i = 1; i <= steps; ++i) {
        for (std::size_t r = 0; r < m; ++r) dw[r] = sqrt_h * stream.normal();
        const StepInput in{x, h, {dw.data(), m}};
        try {
            x = spec.projected ? projected_step(model, in, scfg, pcfg) : scheme_step(model, in, scfg);
        } catch (const NumericError& e) {
            throw NumericError("run_drift: step " + std::to_string(i) + " (t=" +
                               std::to_string(static_cast<double>(i) * h) + "): " + e.what());
        }
        record(i);
    }
    return report;
}

} // namespace projsde
