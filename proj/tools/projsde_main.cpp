// Benchmark and study driver for the projection-method SDE library.
//
// Subcommands:
//   convergence  mean-square convergence study over a set of methods/steps
//   drift        single-path run recording invariant errors (alias: path)
//   list-models  bundled models and their defaults
//   selftest     quick property-suite run
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "projsde/projsde.hpp"

namespace {

using namespace projsde;

double parse_step(const std::string& token) {
    const auto caret = token.find('^');
    if (caret != std::string::npos) {
        const double base = std::stod(token.substr(0, caret));
        const double expo = std::stod(token.substr(caret + 1));
        return std::pow(base, expo);
    }
    return std::stod(token);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::map<std::string, double> parse_params(const std::string& s) {
    std::map<std::string, double> out;
    for (const auto& item : split_commas(s)) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("bad --params item '" + item + "' (expected key=value)");
        out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    return out;
}

struct CommonOpts {
    std::string model = "kubo";
    std::string params_text;
    std::string x0_text;
    std::uint64_t seed = 42;
    int truncation_k = 6;
    bool no_truncation = false;
    std::string projection_direction = "xhat";
    double newton_tol = 1e-12;
    int newton_max_iter = 25;
    unsigned workers = 0;
    std::string out_path;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--model", o.model, "Model: kubo|pendulum|lotka");
    cmd->add_option("--params", o.params_text, "Model parameters, e.g. a=1,sigma=1");
    cmd->add_option("--x0", o.x0_text, "Initial state, comma separated");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--truncation-k", o.truncation_k, "Increment truncation strength k");
    cmd->add_flag("--no-truncation", o.no_truncation, "Disable increment truncation");
    cmd->add_option("--projection-direction", o.projection_direction,
                    "Projection direction: xhat|x");
    cmd->add_option("--newton-tol", o.newton_tol, "Projection Newton tolerance");
    cmd->add_option("--newton-max-iter", o.newton_max_iter, "Projection Newton iteration cap");
    cmd->add_option("--workers", o.workers, "Worker threads (0 = hardware)");
    cmd->add_option("--out", o.out_path, "Output file path");
    cmd->add_option("--format", o.format, "Output format: csv|json");
}

SdeModel model_from(const CommonOpts& o) {
    return build_model(o.model, o.params_text.empty() ? std::map<std::string, double>{}
                                                      : parse_params(o.params_text));
}

StudyConfig make_study_config(const CommonOpts& o, const SdeModel& model) {
    StudyConfig cfg;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.truncation.k = o.truncation_k;
    cfg.truncation.enabled = !o.no_truncation;
    if (o.projection_direction == "xhat")
        cfg.projection_direction = ProjectionDirection::grad_at_xhat;
    else if (o.projection_direction == "x")
        cfg.projection_direction = ProjectionDirection::grad_at_x;
    else
        throw ConfigError("--projection-direction must be xhat or x");
    cfg.newton_tol = o.newton_tol;
    cfg.newton_max_iter = o.newton_max_iter;
    if (!o.params_text.empty()) cfg.params = parse_params(o.params_text);
    if (!o.x0_text.empty()) {
        StateVec x0(model.dim);
        const auto parts = split_commas(o.x0_text);
        if (parts.size() != model.dim)
            throw ConfigError("--x0 needs " + std::to_string(model.dim) + " components");
        for (std::size_t i = 0; i < parts.size(); ++i) x0[i] = std::stod(parts[i]);
        cfg.x0 = x0;
    }
    return cfg;
}

std::vector<double> default_levels(const std::string& model) {
    if (model == "lotka") return {0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8, 0x1p-9, 0x1p-10};
    return {0x1p-3, 0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8};
}

void print_convergence_summary(const ConvergenceReport& r) {
    std::printf("model %s, %llu paths, seed %llu, h_ref %s, T=%g\n", r.model.c_str(),
                static_cast<unsigned long long>(r.paths),
                static_cast<unsigned long long>(r.seed), sci6(r.h_ref).c_str(), r.t_end);
    std::printf("%-11s", "method\\h");
    for (double h : r.h_levels) std::printf(" %12s", sci6(h).c_str());
    std::printf(" %8s\n", "order");
    for (const auto& m : r.methods) {
        std::printf("%-11s", m.c_str());
        for (double h : r.h_levels)
            for (const auto& e : r.entries)
                if (e.method == m && e.h == h) std::printf(" %12s", sci6(e.error).c_str());
        bool fitted = false;
        for (const auto& o : r.orders)
            if (o.method == m) {
                std::printf(" %8.2f", o.order);
                fitted = true;
            }
        if (!fitted) std::printf(" %8s", "-");
        std::printf("\n");
    }
}

int run_convergence_cmd(const CommonOpts& o, std::string methods_text,
                        const std::string& levels_text, const std::string& h_ref_text,
                        std::uint64_t paths, double t_end) {
    const SdeModel model = model_from(o);
    StudyConfig cfg = make_study_config(o, model);
    cfg.paths = paths;
    cfg.t_end = t_end;
    cfg.h_ref = parse_step(h_ref_text);
    if (levels_text.empty()) {
        cfg.h_levels = default_levels(o.model);
    } else {
        for (const auto& tok : split_commas(levels_text)) cfg.h_levels.push_back(parse_step(tok));
    }
    if (methods_text.empty()) methods_text = "euler,eulerP,milstein,milsteinP,mid,t32,t32P,t2,t2P";
    for (const auto& tok : split_commas(methods_text))
        cfg.methods.push_back(parse_method_spec(tok));

    const ConvergenceReport report = run_convergence(model, cfg);

    std::string out = o.out_path;
    if (out.empty()) out = "convergence_" + o.model + "." + o.format;
    export_report(report, o.format, out);
    print_convergence_summary(report);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int run_drift_cmd(const CommonOpts& o, const std::string& method_text, double h, double t_end) {
    const SdeModel model = model_from(o);
    StudyConfig opts = make_study_config(o, model);
    // Paper-figure defaults per model.
    if (h <= 0.0) h = (o.model == "kubo") ? 0.02 : 0.01;
    if (t_end <= 0.0) t_end = (o.model == "pendulum") ? 100.0 : 200.0;
    const MethodSpec spec = parse_method_spec(method_text);
    const DriftReport report = run_drift(model, spec, h, t_end, o.seed, opts);

    std::string out = o.out_path;
    if (out.empty()) out = "drift_" + o.model + "_" + spec.display() + "." + o.format;
    export_report(report, o.format, out);
    std::printf("model %s, method %s, h=%g, T=%g, %zu steps\n", report.model.c_str(),
                report.method.c_str(), report.h, report.t_end, report.rows.size() - 1);
    for (std::size_t i = 0; i < report.invariant_labels.size(); ++i)
        std::printf("max |%s(X_n) - %s(X_0)| = %s\n", report.invariant_labels[i].c_str(),
                    report.invariant_labels[i].c_str(), sci6(report.max_inv_err[i]).c_str());
    std::printf("max combined invariant error = %s\n", sci6(report.max_combined).c_str());
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int run_list_models() {
    for (const std::string name : {"kubo", "pendulum", "lotka"}) {
        const SdeModel m = build_model(name);
        std::printf("%-9s d=%zu, m=%zu, invariants:", name.c_str(), m.dim, m.noise_count);
        for (const auto& inv : m.invariants) std::printf(" %s", inv.label.c_str());
        std::printf(", x0=(");
        for (std::size_t i = 0; i < m.dim; ++i) std::printf("%s%g", i ? "," : "", m.default_x0[i]);
        std::printf(")\n");
    }
    std::printf("parameters: kubo a,sigma; pendulum c1,c2; lotka c\n");
    return 0;
}

bool report_check(const std::string& name, bool ok) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", name.c_str());
    return ok;
}

int run_selftest() {
    bool all = true;
    const std::vector<SdeModel> models = {make_kubo(), make_pendulum(), make_lotka_volterra()};

    for (const auto& model : models) {
        const auto report = check_conserved(model, 1000, 7);
        all &= report_check("orthogonality <= 1e-12: " + model.name,
                            report.max_residual() <= 1e-12);
    }

    for (const auto& model : models) {
        RngStream rng(11, 0);
        double worst = 0.0;
        for (int s = 0; s < 1000; ++s) {
            const StateVec x = sample_state(model, rng);
            const auto [sm, tm] = default_skew_gradient(model, x);
            const StateVec grad = model.invariants[0].gradient(x);
            worst = std::max(worst, skew_defect(sm));
            worst = std::max(worst, norm(sm * grad - model.drift(x)));
            for (std::size_t r = 0; r < model.noise_count; ++r) {
                worst = std::max(worst, skew_defect(tm[r]));
                worst = std::max(worst, norm(tm[r] * grad - model.diffusions[r](x)));
            }
        }
        all &= report_check("default skew-gradient skew + reconstruction <= 1e-12: " + model.name,
                            worst <= 1e-12);
    }

    for (const auto& model : models) {
        RngStream rng(13, 0);
        double worst = 0.0;
        for (int s = 0; s < 200; ++s) {
            const StateVec x = sample_state(model, rng);
            for (const auto& inv : model.invariants) {
                const StateVec fd = finite_diff_gradient(inv, x, 1e-6);
                const StateVec an = inv.gradient(x);
                worst = std::max(worst, norm(fd - an) / std::max(1.0, norm(an)));
            }
        }
        all &= report_check("analytic gradients vs finite differences: " + model.name,
                            worst <= 1e-5);
    }

    for (const auto& model : models) {
        RngStream rng(17, 0);
        double worst = 0.0;
        for (int s = 0; s < 500; ++s) {
            const StateVec x = sample_state(model, rng);
            const StateVec y = sample_state(model, rng);
            if (norm(y - x) < 1e-8) continue;
            for (const auto& inv : model.invariants) {
                const StateVec g = gonzalez_gradient(inv, x, y);
                worst =
                    std::max(worst, std::fabs(dot(g, y - x) - (inv.value(y) - inv.value(x))));
            }
        }
        all &= report_check("discrete-gradient identity <= 1e-13: " + model.name, worst <= 1e-13);
    }

    {
        bool ok = true;
        for (const auto& model : models) {
            const std::vector<double> zeros(model.noise_count, 0.0);
            for (Method m : {Method::euler, Method::milstein, Method::midpoint, Method::t32,
                             Method::t2, Method::discrete_gradient}) {
                SchemeConfig cfg;
                cfg.method = m;
                const StepInput in{model.default_x0, 0.0, zeros};
                ok &= scheme_step(model, in, cfg) == model.default_x0;
            }
        }
        all &= report_check("zero-step identity, all schemes", ok);
    }

    {
        RngStream stream(23, 0);
        const double est = truncation_moment_check(0x1p-4, 2, 100000, stream);
        all &= report_check("truncation moment bound E(xi-zeta)^2 <= h^k", est <= 0x1p-8);
    }

    {
        RngStream s1(31, 5), s2(31, 5);
        const BrownianGrid g1 = sample_grid(s1, 2, 0x1p-6, 64);
        const BrownianGrid g2 = sample_grid(s2, 2, 0x1p-6, 64);
        bool ok = g1.increments == g2.increments;
        const auto c4 = coarsen(g1, 0, 4);
        BrownianGrid mid;
        mid.h_fine = g1.h_fine * 2;
        mid.n_fine = 32;
        mid.channels = 1;
        mid.increments = coarsen(g1, 0, 2);
        ok &= coarsen(mid, 0, 2) == c4;
        all &= report_check("grid determinism and coarsening composition", ok);
    }

    {
        StudyConfig cfg;
        cfg.paths = 64;
        cfg.h_levels = {0x1p-3, 0x1p-4, 0x1p-5};
        cfg.h_ref = 0x1p-9;
        cfg.methods = {parse_method_spec("eulerP"), parse_method_spec("t2")};
        cfg.workers = 1;
        ConvergenceReport r1 = run_convergence(models[0], cfg);
        cfg.workers = 4;
        ConvergenceReport r2 = run_convergence(models[0], cfg);
        all &= report_check("study determinism across worker counts",
                            convergence_csv(r1) == convergence_csv(r2));
    }

    {
        const SdeModel kubo = models[0];
        ProjectionConfig pcfg;
        const StateVec x_prev{1.0, 0.0};
        const StateVec x_hat{0.995, 0.11};
        const auto out = project_single(kubo, x_prev, x_hat, pcfg);
        const auto again = project_single(kubo, x_prev, out.state, pcfg);
        const double bound =
            10.0 * pcfg.newton_tol / norm(kubo.invariants[0].gradient(out.state));
        all &= report_check("projection idempotence", norm(again.state - out.state) <= bound);
    }

    return all ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"projection methods for conserved-quantity-preserving SDE integration"};
    app.require_subcommand(1);

    CommonOpts conv_opts, drift_opts;
    std::string methods_text, levels_text, h_ref_text = "2^-14";
    std::uint64_t paths = 10000;
    double conv_t_end = 1.0;

    CLI::App* conv = app.add_subcommand("convergence", "mean-square convergence study");
    add_common(conv, conv_opts);
    conv->add_option("--methods", methods_text,
                     "Comma list; suffix P = projected (default: all supporting methods)");
    conv->add_option("--h-levels", levels_text, "Comma list of steps, e.g. 2^-3,2^-4");
    conv->add_option("--h-ref", h_ref_text, "Reference step (T2 reference)");
    conv->add_option("--paths", paths, "Monte-Carlo sample paths");
    conv->add_option("--t-end", conv_t_end, "Final time");

    std::string drift_method = "eulerP";
    double drift_h = 0.0, drift_t_end = 0.0;
    CLI::App* drift = app.add_subcommand("drift", "single-path invariant-drift run");
    drift->alias("path");
    add_common(drift, drift_opts);
    drift->add_option("--method", drift_method, "Method, suffix P = projected");
    drift->add_option("--h-step", drift_h, "Step size (default: paper-figure value per model)");
    drift->add_option("--t-end", drift_t_end, "Final time (default per model)");

    CLI::App* list = app.add_subcommand("list-models", "print bundled models");
    CLI::App* self = app.add_subcommand("selftest", "run the quick property suites");

    try {
        app.parse(argc, argv);
        if (conv->parsed())
            return run_convergence_cmd(conv_opts, methods_text, levels_text, h_ref_text, paths,
                                       conv_t_end);
        if (drift->parsed()) return run_drift_cmd(drift_opts, drift_method, drift_h, drift_t_end);
        if (list->parsed()) return run_list_models();
        if (self->parsed()) return run_selftest();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const projsde::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const projsde::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
