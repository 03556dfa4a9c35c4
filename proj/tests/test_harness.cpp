#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "projsde/projsde.hpp"

using namespace projsde;

TEST_CASE("pairwise_sum: exact on integers, independent of size split") {
    std::vector<double> ones(1000, 1.0);
    CHECK(pairwise_sum(ones) == 1000.0);
    std::vector<double> v{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(pairwise_sum(v) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("fit_order: exact power laws") {
    std::vector<std::pair<double, double>> pts;
    for (double h : {0.125, 0.0625, 0.03125, 0.015625}) pts.emplace_back(h, h);
    const OrderFitResult linear = fit_order(pts);
    CHECK(linear.order == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(linear.residual <= 1e-12);

    pts.clear();
    for (double h : {0.5, 0.25, 0.125}) pts.emplace_back(h, 3.0 * h * h);
    const OrderFitResult quad = fit_order(pts);
    CHECK(quad.order == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(quad.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("fit_order: published EulerP row fits 1.01") {
    const std::vector<double> hs = {0x1p-3, 0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8};
    const std::vector<double> es = {1.52e-1, 6.99e-2, 3.98e-2, 1.85e-2, 8.79e-3, 4.66e-3};
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < hs.size(); ++i) pts.emplace_back(hs[i], es[i]);
    CHECK(fit_order(pts).order == doctest::Approx(1.01).epsilon(0.01));
}

TEST_CASE("fit_order: degenerate inputs raise") {
    std::vector<std::pair<double, double>> two = {{0.5, 0.1}, {0.25, 0.05}};
    CHECK_THROWS_AS(fit_order(two), NumericError);
    std::vector<std::pair<double, double>> bad = {{0.5, 0.1}, {0.25, 0.0}, {0.125, 0.01}};
    CHECK_THROWS_AS(fit_order(bad), NumericError);
}

TEST_CASE("convergence CSV: frozen format") {
    ConvergenceReport r;
    r.methods = {"euler"};
    r.h_levels = {0.125};
    r.entries = {{"euler", 0.125, 0.5}};
    r.orders = {{"euler", 0.5, 0.25, 0.01}};
    CHECK(convergence_csv(r) == "method,h,mse_error\n"
                                "euler,1.25000e-01,5.00000e-01\n"
                                "# order,euler,5.00000e-01,1.00000e-02\n");
}

TEST_CASE("convergence CSV: empty report is header-only") {
    ConvergenceReport r;
    CHECK(convergence_csv(r) == "method,h,mse_error\n");
}

TEST_CASE("convergence CSV: Table-1-shaped report has 54 data rows") {
    ConvergenceReport r;
    const std::array<const char*, 9> methods = {"euler", "eulerP",   "milstein",
                                                "milsteinP", "mid",  "t32",
                                                "t32P",  "t2",       "t2P"};
    for (const char* m : methods)
        for (double h : {0x1p-3, 0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8})
            r.entries.push_back({m, h, 1e-2});
    const std::string csv = convergence_csv(r);
    std::size_t rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 1 + 54); // header + data, no fits attached
}

TEST_CASE("JSON round trip: export then import yields an equal report") {
    ConvergenceReport r;
    r.model = "kubo";
    r.params = {{"a", 1.0}, {"sigma", 1.0}};
    r.x0 = {1.0, 0.0};
    r.seed = 42;
    r.paths = 100;
    r.t_end = 1.0;
    r.h_ref = 0x1p-10;
    r.created_at = "2024-01-01T00:00:00Z";
    r.methods = {"euler", "t2"};
    r.h_levels = {0.125, 0.0625, 0.03125};
    r.entries = {{"euler", 0.125, 0.3111}, {"t2", 0.0625, 1.59e-2}};
    r.orders = {{"euler", 0.55, -1.0, 0.01}};
    const ConvergenceReport back = convergence_from_json(to_json(r));
    CHECK(back == r);
}

TEST_CASE("run_convergence: T2 compared at h = h_ref is exactly zero error") {
    StudyConfig cfg;
    cfg.paths = 8;
    cfg.h_ref = 0x1p-6;
    cfg.h_levels = {0x1p-6, 0x1p-5};
    cfg.methods = {parse_method_spec("t2")};
    cfg.workers = 1;
    const ConvergenceReport r = run_convergence(make_kubo(), cfg);
    CHECK(r.entries[0].h == cfg.h_ref);
    CHECK(r.entries[0].error == 0.0);
    CHECK(r.entries[1].error > 0.0);
    CHECK(r.orders.empty()); // no fit over a level set containing a zero error
}

TEST_CASE("run_convergence: bitwise deterministic across worker counts") {
    StudyConfig cfg;
    cfg.paths = 64;
    cfg.h_ref = 0x1p-9;
    cfg.h_levels = {0x1p-3, 0x1p-4, 0x1p-5};
    cfg.methods = {parse_method_spec("eulerP"), parse_method_spec("midP"),
                   parse_method_spec("t32")};
    cfg.workers = 1;
    ConvergenceReport r1 = run_convergence(make_pendulum(), cfg);
    cfg.workers = 4;
    ConvergenceReport r2 = run_convergence(make_pendulum(), cfg);
    CHECK(convergence_csv(r1) == convergence_csv(r2));
    r1.created_at = r2.created_at;
    CHECK(r1 == r2);
}

TEST_CASE("run_convergence: configuration validation") {
    StudyConfig cfg;
    cfg.paths = 4;
    cfg.h_ref = 0x1p-6;
    cfg.methods = {parse_method_spec("euler")};

    cfg.h_levels = {0.1}; // not dyadic over h_ref
    CHECK_THROWS_AS(run_convergence(make_kubo(), cfg), ConfigError);

    cfg.h_levels = {0x1p-4};
    cfg.t_end = 0.7; // not an integer multiple of h_ref
    CHECK_THROWS_AS(run_convergence(make_kubo(), cfg), ConfigError);

    cfg.t_end = 1.0;
    cfg.x0 = StateVec{1.0, 0.0, 0.0}; // wrong dimension
    CHECK_THROWS_AS(run_convergence(make_kubo(), cfg), ConfigError);

    cfg.x0.reset();
    cfg.methods.clear();
    CHECK_THROWS_AS(run_convergence(make_kubo(), cfg), ConfigError);
}

TEST_CASE("run_convergence: reference error is negligible against method error") {
    // Same grid, reference at h_ref vs 2 h_ref: reported errors move by < 2%.
    StudyConfig cfg;
    cfg.paths = 200;
    cfg.h_ref = 0x1p-12;
    cfg.h_levels = {0x1p-3, 0x1p-4, 0x1p-5, 0x1p-6};
    cfg.methods = {parse_method_spec("euler"), parse_method_spec("t2")};
    const ConvergenceReport fine = run_convergence(make_kubo(), cfg);
    cfg.ref_coarsen_factor = 2;
    const ConvergenceReport coarse = run_convergence(make_kubo(), cfg);
    for (std::size_t i = 0; i < fine.entries.size(); ++i) {
        const double rel = std::fabs(fine.entries[i].error - coarse.entries[i].error) /
                           fine.entries[i].error;
        CHECK(rel < 0.02);
    }
}

TEST_CASE("run_convergence: Kubo Euler error at h = 2^-3 matches the published value") {
    StudyConfig cfg;
    cfg.paths = 1000;
    cfg.seed = 42;
    cfg.h_ref = 0x1p-12;
    cfg.h_levels = {0x1p-3, 0x1p-4, 0x1p-5};
    cfg.methods = {parse_method_spec("euler")};
    const ConvergenceReport r = run_convergence(make_kubo(), cfg);
    // published 3.11e-1; +-15% covers the Monte-Carlo variation at this M
    CHECK(r.entries[0].error >= 3.11e-1 * 0.85);
    CHECK(r.entries[0].error <= 3.11e-1 * 1.15);
}

TEST_CASE("run_convergence: Lotka-Volterra T2 stays below the published error row") {
    // The four-term pseudo-time truncation keeps whole expansion levels, so its
    // error constant is tighter than the published T2 row (~4x on this model);
    // the published value is asserted as an upper bound, the order as a window.
    StudyConfig cfg;
    cfg.paths = 400;
    cfg.seed = 42;
    cfg.h_ref = 0x1p-13;
    cfg.h_levels = {0x1p-8, 0x1p-9, 0x1p-10};
    cfg.methods = {parse_method_spec("t2")};
    const ConvergenceReport r = run_convergence(make_lotka_volterra(), cfg);
    const double e10 = r.entries[2].error;
    CAPTURE(e10);
    CHECK(r.entries[2].h == 0x1p-10);
    CHECK(e10 <= 3.46e-6 * 1.2);
    CHECK(e10 > 0.0);
    CHECK(r.orders[0].order >= 1.85);
    CHECK(r.orders[0].order <= 2.15);
}

TEST_CASE("run_drift: projected Euler conserves, plain Euler drifts (Kubo)") {
    const SdeModel kubo = make_kubo();
    StudyConfig opts;

    const DriftReport good = run_drift(kubo, parse_method_spec("eulerP"), 0.02, 50.0, 42, opts);
    CHECK(good.max_inv_err[0] <= 1e-12);
    CHECK(good.rows.size() == 2501);
    CHECK(good.rows.front().step == 0);
    CHECK(good.rows.front().combined == 0.0);

    const DriftReport bad = run_drift(kubo, parse_method_spec("euler"), 0.02, 200.0, 42, opts);
    CHECK(bad.max_inv_err[0] > 1e-2);
}

TEST_CASE("run_drift: CSV header carries state and invariant columns") {
    const DriftReport r = run_drift(make_lotka_volterra(), parse_method_spec("midP"), 0.01, 1.0,
                                    7, StudyConfig{});
    std::ostringstream os;
    write_drift_csv(r, os);
    const std::string csv = os.str();
    CHECK(csv.rfind("step,t,x_1,x_2,x_3,inv_err_1,inv_err_2,combined_err\n", 0) == 0);
}

TEST_CASE("run_drift: deterministic in the seed") {
    const SdeModel pend = make_pendulum();
    const DriftReport a = run_drift(pend, parse_method_spec("t2P"), 0.01, 2.0, 9, StudyConfig{});
    const DriftReport b = run_drift(pend, parse_method_spec("t2P"), 0.01, 2.0, 9, StudyConfig{});
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        CHECK(a.rows[i].state == b.rows[i].state);
}

TEST_CASE("export_report: csv and json files round-trip through the filesystem") {
    StudyConfig cfg;
    cfg.paths = 4;
    cfg.h_ref = 0x1p-6;
    cfg.h_levels = {0x1p-3, 0x1p-4, 0x1p-5};
    cfg.methods = {parse_method_spec("euler")};
    const ConvergenceReport r = run_convergence(make_kubo(), cfg);

    const std::string csv_path = "test_export.csv";
    export_report(r, "csv", csv_path);
    std::ifstream in(csv_path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == convergence_csv(r));

    const std::string json_path = "test_export.json";
    export_report(r, "json", json_path);
    std::ifstream jin(json_path);
    nlohmann::json j;
    jin >> j;
    CHECK(convergence_from_json(j) == r);

    CHECK_THROWS_AS(export_report(r, "xml", "nope.xml"), ConfigError);
    CHECK(!std::ifstream("nope.xml").good()); // rejected before the file is created
    std::remove(csv_path.c_str());
    std::remove(json_path.c_str());
}
