#include <doctest.h>

#include "oracles.hpp"
#include "projsde/projsde.hpp"

using namespace projsde;

TEST_CASE("solve_dense: identity and diagonal systems") {
    Mat eye = Mat::identity(3);
    StateVec b{1.5, -2.0, 7.0};
    CHECK(solve_dense(eye, b) == b);

    Mat d(2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    const StateVec x = solve_dense(d, StateVec{2.0, 8.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("solve_dense: random well-conditioned systems have small residuals") {
    RngStream rng(101, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3;
        Mat a(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform() - 0.5;
            a(i, i) += 3.0; // diagonally dominant
        }
        StateVec b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = 2.0 * rng.uniform() - 1.0;
        const StateVec x = solve_dense(a, b);
        const StateVec r = a * x - b;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(b[i]));
        CHECK(norm(r) <= 1e-12 * (max_abs(a) * norm(x) + scale));
    }
}

TEST_CASE("solve_dense: singular matrix raises") {
    Mat a(2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 4.0;
    CHECK_THROWS_AS(solve_dense(a, StateVec{1.0, 1.0}), SingularMatrixError);
}

TEST_CASE("finite_diff_gradient matches hand results") {
    Invariant half_norm2;
    half_norm2.value = [](const StateVec& x) { return 0.5 * dot(x, x); };
    const StateVec g1 = finite_diff_gradient(half_norm2, StateVec{3.0, 4.0}, 1e-5);
    CHECK(g1[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(g1[1] == doctest::Approx(4.0).epsilon(1e-6));

    const SdeModel pend = make_pendulum();
    const StateVec g2 = finite_diff_gradient(pend.invariants[0], StateVec{0.1, 1.0}, 1e-5);
    CHECK(g2[0] == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(g2[1] == doctest::Approx(std::sin(1.0)).epsilon(1e-6));

    Invariant xyz;
    xyz.value = [](const StateVec& x) { return x[0] * x[1] * x[2]; };
    const StateVec g3 = finite_diff_gradient(xyz, StateVec{1.0, 2.0, 1.0}, 1e-5);
    CHECK(g3[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(g3[1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g3[2] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("check_conserved: bundled models are orthogonal to machine level") {
    CHECK(check_conserved(make_kubo(), 100, 1).max_residual() <= 1e-14);

    const auto lv = check_conserved(make_lotka_volterra(), 100, 2);
    REQUIRE(lv.rows.size() == 2);
    CHECK(lv.rows[0].max_residual() <= 1e-13);
    CHECK(lv.rows[1].max_residual() <= 1e-13);
}

TEST_CASE("check_conserved: 1000-state orthogonality property per model") {
    for (const auto& model : {make_kubo(), make_pendulum(), make_lotka_volterra()}) {
        CAPTURE(model.name);
        CHECK(check_conserved(model, 1000, 3).max_residual() <= 1e-12);
    }
}

TEST_CASE("check_conserved: drift perturbed along grad I is detected") {
    const double eps = 1e-6;
    SdeModel bad = make_kubo();
    const auto base_drift = bad.drift;
    const auto grad = bad.invariants[0].gradient;
    bad.drift = [base_drift, grad, eps](const StateVec& x) {
        StateVec f = base_drift(x);
        f.axpy(eps, grad(x));
        return f;
    };
    const double res = check_conserved(bad, 100, 4).max_residual();
    // residual ~ eps |grad I| / |f| = eps for Kubo (|grad I| = |f| on circles)
    CHECK(res >= 0.3 * eps);
    CHECK(res <= 3.0 * eps);
}

TEST_CASE("default_skew_gradient: Kubo constant matrices") {
    const SdeModel kubo = make_kubo();
    const auto [s, t] = default_skew_gradient(kubo, StateVec{0.6, -0.8});
    CHECK(s(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s(0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s(1, 1) == doctest::Approx(0.0).epsilon(1e-14));
    REQUIRE(t.size() == 1);
    CHECK(t[0](0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(t[0](1, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("default_skew_gradient: zero drift gives zero S") {
    SdeModel still = make_kubo();
    still.drift = [](const StateVec& x) { return StateVec(x.dim()); };
    const auto [s, t] = default_skew_gradient(still, StateVec{1.0, 1.0});
    CHECK(max_abs(s) == 0.0);
}

TEST_CASE("default_skew_gradient: pendulum reconstruction at (0.1, 1)") {
    const SdeModel pend = make_pendulum();
    const StateVec x{0.1, 1.0};
    const auto [s, t] = default_skew_gradient(pend, x);
    const StateVec rec = s * pend.invariants[0].gradient(x);
    CHECK(norm(rec - pend.drift(x)) <= 1e-14);
}

TEST_CASE("default_skew_gradient: degenerate gradient raises") {
    CHECK_THROWS_AS(default_skew_gradient(make_kubo(), StateVec{0.0, 0.0}),
                    DegenerateGradientError);
}

TEST_CASE("default_skew_gradient: 1000-state skew-symmetry and reconstruction") {
    for (const auto& model : {make_kubo(), make_pendulum(), make_lotka_volterra()}) {
        CAPTURE(model.name);
        RngStream rng(5, 0);
        for (int i = 0; i < 1000; ++i) {
            const StateVec x = sample_state(model, rng);
            const auto [s, t] = default_skew_gradient(model, x);
            const StateVec grad = model.invariants[0].gradient(x);
            CHECK(skew_defect(s) <= 1e-14 * std::max(1.0, frobenius_norm(s)));
            CHECK(norm(s * grad - model.drift(x)) <= 1e-12);
            for (std::size_t r = 0; r < model.noise_count; ++r) {
                CHECK(skew_defect(t[r]) <= 1e-14 * std::max(1.0, frobenius_norm(t[r])));
                CHECK(norm(t[r] * grad - model.diffusions[r](x)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("analytic gradients and Hessians agree with finite differences") {
    for (const auto& model : {make_kubo(), make_pendulum(), make_lotka_volterra()}) {
        CAPTURE(model.name);
        RngStream rng(6, 0);
        for (int i = 0; i < 200; ++i) {
            const StateVec x = sample_state(model, rng);
            for (const auto& inv : model.invariants) {
                const StateVec ag = inv.gradient(x);
                const StateVec fg = finite_diff_gradient(inv, x, 1e-6);
                CHECK(norm(ag - fg) <= 1e-5 * std::max(1.0, norm(ag)));

                REQUIRE(inv.has_hessian());
                const Mat ah = inv.hessian(x);
                const Mat fh = finite_diff_hessian(inv, x, 1e-6);
                double diff = 0.0, scale = 1.0;
                for (std::size_t a = 0; a < x.dim(); ++a)
                    for (std::size_t b = 0; b < x.dim(); ++b) {
                        diff = std::max(diff, std::fabs(ah(a, b) - fh(a, b)));
                        scale = std::max(scale, std::fabs(ah(a, b)));
                    }
                CHECK(diff <= 1e-5 * scale);
            }
        }
    }
}

TEST_CASE("bundled Hessians are symmetric at sampled states") {
    for (const auto& model : {make_kubo(), make_pendulum(), make_lotka_volterra()}) {
        RngStream rng(8, 0);
        for (int i = 0; i < 100; ++i) {
            const StateVec x = sample_state(model, rng);
            for (const auto& inv : model.invariants) {
                const Mat h = inv.hessian(x);
                for (std::size_t a = 0; a < x.dim(); ++a)
                    for (std::size_t b = 0; b < x.dim(); ++b) CHECK(h(a, b) == h(b, a));
            }
        }
    }
}

TEST_CASE("model invariant gradients are first-order consistent with values") {
    // |I(x+eps v) - I(x) - eps grad I . v| = O(eps^2) along random unit directions
    for (const auto& model : {make_kubo(), make_pendulum(), make_lotka_volterra()}) {
        RngStream rng(9, 0);
        for (int i = 0; i < 50; ++i) {
            const StateVec x = sample_state(model, rng);
            StateVec v(x.dim());
            for (std::size_t k = 0; k < x.dim(); ++k) v[k] = rng.normal();
            v *= 1.0 / norm(v);
            for (const auto& inv : model.invariants) {
                const double d1 = std::fabs(inv.value(x + 1e-4 * v) - inv.value(x) -
                                            1e-4 * dot(inv.gradient(x), v));
                CHECK(d1 <= 1e-7); // eps^2 = 1e-8 times a curvature constant
            }
        }
    }
}
