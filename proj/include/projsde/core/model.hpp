#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "projsde/core/state.hpp"

namespace projsde {

/**
 * @brief Scalar conserved quantity with its analytic gradient.
 *
 * The hessian is optional for user models; the bundled models provide it so
 * the derivative data can be cross-checked against finite differences.
 */
struct Invariant {
    std::function<double(const StateVec&)> value;
    std::function<StateVec(const StateVec&)> gradient;
    std::function<Mat(const StateVec&)> hessian; // may be empty
    std::string label;

    bool has_hessian() const { return static_cast<bool>(hessian); }
};

/**
 * @brief Data for SDEs of the form dX = f(X)(dt + sum_r c_r o dW_r).
 *
 * For this class the solution is the deterministic flow of f evaluated at
 * the randomized time t + sum_r c_r W_r(t); the strong Taylor schemes only
 * need the flow's Taylor coefficients v_k = (1/k!) d^k phi / ds^k, phi' = f.
 */
struct SpecialClassData {
    std::vector<double> c; // per-channel noise intensity

    /// Writes v_1..v_order into out[0..order-1]; order <= 4.
    std::function<void(const StateVec&, int order, StateVec* out)> ode_taylor_coeffs;
};

/// Skew-symmetric matrices with S grad I = f and T_r grad I = g_r
/// (for the first declared invariant).
struct SkewGradientForm {
    std::function<Mat(const StateVec&)> S;
    std::vector<std::function<Mat(const StateVec&)>> T;
};

/// Per-coordinate box used by the property tests to sample states;
/// states where some |grad I^i| < min_gradient_norm are rejected.
struct SamplingBox {
    std::vector<std::pair<double, double>> bounds;
    double min_gradient_norm = 0.1;
};

/**
 * @brief A d-dimensional autonomous Stratonovich SDE with declared invariants.
 *
 * All evaluators must be pure; instances are immutable after construction and
 * safe to share across worker threads.
 */
struct SdeModel {
    std::string name;
    std::size_t dim = 0;
    std::size_t noise_count = 0;

    std::function<StateVec(const StateVec&)> drift;
    std::vector<std::function<StateVec(const StateVec&)>> diffusions;

    /// Jacobians of the diffusion fields; empty vector means unavailable.
    std::vector<std::function<Mat(const StateVec&)>> diffusion_jacobians;

    std::vector<Invariant> invariants; // at least one

    std::optional<SpecialClassData> special_class;
    std::optional<SkewGradientForm> sg_form;

    /// Lambda_i g_r == Lambda_r g_i holds for the model (asserted metadata,
    /// required by the Milstein scheme).
    bool commutative_noise = false;

    SamplingBox sampling_box;
    StateVec default_x0;

    bool has_diffusion_jacobians() const { return !diffusion_jacobians.empty(); }
    std::size_t invariant_count() const { return invariants.size(); }
};

} // namespace projsde
