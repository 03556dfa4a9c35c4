#pragma once

#include <cmath>
#include <cstdint>

#include "projsde/core/errors.hpp"
#include "projsde/noise/rng.hpp"

namespace projsde {

/**
 * @brief Gaussian increment truncation: xi is clamped to +-A_h standard
 * deviations with A_h = sqrt(2 k |ln h|).
 *
 * Implicit schemes need bounded increments; k controls how conservative the
 * clamp is (E(xi - zeta)^2 <= h^k, so large k makes clamping astronomically
 * rare while keeping the bound).
 */
struct TruncationConfig {
    int k = 6;
    bool enabled = true;
};

inline double truncation_bound(double h, int k) {
    return std::sqrt(2.0 * k * std::fabs(std::log(h)));
}

/// Clamp an N(0,h) increment dW to +- sqrt(h) A_h. Pass-through when disabled
/// or when the normalized increment is within the bound (exact, no rounding).
inline double truncate_increment(double dW, double h, const TruncationConfig& cfg) {
    if (!cfg.enabled) return dW;
    if (cfg.k < 1) throw ConfigError("truncate_increment: k must be >= 1");
    if (!(h > 0.0) || h >= 1.0)
        throw ConfigError("truncate_increment: truncation requires 0 < h < 1");
    const double a = truncation_bound(h, cfg.k);
    const double sqrt_h = std::sqrt(h);
    const double xi = dW / sqrt_h;
    if (xi > a) return sqrt_h * a;
    if (xi < -a) return -sqrt_h * a;
    return dW;
}

/**
 * @brief Monte-Carlo estimate of E(xi - zeta_h)^2 for standard normal xi and
 * its truncation zeta_h at level h. The analytic bound is h^k.
 */
inline double truncation_moment_check(double h, int k, std::int64_t samples, RngStream& stream) {
    if (samples < 1) throw ConfigError("truncation_moment_check: samples must be >= 1");
    const double a = truncation_bound(h, k);
    double sum = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const double xi = stream.normal();
        double excess = 0.0;
        if (xi > a)
            excess = xi - a;
        else if (xi < -a)
            excess = xi + a;
        sum += excess * excess;
    }
    return sum / static_cast<double>(samples);
}

} // namespace projsde
