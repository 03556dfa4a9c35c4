#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "projsde/core/errors.hpp"
#include "projsde/noise/rng.hpp"

namespace projsde {

/**
 * @brief Per-path dyadic grid of Wiener increments at the finest step size.
 *
 * Stores raw (untruncated) N(0, h_fine) increments, channel-major. Every
 * method and step size consumes coarsenings of the same grid, so all of them
 * see the same underlying Brownian path as the reference solution.
 */
struct BrownianGrid {
    double h_fine = 0.0;
    std::size_t n_fine = 0;
    std::size_t channels = 0;
    std::vector<double> increments; // [channel * n_fine + i]

    std::span<const double> channel(std::size_t r) const {
        return {increments.data() + r * n_fine, n_fine};
    }
    double increment(std::size_t r, std::size_t i) const {
        return increments[r * n_fine + i];
    }
};

/// Deterministic function of the stream: same (seed, path_index, m, h_fine,
/// n_fine) always yields a bitwise identical grid.
inline BrownianGrid sample_grid(RngStream& stream, std::size_t m, double h_fine,
                                std::size_t n_fine) {
    if (!(h_fine > 0.0)) throw ConfigError("sample_grid: h_fine must be positive");
    if (n_fine < 1) throw ConfigError("sample_grid: n_fine must be >= 1");
    BrownianGrid grid;
    grid.h_fine = h_fine;
    grid.n_fine = n_fine;
    grid.channels = m;
    grid.increments.resize(m * n_fine);
    const double sd = std::sqrt(h_fine);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t i = 0; i < n_fine; ++i) grid.increments[r * n_fine + i] = sd * stream.normal();
    return grid;
}

namespace detail {

/// Balanced dyadic block sum. Grouping sums as (left half) + (right half)
/// makes coarsen(coarsen(g, a), b) bitwise equal to coarsen(g, a*b) for
/// power-of-two factors: both expand to the same expression tree.
inline double dyadic_block_sum(const double* v, std::size_t n) {
    if (n == 1) return v[0];
    const std::size_t half = n / 2;
    return dyadic_block_sum(v, half) + dyadic_block_sum(v + half, half);
}

inline bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

} // namespace detail

/// Coarsen one channel by a power-of-two factor; element i is the sum of the
/// factor consecutive fine increments starting at i*factor.
inline std::vector<double> coarsen(const BrownianGrid& grid, std::size_t channel,
                                   std::size_t factor) {
    if (channel >= grid.channels) throw ConfigError("coarsen: channel out of range");
    if (!detail::is_power_of_two(factor))
        throw ConfigError("coarsen: factor must be a power of two");
    if (grid.n_fine % factor != 0)
        throw ConfigError("coarsen: factor does not divide the fine grid");
    const std::size_t n = grid.n_fine / factor;
    std::vector<double> out(n);
    const double* base = grid.increments.data() + channel * grid.n_fine;
    for (std::size_t i = 0; i < n; ++i) out[i] = detail::dyadic_block_sum(base + i * factor, factor);
    return out;
}

} // namespace projsde
