#pragma once

#include <cstddef>
#include <span>

namespace projsde {

/// Pairwise (balanced-tree) summation. The grouping is a pure function of the
/// length, so serial and parallel runs reduce path results identically.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

} // namespace projsde
