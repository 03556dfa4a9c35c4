#pragma once

#include <cmath>
#include <sstream>

#include "projsde/core/errors.hpp"
#include "projsde/core/state.hpp"

namespace projsde {

/**
 * @brief Solve A x = b by Gaussian elimination with partial pivoting.
 *
 * Systems here are tiny (n <= kMaxDim): Newton corrections for projections
 * and implicit steps. A pivot below 1e-14 * max|A| is treated as singular.
 */
inline StateVec solve_dense(Mat a, StateVec b) {
    const std::size_t n = a.n();
    if (b.dim() != n) throw ConfigError("solve_dense: dimension mismatch");

    const double pivot_floor = 1e-14 * max_abs(a);

    std::array<std::size_t, kMaxDim> perm{};
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::fabs(a(perm[k], k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double cand = std::fabs(a(perm[i], k));
            if (cand > best) {
                best = cand;
                p = i;
            }
        }
        if (!(best > pivot_floor)) {
            std::ostringstream msg;
            msg << "solve_dense: singular matrix (pivot " << best << " at column " << k << ")";
            throw SingularMatrixError(msg.str());
        }
        std::swap(perm[k], perm[p]);

        const std::size_t rk = perm[k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const std::size_t ri = perm[i];
            const double f = a(ri, k) / a(rk, k);
            a(ri, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) a(ri, j) -= f * a(rk, j);
            b[ri] -= f * b[rk];
        }
    }

    StateVec x(n);
    for (std::size_t ik = n; ik-- > 0;) {
        const std::size_t rk = perm[ik];
        double s = b[rk];
        for (std::size_t j = ik + 1; j < n; ++j) s -= a(rk, j) * x[j];
        x[ik] = s / a(rk, ik);
    }
    return x;
}

} // namespace projsde
