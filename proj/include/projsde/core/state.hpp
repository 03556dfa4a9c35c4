#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace projsde {

/// Systems in this library are small (the bundled models have d <= 3);
/// states and dense matrices use fixed inline storage up to this dimension.
inline constexpr std::size_t kMaxDim = 8;

/**
 * @brief Fixed-capacity state vector of a d-dimensional SDE.
 *
 * Value type with inline storage; no heap traffic in the integration loops.
 */
class StateVec {
public:
    StateVec() = default;

    explicit StateVec(std::size_t dim) : dim_(dim) {
        assert(dim <= kMaxDim);
        v_.fill(0.0);
    }

    StateVec(std::initializer_list<double> values) : dim_(values.size()) {
        assert(values.size() <= kMaxDim);
        std::size_t i = 0;
        for (double x : values) v_[i++] = x;
    }

    static StateVec zeros(std::size_t dim) { return StateVec(dim); }

    std::size_t dim() const { return dim_; }

    double& operator[](std::size_t i) {
        assert(i < dim_);
        return v_[i];
    }
    double operator[](std::size_t i) const {
        assert(i < dim_);
        return v_[i];
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    const double* begin() const { return v_.data(); }
    const double* end() const { return v_.data() + dim_; }
    double* begin() { return v_.data(); }
    double* end() { return v_.data() + dim_; }

    StateVec& operator+=(const StateVec& o) {
        assert(o.dim_ == dim_);
        for (std::size_t i = 0; i < dim_; ++i) v_[i] += o.v_[i];
        return *this;
    }
    StateVec& operator-=(const StateVec& o) {
        assert(o.dim_ == dim_);
        for (std::size_t i = 0; i < dim_; ++i) v_[i] -= o.v_[i];
        return *this;
    }
    StateVec& operator*=(double s) {
        for (std::size_t i = 0; i < dim_; ++i) v_[i] *= s;
        return *this;
    }

    /// this += s * o, the workhorse of every scheme.
    StateVec& axpy(double s, const StateVec& o) {
        assert(o.dim_ == dim_);
        for (std::size_t i = 0; i < dim_; ++i) v_[i] += s * o.v_[i];
        return *this;
    }

    bool all_finite() const {
        for (std::size_t i = 0; i < dim_; ++i)
            if (!std::isfinite(v_[i])) return false;
        return true;
    }

    bool operator==(const StateVec& o) const {
        if (o.dim_ != dim_) return false;
        for (std::size_t i = 0; i < dim_; ++i)
            if (v_[i] != o.v_[i]) return false;
        return true;
    }

private:
    std::array<double, kMaxDim> v_{};
    std::size_t dim_ = 0;
};

inline StateVec operator+(StateVec a, const StateVec& b) { return a += b; }
inline StateVec operator-(StateVec a, const StateVec& b) { return a -= b; }
inline StateVec operator*(double s, StateVec a) { return a *= s; }
inline StateVec operator*(StateVec a, double s) { return a *= s; }

inline double dot(const StateVec& a, const StateVec& b) {
    assert(a.dim() == b.dim());
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const StateVec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const StateVec& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

/**
 * @brief Dense square matrix with inline storage, n <= kMaxDim.
 */
class Mat {
public:
    Mat() = default;
    explicit Mat(std::size_t n) : n_(n) {
        assert(n <= kMaxDim);
        a_.fill(0.0);
    }

    static Mat zeros(std::size_t n) { return Mat(n); }
    static Mat identity(std::size_t n) {
        Mat m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t n() const { return n_; }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < n_ && j < n_);
        return a_[i * kMaxDim + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < n_ && j < n_);
        return a_[i * kMaxDim + j];
    }

    Mat& operator+=(const Mat& o) {
        assert(o.n_ == n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
        return *this;
    }
    Mat& operator*=(double s) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) *= s;
        return *this;
    }

    Mat transpose() const {
        Mat t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    std::array<double, kMaxDim * kMaxDim> a_{};
    std::size_t n_ = 0;
};

inline Mat operator+(Mat a, const Mat& b) { return a += b; }
inline Mat operator*(double s, Mat a) { return a *= s; }

inline StateVec operator*(const Mat& m, const StateVec& v) {
    assert(m.n() == v.dim());
    StateVec r(v.dim());
    for (std::size_t i = 0; i < m.n(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.n(); ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

/// a b^T - b a^T (antisymmetrized outer product).
inline Mat skew_outer(const StateVec& a, const StateVec& b) {
    assert(a.dim() == b.dim());
    Mat m(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m(i, j) = a[i] * b[j] - b[i] * a[j];
    return m;
}

inline double max_abs(const Mat& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j = 0; j < m.n(); ++j) r = std::max(r, std::fabs(m(i, j)));
    return r;
}

/// Frobenius norm of M + M^T, zero iff M is exactly skew-symmetric.
inline double skew_defect(const Mat& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j = 0; j < m.n(); ++j) {
            const double d = m(i, j) + m(j, i);
            s += d * d;
        }
    return std::sqrt(s);
}

inline double frobenius_norm(const Mat& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j = 0; j < m.n(); ++j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

} // namespace projsde
