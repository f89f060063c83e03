#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace codl {

using Vec = std::vector<double>;

// Dense row-major matrix. Small enough that plain loops beat any dependency.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;  // rows * cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }

    bool same_shape(const Matrix& o) const {
        return rows == o.rows && cols == o.cols;
    }
};

// y = M x
inline Vec matvec(const Matrix& m, const Vec& x) {
    if (x.size() != m.cols)
        throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* w = m.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) acc += w[c] * x[c];
        y[r] = acc;
    }
    return y;
}

// y = M^T x
inline Vec matvec_transposed(const Matrix& m, const Vec& x) {
    if (x.size() != m.rows)
        throw std::invalid_argument("matvec_transposed: dimension mismatch");
    Vec y(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* w = m.row(r);
        for (std::size_t c = 0; c < m.cols; ++c) y[c] += w[c] * x[r];
    }
    return y;
}

inline double squared_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("squared_distance: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

inline double norm(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

// In-place L2 normalization; zero vectors are left untouched.
inline void normalize_l2(Vec& v) {
    double n = norm(v);
    if (n > 0.0)
        for (double& x : v) x /= n;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace codl
