// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "strgcl/linalg/matrix.hpp"

namespace strgcl {

enum class UnaryKind { relu, sigmoid, exp, log, log1p, scale, shift, square };

struct UnaryFn {
    UnaryKind kind;
    double c = 1.0; // factor for scale, offset for shift

    static UnaryFn relu() { return {UnaryKind::relu}; }
    static UnaryFn sigmoid() { return {UnaryKind::sigmoid}; }
    static UnaryFn exp() { return {UnaryKind::exp}; }
    static UnaryFn log() { return {UnaryKind::log}; }
    static UnaryFn log1p() { return {UnaryKind::log1p}; }
    static UnaryFn scale(double c) { return {UnaryKind::scale, c}; }
    static UnaryFn shift(double c) { return {UnaryKind::shift, c}; }
    static UnaryFn square() { return {UnaryKind::square}; }
};

inline double sigmoid(double x) noexcept {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace detail {
inline void check_domain(const DenseMatrix& m, UnaryFn fn) {
    if (fn.kind == UnaryKind::log1p) {
        for (double v : m.values())
            require(v > -1.0, ErrorKind::numeric_domain, "log1p argument must be > -1, got " + std::to_string(v));
    } else if (fn.kind == UnaryKind::log) {
        for (double v : m.values())
            require(v > 0.0, ErrorKind::numeric_domain, "log argument must be > 0, got " + std::to_string(v));
    }
}

inline double apply(UnaryFn fn, double x) noexcept {
    switch (fn.kind) {
    case UnaryKind::relu: return x > 0.0 ? x : 0.0;
    case UnaryKind::sigmoid: return sigmoid(x);
    case UnaryKind::exp: return std::exp(x);
    case UnaryKind::log: return std::log(x);
    case UnaryKind::log1p: return std::log1p(x);
    case UnaryKind::scale: return fn.c * x;
    case UnaryKind::shift: return x + fn.c;
    case UnaryKind::square: return x * x;
    }
    return x;
}
} // namespace detail

inline DenseMatrix elementwise(const DenseMatrix& m, UnaryFn fn) {
    detail::check_domain(m, fn);
    DenseMatrix out(m.rows(), m.cols());
    if (fn.kind == UnaryKind::exp || fn.kind == UnaryKind::log) {
        using Arr = Eigen::Array<double, Eigen::Dynamic, 1>;
        Eigen::Map<const Arr> src(m.data(), static_cast<Eigen::Index>(m.size()));
        Eigen::Map<Arr> dst(out.data(), static_cast<Eigen::Index>(out.size()));
        if (fn.kind == UnaryKind::exp) dst = src.exp();
        else dst = src.log();
    } else {
        for (std::size_t i = 0; i < m.size(); ++i) out.data()[i] = detail::apply(fn, m.data()[i]);
    }
    require(out.all_finite(), ErrorKind::numeric, "elementwise produced a non-finite value");
    return out;
}

/// Rows scaled to unit L2 norm; all-zero rows stay zero.
inline DenseMatrix row_normalize(const DenseMatrix& m) {
    DenseMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double v : m.row(i)) s += v * v;
        if (s == 0.0) continue;
        const double inv = 1.0 / std::sqrt(s);
        auto src = m.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j] * inv;
    }
    return out;
}

/// Pairwise row cosine similarities. A zero-norm row has similarity 0 with
/// every row, itself included.
inline DenseMatrix cosine_similarity_matrix(const DenseMatrix& m) {
    const DenseMatrix z = row_normalize(m);
    return gemm(z, Trans::no, z, Trans::yes);
}

inline DenseMatrix column_mean(const DenseMatrix& m) {
    DenseMatrix mu(1, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) mu(0, j) += m(i, j);
    if (m.rows() > 0)
        for (auto& v : mu.values()) v /= static_cast<double>(m.rows());
    return mu;
}

inline DenseMatrix center_columns(const DenseMatrix& m) {
    const DenseMatrix mu = column_mean(m);
    DenseMatrix c(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = m(i, j) - mu(0, j);
    return c;
}

/// Unbiased sample covariance of the columns, (M-mu)^T (M-mu) / (N-1).
inline DenseMatrix covariance(const DenseMatrix& m) {
    require(m.rows() >= 2, ErrorKind::insufficient_samples,
            "covariance needs at least 2 rows, got " + std::to_string(m.rows()));
    const DenseMatrix c = center_columns(m);
    DenseMatrix cov = gemm(c, Trans::yes, c, Trans::no, 1.0 / static_cast<double>(m.rows() - 1));
    // The product is symmetric in exact arithmetic; mirror to make it so bitwise.
    for (std::size_t i = 0; i < cov.rows(); ++i)
        for (std::size_t j = i + 1; j < cov.cols(); ++j) cov(j, i) = cov(i, j);
    return cov;
}

} // namespace strgcl
