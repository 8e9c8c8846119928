// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "strgcl/linalg/functions.hpp"
#include "strgcl/random.hpp"

namespace strgcl {

struct PcaModel {
    DenseMatrix mean;       // 1 x F
    DenseMatrix components; // k x F, rows orthonormal
    std::vector<double> eigenvalues;
    std::size_t k = 0;
    std::size_t iterations = 0;
};

struct PcaOptions {
    std::size_t max_iterations = 1000;
    double tolerance = 1e-9; // on Ritz values, relative to the leading eigenvalue
    std::size_t oversample = 0; // extra block vectors; 0 means max(8, k)
    std::uint64_t seed = 0x5eed;
};

namespace detail {

/// Replaces the columns of `v` (F x p, p <= F) by an orthonormal basis of a
/// space containing them. Householder QR keeps this well defined when the
/// block is rank deficient (e.g. zero covariance).
inline void orthonormalize_columns(DenseMatrix& v) {
    using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
    const auto f = static_cast<Eigen::Index>(v.rows());
    const auto p = static_cast<Eigen::Index>(v.cols());
    EMat a = detail::view(v);
    Eigen::HouseholderQR<EMat> qr(a);
    EMat q = qr.householderQ() * EMat::Identity(f, p);
    detail::view(v) = q;
}

} // namespace detail

/// Top-k principal axes of mean-centred `x` by subspace (block power)
/// iteration on the sample covariance with Rayleigh-Ritz extraction. Each
/// block vector is orthogonalized against its predecessors every sweep, which
/// deflates the directions already found.
inline PcaModel pca_fit(const DenseMatrix& x, std::size_t k, const PcaOptions& opt = {}) {
    const std::size_t n = x.rows(), f = x.cols();
    require(n >= 2, ErrorKind::config, "PCA needs at least 2 samples");
    require(k >= 1 && k <= std::min(n, f), ErrorKind::config,
            "PCA dimension " + std::to_string(k) + " outside [1, min(N,F)=" + std::to_string(std::min(n, f)) + "]");

    const DenseMatrix cov = covariance(x);
    const std::size_t p = std::min(f, k + (opt.oversample ? opt.oversample : std::max<std::size_t>(8, k)));

    Rng rng(opt.seed);
    DenseMatrix v(f, p);
    for (auto& e : v.values()) e = rng.uniform(-1.0, 1.0);
    detail::orthonormalize_columns(v);

    using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    std::vector<double> prev(k, 0.0);
    std::vector<double> ritz(p, 0.0);
    DenseMatrix rotation(p, p);
    bool converged = false;
    std::size_t it = 0;
    for (it = 1; it <= opt.max_iterations; ++it) {
        DenseMatrix z = matmul(cov, v);                   // F x p
        DenseMatrix t = gemm(v, Trans::yes, z, Trans::no); // p x p
        EMat te = detail::view(t);
        te = 0.5 * (te + te.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<EMat> es(te);
        require(es.info() == Eigen::Success, ErrorKind::numeric, "Ritz eigenproblem failed");
        for (std::size_t c = 0; c < p; ++c) {
            const auto src = static_cast<Eigen::Index>(p - 1 - c); // descending order
            ritz[c] = es.eigenvalues()(src);
            for (std::size_t r = 0; r < p; ++r) rotation(r, c) = es.eigenvectors()(static_cast<Eigen::Index>(r), src);
        }
        const double scale = std::max(std::abs(ritz[0]), 1e-300);
        double change = 0.0;
        for (std::size_t c = 0; c < k; ++c) change = std::max(change, std::abs(ritz[c] - prev[c]));
        std::copy(ritz.begin(), ritz.begin() + static_cast<std::ptrdiff_t>(k), prev.begin());
        if (it > 1 && change <= opt.tolerance * scale) {
            v = matmul(v, rotation); // Ritz vectors of the current subspace
            converged = true;
            break;
        }
        v = matmul(z, rotation);
        detail::orthonormalize_columns(v);
    }
    require(converged, ErrorKind::numeric,
            "PCA eigen-solver did not converge within " + std::to_string(opt.max_iterations) + " iterations");

    PcaModel model;
    model.k = k;
    model.iterations = it;
    model.mean = column_mean(x);
    model.components = DenseMatrix(k, f);
    model.eigenvalues.assign(ritz.begin(), ritz.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t c = 0; c < k; ++c) {
        double sign = 1.0;
        for (std::size_t i = 0; i < f; ++i) {
            if (std::abs(v(i, c)) > 1e-12) {
                sign = v(i, c) > 0 ? 1.0 : -1.0;
                break;
            }
        }
        for (std::size_t i = 0; i < f; ++i) model.components(c, i) = sign * v(i, c);
    }
    return model;
}

/// (x - mean) · componentsᵀ
inline DenseMatrix pca_transform(const PcaModel& model, const DenseMatrix& x) {
    require(x.cols() == model.mean.cols(), ErrorKind::shape, "PCA transform: feature width mismatch");
    DenseMatrix c = x;
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) -= model.mean(0, j);
    return gemm(c, Trans::no, model.components, Trans::yes);
}

} // namespace strgcl
