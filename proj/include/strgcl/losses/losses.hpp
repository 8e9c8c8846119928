// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>

#include "strgcl/autodiff/tape.hpp"

namespace strgcl {

struct LossBreakdown {
    std::size_t epoch = 0;
    double infonce = 0.0;
    double rule = 0.0;
    double cross = 0.0; // already averaged over the two views
    double total = 0.0;
};

inline double total_loss(const LossBreakdown& parts, double alpha_rule, double alpha_cross) {
    require(alpha_rule >= 0.0 && alpha_cross >= 0.0, ErrorKind::config, "loss weights must be non-negative");
    return parts.infonce + alpha_rule * parts.rule + alpha_cross * parts.cross;
}

namespace ad {

namespace detail {
inline void check_temperature(double t, const char* name) {
    require(t > 0.0, ErrorKind::config, std::string(name) + " must be positive, got " + std::to_string(t));
}
} // namespace detail

/// Symmetric contrastive loss in minimization form. For view 1, node i:
///   l_i = -log( e^{θ(u_i,v_i)/τ} / (Σ_k e^{θ(u_i,v_k)/τ} + Σ_{k≠i} e^{θ(u_i,u_k)/τ}) )
/// and symmetrically for view 2; the loss is the mean over both.
inline Var infonce(Var u, Var v, double tau) {
    detail::check_temperature(tau, "tau");
    require(u.rows() == v.rows() && u.cols() == v.cols(), ErrorKind::shape, "infonce: views differ in shape");
    require(u.rows() >= 2, ErrorKind::insufficient_samples, "infonce needs at least 2 nodes");
    const double inv = 1.0 / tau;
    Var z1 = row_normalize(u);
    Var z2 = row_normalize(v);
    Var s12 = matmul_nt(z1, z2, inv);
    Var pos = row_dot(z1, z2, inv);
    Var d1 = logaddexp(row_logsumexp(s12), row_logsumexp(gram(z1, inv), true));
    Var d2 = logaddexp(row_logsumexp(transpose(s12)), row_logsumexp(gram(z2, inv), true));
    return scale(add(mean(sub(d1, pos)), mean(sub(d2, pos))), 0.5);
}

/// -(1/N) Σ_i log(S_ii / Σ_j S_ij), S = exp(Z Zᵀ / τ_rule) with Z the
/// row-normalized rule representations; the denominator includes j = i.
inline Var rule_loss(Var h_r, double tau_rule) {
    detail::check_temperature(tau_rule, "tau_rule");
    require(h_r.rows() >= 1, ErrorKind::insufficient_samples, "rule_loss needs at least 1 node");
    const double inv = 1.0 / tau_rule;
    Var z = row_normalize(h_r);
    return mean(sub(row_logsumexp(gram(z, inv)), row_dot(z, z, inv)));
}

/// Mean squared gap between column means plus mean squared gap between
/// sample covariance matrices.
inline Var cross_loss(Var h_n, Var h_r) {
    require(h_n.rows() == h_r.rows() && h_n.cols() == h_r.cols(), ErrorKind::shape,
            "cross_loss: shapes " + shape_str(h_n.value()) + " and " + shape_str(h_r.value()) + " differ");
    require(h_n.rows() >= 2, ErrorKind::insufficient_samples, "cross_loss needs at least 2 nodes");
    Var mse_mean = mean(square(sub(col_mean(h_n), col_mean(h_r))));
    Var mse_cov = mean(square(sub(covariance(h_n), covariance(h_r))));
    return add(mse_mean, mse_cov);
}

} // namespace ad

inline double infonce(const DenseMatrix& u, const DenseMatrix& v, double tau) {
    ad::Tape t;
    return ad::infonce(t.constant(u), t.constant(v), tau).scalar();
}

inline double rule_loss(const DenseMatrix& h_r, double tau_rule) {
    ad::Tape t;
    return ad::rule_loss(t.constant(h_r), tau_rule).scalar();
}

inline double cross_loss(const DenseMatrix& h_n, const DenseMatrix& h_r) {
    ad::Tape t;
    return ad::cross_loss(t.constant(h_n), t.constant(h_r)).scalar();
}

} // namespace strgcl
