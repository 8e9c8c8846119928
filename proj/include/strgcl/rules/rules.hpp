// SPDX-License-Identifier: Apache-2.0
#pragma once

// Structural rule weights computed once from the original graph:
//  - NTSC: nodes whose neighbours have a small total degree get larger weight.
//  - LGTC: nodes whose neighbour similarity is close to their global
//    similarity get larger weight.

#include <algorithm>
#include <cmath>
#include <vector>

#include "strgcl/graph/graph.hpp"
#include "strgcl/linalg/functions.hpp"
#include "strgcl/rules/pca.hpp"

namespace strgcl {

struct RuleWeights {
    std::vector<double> w; // NTSC
    std::vector<double> s; // LGTC
};

struct NtscBreakdown {
    std::vector<double> degree;
    std::vector<double> d_sum;
    std::vector<double> w;
};

inline NtscBreakdown ntsc_breakdown(const Graph& g) {
    const std::size_t n = g.n();
    const SparseCSR& a = g.adjacency();
    NtscBreakdown out;
    out.degree.resize(n);
    out.d_sum.assign(n, 0.0);
    out.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.degree[i] = static_cast<double>(g.degree(i));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = a.row_begin(i); p < a.row_end(i); ++p) out.d_sum[i] += out.degree[a.col_idx()[p]];
    double hmax = 0.0;
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
        h[i] = std::log1p(out.d_sum[i]);
        hmax = std::max(hmax, h[i]);
    }
    for (std::size_t i = 0; i < n; ++i) out.w[i] = hmax - h[i];
    return out;
}

/// w_i = max_j log(1 + d_sum_j) - log(1 + d_sum_i), d_sum = A · degree.
inline std::vector<double> ntsc_weights(const Graph& g) { return ntsc_breakdown(g).w; }

struct LgtcBreakdown {
    std::vector<double> as;   // mean cosine similarity to first-order neighbours
    std::vector<double> gs;   // mean cosine similarity to all other nodes
    std::vector<double> diff; // (AS - GS + 1) / 2
    std::vector<double> s;
};

/// Runs in O(N·k + E·k): the global sum Σ_j z_i·z_j is z_i·(Σ_j z_j) with
/// unit rows z, so no N x N similarity matrix is formed.
inline LgtcBreakdown lgtc_breakdown(const DenseMatrix& x_reduced, const Graph& g) {
    require(x_reduced.rows() == g.n(), ErrorKind::shape, "LGTC: reduced feature rows must equal node count");
    const std::size_t n = g.n(), k = x_reduced.cols();
    const DenseMatrix z = row_normalize(x_reduced);
    std::vector<double> total(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) total[j] += z(i, j);

    auto dot = [&](std::size_t i, std::size_t j) {
        double d = 0.0;
        for (std::size_t c = 0; c < k; ++c) d += z(i, c) * z(j, c);
        return d;
    };

    LgtcBreakdown out;
    out.as.resize(n);
    out.gs.resize(n);
    out.diff.resize(n);
    out.s.resize(n);
    const SparseCSR& a = g.adjacency();
    for (std::size_t i = 0; i < n; ++i) {
        double to_all = 0.0;
        for (std::size_t c = 0; c < k; ++c) to_all += z(i, c) * total[c];
        const double self = dot(i, i);
        out.gs[i] = n > 1 ? (to_all - self) / static_cast<double>(n - 1) : 0.0;
        const std::size_t deg = a.row_nnz(i);
        if (deg == 0) {
            out.as[i] = out.gs[i];
        } else {
            double acc = 0.0;
            for (std::size_t p = a.row_begin(i); p < a.row_end(i); ++p) acc += dot(i, a.col_idx()[p]);
            out.as[i] = acc / static_cast<double>(deg);
        }
        out.diff[i] = 0.5 * (out.as[i] - out.gs[i] + 1.0);
    }
    const double dmax = n ? *std::max_element(out.diff.begin(), out.diff.end()) : 0.0;
    for (std::size_t i = 0; i < n; ++i) out.s[i] = dmax - out.diff[i];
    return out;
}

inline std::vector<double> lgtc_weights(const DenseMatrix& x_reduced, const Graph& g) {
    return lgtc_breakdown(x_reduced, g).s;
}

inline std::size_t default_pca_dim(const Graph& g) {
    return std::min<std::size_t>({g.num_features(), std::size_t{128}, g.n()});
}

/// Everything the rule branch consumes, computed once before training. The
/// same PCA projection feeds LGTC and serves as the rule-feature matrix.
struct RuleInputs {
    RuleWeights weights;
    PcaModel pca;
    DenseMatrix rule_features; // N x k
    DenseMatrix gate_input;    // N x 2, columns [w, s]
};

inline RuleInputs compute_rule_inputs(const Graph& g, std::size_t pca_dim) {
    RuleInputs r;
    const DenseMatrix x = g.features().cast<double>();
    r.pca = pca_fit(x, pca_dim);
    r.rule_features = pca_transform(r.pca, x);
    r.weights.w = ntsc_weights(g);
    r.weights.s = lgtc_weights(r.rule_features, g);
    r.gate_input = DenseMatrix(g.n(), 2);
    for (std::size_t i = 0; i < g.n(); ++i) {
        r.gate_input(i, 0) = r.weights.w[i];
        r.gate_input(i, 1) = r.weights.s[i];
    }
    return r;
}

} // namespace strgcl
