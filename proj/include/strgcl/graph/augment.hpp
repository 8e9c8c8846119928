// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "strgcl/graph/graph.hpp"
#include "strgcl/random.hpp"

namespace strgcl {

namespace detail {
inline void check_rate(double p, const char* what) {
    require(p >= 0.0 && p <= 1.0, ErrorKind::config, std::string(what) + " must lie in [0,1], got " + std::to_string(p));
}
} // namespace detail

/// Removes each undirected edge independently with probability p. Draws happen
/// once per edge (i < j) in CSR order; both directions go together.
inline SparseCSR drop_edges(const SparseCSR& a, double p, Rng& rng) {
    detail::check_rate(p, "drop edge rate");
    const std::size_t n = a.rows();
    std::vector<char> keep(a.nnz(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t q = a.row_begin(i); q < a.row_end(i); ++q) {
            const std::size_t j = a.col_idx()[q];
            if (j > i) keep[q] = rng.bernoulli(p) ? 0 : 1;
        }
    }
    std::vector<std::uint64_t> rp(n + 1, 0);
    std::vector<std::uint32_t> ci;
    ci.reserve(a.nnz());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t q = a.row_begin(i); q < a.row_end(i); ++q) {
            const std::size_t j = a.col_idx()[q];
            bool kept;
            if (j > i) {
                kept = keep[q] != 0;
            } else {
                // mirror entry (j, i) lives in row j
                auto b = a.col_idx().begin() + static_cast<std::ptrdiff_t>(a.row_begin(j));
                auto e = a.col_idx().begin() + static_cast<std::ptrdiff_t>(a.row_end(j));
                const auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(i));
                kept = keep[static_cast<std::size_t>(it - a.col_idx().begin())] != 0;
            }
            if (kept) ci.push_back(static_cast<std::uint32_t>(j));
        }
        rp[i + 1] = ci.size();
    }
    std::vector<double> vals(ci.size(), 1.0);
    return SparseCSR(n, n, std::move(rp), std::move(ci), std::move(vals));
}

inline GraphView drop_edges(const GraphView& src, double p, Rng& rng) {
    return {drop_edges(src.adjacency, p, rng), src.features};
}

inline GraphView drop_edges(const Graph& g, double p, Rng& rng) { return drop_edges(as_view(g), p, rng); }

/// One Bernoulli(p) draw per feature dimension; 1 marks a masked column.
inline std::vector<char> draw_feature_mask(std::size_t f, double p, Rng& rng) {
    detail::check_rate(p, "drop feature rate");
    std::vector<char> masked(f);
    for (std::size_t j = 0; j < f; ++j) masked[j] = rng.bernoulli(p) ? 1 : 0;
    return masked;
}

/// Copy of `x` without the masked columns' entries.
inline SparseCSR mask_columns(const SparseCSR& x, const std::vector<char>& masked) {
    require(masked.size() == x.cols(), ErrorKind::shape, "feature mask length != feature count");
    std::vector<std::uint64_t> rp(x.rows() + 1, 0);
    std::vector<std::uint32_t> ci;
    std::vector<double> vals;
    ci.reserve(x.nnz());
    vals.reserve(x.nnz());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t q = x.row_begin(i); q < x.row_end(i); ++q) {
            if (masked[x.col_idx()[q]]) continue;
            ci.push_back(x.col_idx()[q]);
            vals.push_back(x.values()[q]);
        }
        rp[i + 1] = ci.size();
    }
    return SparseCSR(x.rows(), x.cols(), std::move(rp), std::move(ci), std::move(vals));
}

/// Draws one Bernoulli(p) mask over feature dimensions and zeroes the masked
/// columns for every node.
inline GraphView mask_features(const GraphView& src, double p, Rng& rng) {
    const std::size_t f = src.features.cols();
    const std::vector<char> masked = draw_feature_mask(f, p, rng);
    GraphView out{src.adjacency, src.features};
    for (std::size_t i = 0; i < out.features.rows(); ++i) {
        auto row = out.features.row(i);
        for (std::size_t j = 0; j < f; ++j)
            if (masked[j]) row[j] = 0.0f;
    }
    return out;
}

inline GraphView mask_features(const Graph& g, double p, Rng& rng) { return mask_features(as_view(g), p, rng); }

} // namespace strgcl
