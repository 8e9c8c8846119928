// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "strgcl/error.hpp"

namespace strgcl {

struct ClusteringScores {
    double nmi = 0.0;
    double ari = 0.0;
};

namespace detail {

struct Contingency {
    std::vector<std::vector<double>> table; // rows: labels of a, cols: labels of b
    std::vector<double> row_sum, col_sum;
    double n = 0.0;
};

inline std::vector<std::size_t> compact(std::span<const std::int32_t> x, std::size_t& count) {
    std::map<std::int32_t, std::size_t> ids;
    std::vector<std::size_t> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = ids.try_emplace(x[i], ids.size()).first->second;
    count = ids.size();
    return out;
}

inline Contingency contingency(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    std::size_t ka = 0, kb = 0;
    const auto ca = compact(a, ka);
    const auto cb = compact(b, kb);
    Contingency c;
    c.table.assign(ka, std::vector<double>(kb, 0.0));
    c.row_sum.assign(ka, 0.0);
    c.col_sum.assign(kb, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        c.table[ca[i]][cb[i]] += 1.0;
        c.row_sum[ca[i]] += 1.0;
        c.col_sum[cb[i]] += 1.0;
    }
    c.n = static_cast<double>(a.size());
    return c;
}

inline double entropy(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts)
        if (c > 0) h -= (c / n) * std::log(c / n);
    return h;
}

inline double comb2(double x) { return x * (x - 1.0) / 2.0; }

} // namespace detail

/// NMI with arithmetic-mean normalization, and the adjusted Rand index.
/// Two single-cluster labelings score 1 on both.
inline ClusteringScores clustering_metrics(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    require(a.size() == b.size(), ErrorKind::shape, "clustering_metrics: labelings differ in length");
    require(!a.empty(), ErrorKind::insufficient_samples, "clustering_metrics on empty labelings");
    const auto c = detail::contingency(a, b);

    double mi = 0.0;
    for (std::size_t i = 0; i < c.table.size(); ++i)
        for (std::size_t j = 0; j < c.col_sum.size(); ++j) {
            const double nij = c.table[i][j];
            if (nij > 0) mi += (nij / c.n) * std::log(c.n * nij / (c.row_sum[i] * c.col_sum[j]));
        }
    const double ha = detail::entropy(c.row_sum, c.n), hb = detail::entropy(c.col_sum, c.n);
    ClusteringScores s;
    const double norm = 0.5 * (ha + hb);
    s.nmi = norm > 0 ? std::clamp(mi / norm, 0.0, 1.0) : 1.0;

    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& row : c.table)
        for (double nij : row) index += detail::comb2(nij);
    for (double x : c.row_sum) sa += detail::comb2(x);
    for (double x : c.col_sum) sb += detail::comb2(x);
    const double total = detail::comb2(c.n);
    const double expected = total > 0 ? sa * sb / total : 0.0;
    const double max_index = 0.5 * (sa + sb);
    s.ari = max_index == expected ? 1.0 : (index - expected) / (max_index - expected);
    return s;
}

inline double accuracy(std::span<const std::int32_t> truth, std::span<const std::int32_t> pred) {
    require(truth.size() == pred.size(), ErrorKind::shape, "accuracy: length mismatch");
    if (truth.empty()) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i];
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

} // namespace strgcl
