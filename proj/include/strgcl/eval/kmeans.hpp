// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "strgcl/linalg/matrix.hpp"
#include "strgcl/random.hpp"

namespace strgcl {

struct KMeansResult {
    std::vector<std::int32_t> assignments;
    DenseMatrix centroids;
    double inertia = 0.0;
    std::vector<double> inertia_history; // after each assignment step
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
};

struct KMeansOptions {
    std::size_t max_iterations = 300;
    std::size_t restarts = 10;
    std::uint64_t seed = 0;
};

namespace detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

/// k-means++: first centre uniform, then each next one with probability
/// proportional to the squared distance to the nearest chosen centre.
inline DenseMatrix kmeanspp(const DenseMatrix& x, std::size_t k, Rng& rng) {
    const std::size_t n = x.rows();
    DenseMatrix c(k, x.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t pick = static_cast<std::size_t>(rng.below(n));
    for (std::size_t c_idx = 0; c_idx < k; ++c_idx) {
        std::copy(x.row(pick).begin(), x.row(pick).end(), c.row(c_idx).begin());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(x.row(i), c.row(c_idx)));
            total += d2[i];
        }
        if (c_idx + 1 == k) break;
        if (total <= 0.0) {
            pick = static_cast<std::size_t>(rng.below(n));
            continue;
        }
        double target = rng.uniform() * total;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            target -= d2[i];
            if (target < 0.0 && d2[i] > 0.0) {
                pick = i;
                break;
            }
        }
    }
    return c;
}

/// Lloyd iterations from the given centres. Ties go to the lower centre
/// index; an emptied cluster keeps its previous centre.
inline KMeansResult lloyd(const DenseMatrix& x, DenseMatrix centroids, std::size_t max_iterations) {
    const std::size_t n = x.rows(), k = centroids.rows(), f = x.cols();
    KMeansResult r;
    r.assignments.assign(n, -1);
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::int32_t arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sq_dist(x.row(i), centroids.row(c));
                if (d < best) {
                    best = d;
                    arg = static_cast<std::int32_t>(c);
                }
            }
            changed = changed || r.assignments[i] != arg;
            r.assignments[i] = arg;
            inertia += best;
        }
        r.inertia_history.push_back(inertia);
        r.inertia = inertia;
        r.iterations = it;
        if (!changed) break;
        DenseMatrix next(k, f);
        std::vector<std::size_t> size(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(r.assignments[i]);
            ++size[c];
            for (std::size_t j = 0; j < f; ++j) next(c, j) += x(i, j);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (size[c] == 0) {
                std::copy(centroids.row(c).begin(), centroids.row(c).end(), next.row(c).begin());
                continue;
            }
            for (std::size_t j = 0; j < f; ++j) next(c, j) /= static_cast<double>(size[c]);
        }
        centroids = std::move(next);
    }
    r.centroids = std::move(centroids);
    return r;
}

} // namespace detail

/// Best-inertia run over `restarts` k-means++ seedings; restart r uses
/// derive_seed(opt.seed, r). Earlier restarts win ties.
inline KMeansResult kmeans_cluster(const DenseMatrix& x, std::size_t k, const KMeansOptions& opt = {}) {
    require(k >= 2, ErrorKind::config, "k-means needs k >= 2");
    require(k <= x.rows(), ErrorKind::config,
            "k-means: k=" + std::to_string(k) + " exceeds the number of points " + std::to_string(x.rows()));
    require(opt.restarts >= 1 && opt.max_iterations >= 1, ErrorKind::config, "k-means needs restarts and iterations");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < opt.restarts; ++r) {
        const std::uint64_t seed = derive_seed(opt.seed, r);
        Rng rng(seed);
        KMeansResult cur = detail::lloyd(x, detail::kmeanspp(x, k, rng), opt.max_iterations);
        cur.seed = seed;
        if (cur.inertia < best.inertia) best = std::move(cur);
    }
    return best;
}

} // namespace strgcl
