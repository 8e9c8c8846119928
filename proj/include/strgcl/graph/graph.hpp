// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "strgcl/linalg/matrix.hpp"
#include "strgcl/linalg/sparse.hpp"

namespace strgcl {

/// Immutable undirected attributed graph. The adjacency is stored as a
/// symmetric 0/1 CSR matrix without self-loops: every undirected edge appears
/// twice, so nnz() is the directed-edge count.
class Graph {
public:
    Graph() = default;
    Graph(std::string name, SparseCSR adjacency, FeatureMatrix features, std::vector<std::int32_t> labels = {},
          std::uint32_t num_classes = 0)
        : name_(std::move(name)), adjacency_(std::move(adjacency)), features_(std::move(features)),
          labels_(std::move(labels)), num_classes_(num_classes) {
        if (labels_.empty()) labels_.assign(adjacency_.rows(), -1);
        validate();
    }

    /// Builds from an arbitrary edge list: symmetrizes, removes duplicates and
    /// drops self-loops.
    static Graph from_edges(std::string name, std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                            FeatureMatrix features, std::vector<std::int32_t> labels = {}, std::uint32_t num_classes = 0) {
        std::vector<std::vector<std::uint32_t>> nbrs(n);
        for (auto [u, v] : edges) {
            require(u < n && v < n, ErrorKind::shape, "edge endpoint out of range");
            if (u == v) continue;
            nbrs[u].push_back(v);
            nbrs[v].push_back(u);
        }
        std::vector<std::uint64_t> rp(n + 1, 0);
        std::vector<std::uint32_t> ci;
        for (std::size_t i = 0; i < n; ++i) {
            auto& r = nbrs[i];
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
            ci.insert(ci.end(), r.begin(), r.end());
            rp[i + 1] = ci.size();
        }
        std::vector<double> vals(ci.size(), 1.0);
        return Graph(std::move(name), SparseCSR(n, n, std::move(rp), std::move(ci), std::move(vals)),
                     std::move(features), std::move(labels), num_classes);
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t n() const noexcept { return adjacency_.rows(); }
    const SparseCSR& adjacency() const noexcept { return adjacency_; }
    const FeatureMatrix& features() const noexcept { return features_; }
    std::size_t num_features() const noexcept { return features_.cols(); }
    const std::vector<std::int32_t>& labels() const noexcept { return labels_; }
    std::uint32_t num_classes() const noexcept { return num_classes_; }
    bool has_labels() const noexcept {
        return num_classes_ > 0 && std::any_of(labels_.begin(), labels_.end(), [](auto l) { return l >= 0; });
    }
    std::size_t num_directed_edges() const noexcept { return adjacency_.nnz(); }
    std::size_t degree(std::size_t i) const noexcept { return adjacency_.row_nnz(i); }

private:
    void validate() const {
        const std::size_t nn = adjacency_.rows();
        require(adjacency_.cols() == nn, ErrorKind::shape, "adjacency must be square");
        require(features_.rows() == nn, ErrorKind::shape,
                "feature rows " + std::to_string(features_.rows()) + " != node count " + std::to_string(nn));
        require(labels_.size() == nn, ErrorKind::shape, "label vector length must equal node count");
        for (std::size_t i = 0; i < nn; ++i) {
            for (std::size_t p = adjacency_.row_begin(i); p < adjacency_.row_end(i); ++p) {
                const std::size_t j = adjacency_.col_idx()[p];
                require(j != i, ErrorKind::shape, "self-loop stored at node " + std::to_string(i));
                require(adjacency_.values()[p] == 1.0, ErrorKind::shape, "adjacency values must all be 1");
                require(adjacency_.at(j, i) == 1.0, ErrorKind::shape,
                        "adjacency not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
        for (auto l : labels_) {
            require(l >= -1 && (l < 0 || static_cast<std::uint32_t>(l) < num_classes_), ErrorKind::shape,
                    "label " + std::to_string(l) + " outside [0, num_classes)");
        }
    }

    std::string name_;
    SparseCSR adjacency_;
    FeatureMatrix features_;
    std::vector<std::int32_t> labels_;
    std::uint32_t num_classes_ = 0;
};

/// An augmented copy of a graph over the same node set.
struct GraphView {
    SparseCSR adjacency;
    FeatureMatrix features;

    std::size_t n() const noexcept { return adjacency.rows(); }
};

inline GraphView as_view(const Graph& g) { return {g.adjacency(), g.features()}; }

/// D̃^{-1/2}(A + I)D̃^{-1/2}. Isolated nodes receive a unit self-loop.
inline SparseCSR normalized_adjacency(const SparseCSR& a) {
    require(a.rows() == a.cols(), ErrorKind::shape, "normalized_adjacency needs a square matrix");
    const std::size_t n = a.rows();
    std::vector<double> deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 1.0;
        for (std::size_t p = a.row_begin(i); p < a.row_end(i); ++p) d += a.values()[p];
        deg[i] = d;
    }
    std::vector<std::uint64_t> rp(n + 1, 0);
    std::vector<std::uint32_t> ci;
    std::vector<double> vals;
    ci.reserve(a.nnz() + n);
    vals.reserve(a.nnz() + n);
    for (std::size_t i = 0; i < n; ++i) {
        bool diag_done = false;
        auto emit = [&](std::size_t j, double w) {
            ci.push_back(static_cast<std::uint32_t>(j));
            vals.push_back(w / std::sqrt(deg[i] * deg[j]));
        };
        for (std::size_t p = a.row_begin(i); p < a.row_end(i); ++p) {
            const std::size_t j = a.col_idx()[p];
            if (!diag_done && j > i) {
                emit(i, 1.0);
                diag_done = true;
            }
            if (j == i) {
                emit(i, 1.0 + a.values()[p]);
                diag_done = true;
            } else {
                emit(j, a.values()[p]);
            }
        }
        if (!diag_done) emit(i, 1.0);
        rp[i + 1] = ci.size();
    }
    return SparseCSR(n, n, std::move(rp), std::move(ci), std::move(vals));
}

inline SparseCSR normalized_adjacency(const Graph& g) { return normalized_adjacency(g.adjacency()); }

} // namespace strgcl
