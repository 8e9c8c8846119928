// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "strgcl/graph/graph.hpp"
#include "strgcl/random.hpp"

namespace strgcl {

/// Stochastic block model with sparse binary "bag of words" features: each
/// class owns a block of feature dimensions that its nodes switch on more
/// often than the rest.
struct SbmOptions {
    std::size_t nodes = 200;
    std::size_t classes = 4;
    std::size_t features = 64;
    double p_in = 0.08;
    double p_out = 0.005;
    double feature_on_own = 0.25;  // activation rate inside the class's block
    double feature_on_other = 0.03;
    std::uint64_t seed = 1;
};

inline Graph make_sbm(const SbmOptions& o, std::string name = "sbm") {
    require(o.nodes >= 1 && o.classes >= 1 && o.features >= 1, ErrorKind::config, "SBM sizes must be positive");
    Rng rng(o.seed);
    std::vector<std::int32_t> labels(o.nodes);
    for (std::size_t i = 0; i < o.nodes; ++i) labels[i] = static_cast<std::int32_t>(i % o.classes);
    rng.shuffle(std::span<std::int32_t>(labels));

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < o.nodes; ++i)
        for (std::size_t j = i + 1; j < o.nodes; ++j)
            if (rng.bernoulli(labels[i] == labels[j] ? o.p_in : o.p_out))
                edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));

    FeatureMatrix x(o.nodes, o.features);
    const std::size_t block = std::max<std::size_t>(1, o.features / o.classes);
    for (std::size_t i = 0; i < o.nodes; ++i) {
        const std::size_t lo = static_cast<std::size_t>(labels[i]) * block;
        for (std::size_t j = 0; j < o.features; ++j) {
            const bool own = j >= lo && j < lo + block;
            if (rng.bernoulli(own ? o.feature_on_own : o.feature_on_other)) x(i, j) = 1.0f;
        }
    }
    return Graph::from_edges(std::move(name), o.nodes, edges, std::move(x), std::move(labels),
                             static_cast<std::uint32_t>(o.classes));
}

} // namespace strgcl
