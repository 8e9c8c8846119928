// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "strgcl/eval/kmeans.hpp"
#include "strgcl/eval/metrics.hpp"
#include "strgcl/eval/probe.hpp"
#include "strgcl/train/trainer.hpp"

namespace strgcl {

struct ClusterReport {
    double nmi = 0.0;
    double ari = 0.0;
    double inertia = 0.0;
    std::uint64_t seed = 0;
};

/// k-means with k = number of classes on row-normalized embeddings, scored
/// against the labelled nodes.
inline ClusterReport cluster_embeddings(const DenseMatrix& h, const std::vector<std::int32_t>& labels, std::size_t classes,
                                        std::uint64_t seed) {
    require(classes >= 2, ErrorKind::protocol, "clustering needs labels with at least 2 classes");
    KMeansOptions o;
    o.seed = seed;
    const KMeansResult km = kmeans_cluster(row_normalize(h), classes, o);
    std::vector<std::int32_t> truth, pred;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) {
            truth.push_back(labels[i]);
            pred.push_back(km.assignments[i]);
        }
    const ClusteringScores s = clustering_metrics(truth, pred);
    return {s.nmi, s.ari, km.inertia, seed};
}

/// One trained model per seed cfg.seed + r, each probed on its own splits
/// and clustered once.
struct RunEvaluation {
    std::uint64_t train_seed = 0;
    ProbeReport probe;
    ClusterReport cluster;
    double final_loss = 0.0;
    double train_seconds = 0.0;
};

struct Summary {
    double mean = 0.0;
    double std = 0.0; // population
};

inline Summary summarize(const std::vector<double>& v) {
    Summary s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    for (double x : v) s.std += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(s.std / static_cast<double>(v.size()));
    return s;
}

inline ProbeOptions probe_for_run(ProbeOptions probe, std::uint64_t train_seed) {
    probe.base_seed = derive_seed(probe.base_seed ^ train_seed, 1);
    return probe;
}

inline RunEvaluation evaluate_run(const Graph& g, const TrainConfig& cfg, std::uint64_t train_seed, const ProbeOptions& probe,
                                  bool with_clustering, const EpochCallback& on_epoch = {}) {
    require(g.has_labels(), ErrorKind::protocol, "evaluation needs a labelled graph");
    TrainConfig c = cfg;
    c.seed = train_seed;
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult res = train(g, c, on_epoch);
    RunEvaluation ev;
    ev.train_seed = train_seed;
    ev.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ev.final_loss = res.log.back().total;
    const DenseMatrix h = embed(g, res.params);
    ev.probe = linear_probe(h, g.labels(), g.num_classes(), probe_for_run(probe, train_seed));
    if (with_clustering) ev.cluster = cluster_embeddings(h, g.labels(), g.num_classes(), derive_seed(train_seed, 2));
    return ev;
}

inline nlohmann::json to_json(const ClusterReport& c) {
    return {{"nmi", c.nmi}, {"ari", c.ari}, {"inertia", c.inertia}, {"seed", c.seed}};
}

} // namespace strgcl
