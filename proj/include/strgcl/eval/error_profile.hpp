// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "strgcl/eval/probe.hpp"
#include "strgcl/train/trainer.hpp"

namespace strgcl {

struct ErrorProfile {
    std::size_t runs = 0;
    std::size_t threshold = 0;
    std::vector<std::uint32_t> counts;      // per node, times misclassified on the test split
    std::map<std::size_t, std::size_t> histogram; // count value -> nodes, for every value in [threshold, runs]
    std::size_t total = 0;                  // nodes misclassified at least `threshold` times
    std::vector<std::uint64_t> train_seeds;
    std::vector<double> run_accuracy;
};

/// Turns per-node counts into the thresholded histogram.
inline ErrorProfile summarize_errors(std::vector<std::uint32_t> counts, std::size_t runs, std::size_t threshold) {
    require(threshold >= 1 && threshold <= runs, ErrorKind::config, "threshold must lie in [1, runs]");
    ErrorProfile p;
    p.runs = runs;
    p.threshold = threshold;
    for (std::size_t b = threshold; b <= runs; ++b) p.histogram[b] = 0;
    for (auto c : counts) {
        require(c <= runs, ErrorKind::contract, "error count exceeds the number of runs");
        if (c >= threshold) {
            ++p.histogram[c];
            ++p.total;
        }
    }
    p.counts = std::move(counts);
    return p;
}

using RunFn = std::function<ProbeRun(std::size_t run, std::uint64_t train_seed)>;

/// Executes `runs` independent train+probe jobs on up to `jobs` threads and
/// merges them in run order, so the result does not depend on scheduling.
inline ErrorProfile accumulate_errors(const std::vector<std::int32_t>& labels, std::size_t runs, std::size_t threshold,
                                      std::uint64_t base_seed, std::size_t jobs, const RunFn& run_fn) {
    require(runs >= 1, ErrorKind::config, "error profile needs at least one run");
    std::vector<ProbeRun> results(runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t r; (r = next++) < runs;) {
            try {
                results[r] = run_fn(r, base_seed + r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                next = runs;
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, runs);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<std::uint32_t> counts(labels.size(), 0);
    for (const auto& res : results)
        for (std::size_t k = 0; k < res.test_nodes.size(); ++k) {
            const auto node = res.test_nodes[k];
            if (res.test_pred[k] != labels[node]) ++counts[node];
        }
    ErrorProfile p = summarize_errors(std::move(counts), runs, threshold);
    for (std::size_t r = 0; r < runs; ++r) {
        p.train_seeds.push_back(base_seed + r);
        p.run_accuracy.push_back(results[r].accuracy);
    }
    return p;
}

/// Trains `runs` models with seeds cfg.seed + r and probes each once on a
/// freshly drawn split.
inline ErrorProfile error_profile(const Graph& g, const TrainConfig& cfg, std::size_t runs, std::size_t threshold,
                                  const ProbeOptions& probe = {}, std::size_t jobs = 1) {
    require(g.has_labels(), ErrorKind::protocol, "error profile needs a labelled graph");
    return accumulate_errors(g.labels(), runs, threshold, cfg.seed, jobs, [&](std::size_t, std::uint64_t seed) {
        TrainConfig c = cfg;
        c.seed = seed;
        const TrainResult res = train(g, c);
        return probe_once(embed(g, res.params), g.labels(), g.num_classes(), probe, derive_seed(probe.base_seed ^ seed, 0));
    });
}

} // namespace strgcl
