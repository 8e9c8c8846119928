// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "strgcl/eval/error_profile.hpp"
#include "strgcl/eval/kmeans.hpp"
#include "strgcl/eval/metrics.hpp"
#include "strgcl/eval/probe.hpp"
#include "strgcl/losses/losses.hpp"
#include "strgcl/rules/rules.hpp"

namespace strgcl {

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline nlohmann::json to_json(const LossBreakdown& b) {
    return {{"epoch", b.epoch}, {"infonce", b.infonce}, {"rule", b.rule}, {"cross", b.cross}, {"total", b.total}};
}

inline nlohmann::json to_json(const ProbeReport& r) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : r.runs)
        runs.push_back({{"seed", run.seed},
                        {"l2", run.l2},
                        {"accuracy", run.accuracy},
                        {"iterations", run.iterations},
                        {"converged", run.converged},
                        {"test_size", run.test_nodes.size()}});
    return {{"accuracy_mean", r.accuracy_mean}, {"accuracy_std", r.accuracy_std}, {"runs", runs}};
}

inline nlohmann::json to_json(const ErrorProfile& p) {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [bucket, count] : p.histogram) hist[std::to_string(bucket)] = count;
    return {{"runs", p.runs},
            {"threshold", p.threshold},
            {"histogram", hist},
            {"total", p.total},
            {"train_seeds", p.train_seeds},
            {"run_accuracy", p.run_accuracy}};
}

inline void write_histogram_csv(std::ostream& out, const ErrorProfile& p) {
    out << "misclassified_times,nodes\n";
    for (const auto& [bucket, count] : p.histogram) out << bucket << ',' << count << '\n';
    out << "total," << p.total << '\n';
}

inline void write_rules_csv(std::ostream& out, const NtscBreakdown& n, const LgtcBreakdown& l) {
    out << "node_id,degree,d_sum,w,AS,GS,Diff,s\n";
    char buf[256];
    for (std::size_t i = 0; i < n.w.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.0f,%.0f,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, n.degree[i], n.d_sum[i], n.w[i],
                      l.as[i], l.gs[i], l.diff[i], l.s[i]);
        out << buf;
    }
}

} // namespace strgcl
