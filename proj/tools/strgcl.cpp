// SPDX-License-Identifier: Apache-2.0
// Command-line entry point: train, embed, evaluate, analyze errors, dump rules.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "strgcl/strgcl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace strgcl;

namespace {

enum Exit { kOk = 0, kChecksFailed = 1, kConfig = 2, kFormat = 3, kNumeric = 4 };

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::format:
    case ErrorKind::io: return kFormat;
    case ErrorKind::numeric:
    case ErrorKind::numeric_domain: return kNumeric;
    default: return kConfig;
    }
}

/// Output directory that only appears under its final name once complete.
class StagedDir {
public:
    StagedDir(fs::path final_path, bool force) : final_(std::move(final_path)), force_(force) {
        require(!final_.empty(), ErrorKind::config, "--out is required");
        if (fs::exists(final_) && !force_)
            fail(ErrorKind::config, "output directory " + final_.string() + " already exists (use --force to replace)");
        const fs::path parent = final_.has_parent_path() ? final_.parent_path() : fs::path(".");
        fs::create_directories(parent);
        staging_ = parent / ("." + final_.filename().string() + ".partial-" + std::to_string(::getpid()));
        fs::remove_all(staging_);
        fs::create_directory(staging_);
    }
    StagedDir(const StagedDir&) = delete;
    StagedDir& operator=(const StagedDir&) = delete;
    ~StagedDir() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    fs::path operator/(const std::string& name) const { return staging_ / name; }

    void commit() {
        if (fs::exists(final_)) fs::remove_all(final_);
        fs::rename(staging_, final_);
        committed_ = true;
    }

private:
    fs::path final_, staging_;
    bool force_;
    bool committed_ = false;
};

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2) << '\n';
    require(static_cast<bool>(out), ErrorKind::io, "write failed for " + p.string());
}

struct Options {
    std::string config, data, out, checkpoint, method;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs, pca_dim;
    std::size_t runs = 1;
    std::size_t error_runs = 20;
    std::size_t threshold = 15;
    std::size_t jobs = 1;
    std::size_t probe_seeds = 20;
    bool force = false;
    bool quiet = false;
};

TrainConfig resolve_config(const Options& o, std::string_view dataset_hint = {}) {
    TrainConfig c = o.config.empty() ? TrainConfig{} : load_config(o.config);
    if (c.dataset.empty()) c.dataset = std::string(dataset_hint);
    if (o.seed) c.seed = *o.seed;
    if (o.epochs) c.num_epochs = *o.epochs;
    if (o.pca_dim) c.pca_dim = *o.pca_dim;
    if (!o.method.empty()) {
        require(o.method == "strgcl" || o.method == "grace", ErrorKind::config, "--method must be strgcl or grace");
        c.method = o.method == "grace" ? Method::grace : Method::strgcl;
    }
    c.validate();
    return c;
}

Graph load_data(const Options& o) {
    require(!o.data.empty(), ErrorKind::config, "--data is required");
    return load_graph(o.data);
}

json header(const TrainConfig& c, const Graph& g) {
    return {{"fingerprint", fingerprint_hex(c)},
            {"config", to_json(c)},
            {"graph", {{"name", g.name()}, {"nodes", g.n()}, {"directed_edges", g.num_directed_edges()},
                       {"features", g.num_features()}, {"classes", g.num_classes()}}}};
}

EpochCallback progress(const Options& o, std::size_t total) {
    if (o.quiet) return {};
    return [total](const LossBreakdown& b) {
        if (b.epoch == 1 || b.epoch % 10 == 0 || b.epoch == total)
            std::fprintf(stderr, "epoch %zu/%zu  total %.6f  infonce %.6f  rule %.6f  cross %.6f\n", b.epoch, total, b.total,
                         b.infonce, b.rule, b.cross);
    };
}

int cmd_train(const Options& o) {
    const Graph g = load_data(o);
    const TrainConfig c = resolve_config(o, g.name());
    StagedDir dir(o.out, o.force);
    const std::string fp = fingerprint_hex(c);
    std::ofstream log(dir / "train_log.jsonl");
    auto on_epoch = progress(o, c.num_epochs);
    const TrainResult res = train(g, c, [&](const LossBreakdown& b) {
        json line = to_json(b);
        line["fingerprint"] = fp;
        log << line.dump() << '\n';
        if (on_epoch) on_epoch(b);
    });
    log.close();
    require(static_cast<bool>(log), ErrorKind::io, "failed to write train_log.jsonl");
    save_checkpoint(res.params, fingerprint(c), dir / "checkpoint.sgc1");
    write_json(dir / "config.json", header(c, g));
    dir.commit();
    std::printf("trained %zu epochs, final loss %.6f, fingerprint %s -> %s\n", res.log.size(), res.log.back().total,
                fp.c_str(), o.out.c_str());
    return kOk;
}

int cmd_embed(const Options& o) {
    require(!o.checkpoint.empty(), ErrorKind::config, "--checkpoint is required");
    const Graph g = load_data(o);
    const Checkpoint ck = load_checkpoint(o.checkpoint);
    StagedDir dir(o.out, o.force);
    const DenseMatrix h = embed(g, ck.params);
    save_embeddings(h, ck.fingerprint, dir / "embeddings.sge1");
    write_json(dir / "embeddings.json",
               {{"fingerprint", hex64(ck.fingerprint)}, {"rows", h.rows()}, {"cols", h.cols()}, {"graph", g.name()},
                {"checkpoint", o.checkpoint}});
    dir.commit();
    std::printf("embedded %zu nodes x %zu dims -> %s\n", h.rows(), h.cols(), o.out.c_str());
    return kOk;
}

ProbeOptions probe_options(const Options& o, std::uint64_t seed) {
    ProbeOptions p;
    p.seeds = o.probe_seeds;
    p.base_seed = seed;
    return p;
}

int cmd_evaluate(const Options& o, bool clustering) {
    const Graph g = load_data(o);
    require(g.has_labels(), ErrorKind::protocol, "evaluation needs a labelled graph");
    const char* file = clustering ? "eval_cluster.json" : "eval_classify.json";
    json report;
    std::vector<double> acc, nmi, ari;

    if (!o.checkpoint.empty()) {
        const Checkpoint ck = load_checkpoint(o.checkpoint);
        StagedDir dir(o.out, o.force);
        const DenseMatrix h = embed(g, ck.params);
        const std::uint64_t seed = o.seed.value_or(0);
        report = {{"fingerprint", hex64(ck.fingerprint)}, {"checkpoint", o.checkpoint}, {"graph", g.name()}};
        if (clustering) {
            const ClusterReport cr = cluster_embeddings(h, g.labels(), g.num_classes(), seed);
            report["nmi"] = cr.nmi;
            report["ari"] = cr.ari;
            report["runs"] = json::array({to_json(cr)});
            std::printf("NMI %.4f  ARI %.4f\n", cr.nmi, cr.ari);
        } else {
            const ProbeReport pr = linear_probe(h, g.labels(), g.num_classes(), probe_options(o, seed));
            report["accuracy_mean"] = pr.accuracy_mean;
            report["accuracy_std"] = pr.accuracy_std;
            report["runs"] = json::array({to_json(pr)});
            std::printf("accuracy %.4f +- %.4f\n", pr.accuracy_mean, pr.accuracy_std);
        }
        write_json(dir / file, report);
        dir.commit();
        return kOk;
    }

    const TrainConfig c = resolve_config(o, g.name());
    require(o.runs >= 1, ErrorKind::config, "--runs must be at least 1");
    StagedDir dir(o.out, o.force);
    report = header(c, g);
    report["method"] = to_string(c.method);
    json runs = json::array();
    for (std::size_t r = 0; r < o.runs; ++r) {
        const RunEvaluation ev = evaluate_run(g, c, c.seed + r, probe_options(o, 0), clustering, progress(o, c.num_epochs));
        json jr = {{"train_seed", ev.train_seed}, {"final_loss", ev.final_loss}, {"train_seconds", ev.train_seconds}};
        if (clustering) {
            jr["cluster"] = to_json(ev.cluster);
            nmi.push_back(ev.cluster.nmi);
            ari.push_back(ev.cluster.ari);
        } else {
            jr["probe"] = to_json(ev.probe);
            acc.push_back(ev.probe.accuracy_mean);
        }
        runs.push_back(jr);
        if (!o.quiet) std::fprintf(stderr, "run %zu/%zu done\n", r + 1, o.runs);
    }
    report["runs"] = runs;
    if (clustering) {
        const Summary sn = summarize(nmi), sa = summarize(ari);
        report["nmi"] = sn.mean;
        report["nmi_std"] = sn.std;
        report["ari"] = sa.mean;
        report["ari_std"] = sa.std;
        std::printf("%s %s: NMI %.4f +- %.4f  ARI %.4f +- %.4f over %zu runs\n", g.name().c_str(), to_string(c.method), sn.mean,
                    sn.std, sa.mean, sa.std, o.runs);
    } else {
        const Summary s = summarize(acc);
        report["accuracy_mean"] = s.mean;
        report["accuracy_std_over_runs"] = s.std;
        std::printf("%s %s: accuracy %.4f +- %.4f over %zu runs x %zu probe splits\n", g.name().c_str(), to_string(c.method),
                    s.mean, s.std, o.runs, o.probe_seeds);
    }
    write_json(dir / file, report);
    dir.commit();
    return kOk;
}

int cmd_analyze_errors(const Options& o) {
    const Graph g = load_data(o);
    const TrainConfig c = resolve_config(o, g.name());
    StagedDir dir(o.out, o.force);
    const ErrorProfile p = error_profile(g, c, o.error_runs, o.threshold, probe_options(o, 0), o.jobs);
    json report = header(c, g);
    report["method"] = to_string(c.method);
    report["profile"] = to_json(p);
    report["counts"] = p.counts;
    write_json(dir / "errors.json", report);
    std::ofstream csv(dir / "errors_histogram.csv");
    write_histogram_csv(csv, p);
    csv.close();
    require(static_cast<bool>(csv), ErrorKind::io, "failed to write errors_histogram.csv");
    dir.commit();
    std::printf("%s %s: %zu nodes misclassified at least %zu of %zu times\n", g.name().c_str(), to_string(c.method), p.total,
                p.threshold, p.runs);
    for (const auto& [bucket, count] : p.histogram) std::printf("  %zu: %zu\n", bucket, count);
    return kOk;
}

int cmd_rules_dump(const Options& o) {
    const Graph g = load_data(o);
    TrainConfig c = resolve_config(o, g.name());
    const std::size_t k = effective_pca_dim(g, c);
    StagedDir dir(o.out, o.force);
    const NtscBreakdown nb = ntsc_breakdown(g);
    const PcaModel pca = pca_fit(g.features().cast<double>(), k);
    const LgtcBreakdown lb = lgtc_breakdown(pca_transform(pca, g.features().cast<double>()), g);
    std::ofstream csv(dir / "rules.csv");
    write_rules_csv(csv, nb, lb);
    csv.close();
    require(static_cast<bool>(csv), ErrorKind::io, "failed to write rules.csv");
    json meta = header(c, g);
    meta["pca_dim"] = k;
    meta["pca_iterations"] = pca.iterations;
    write_json(dir / "rules.json", meta);
    dir.commit();
    std::printf("wrote rules for %zu nodes (pca_dim %zu) -> %s\n", g.n(), k, o.out.c_str());
    return kOk;
}

int cmd_selfcheck(const Options& o) {
    const auto results = selfcheck::run_checks(selfcheck::property_checks(o.seed.value_or(20240801)), &std::cout);
    std::size_t failed = 0;
    json arr = json::array();
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
        arr.push_back({{"name", r.name}, {"passed", r.passed}, {"measured", r.measured}, {"tolerance", r.tolerance},
                       {"detail", r.detail}, {"seconds", r.seconds}});
    }
    if (!o.out.empty()) {
        StagedDir dir(o.out, o.force);
        write_json(dir / "selfcheck.json", {{"checks", arr}, {"failed", failed}});
        dir.commit();
    }
    std::printf("%zu/%zu checks passed\n", results.size() - failed, results.size());
    return failed == 0 ? kOk : kChecksFailed;
}

void apply_thread_cap() {
    if (const char* t = std::getenv("STRGCL_THREADS")) {
        const int n = std::atoi(t);
        if (n > 0) Eigen::setNbThreads(n);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Str-GCL: graph contrastive learning with structural commonsense rules"};
    app.require_subcommand(1, 1);
    Options o;

    auto common = [&](CLI::App* s, bool needs_config) {
        auto* cfg = s->add_option("--config", o.config, "training config JSON")->check(CLI::ExistingFile);
        if (needs_config) cfg->required();
        s->add_option("--data", o.data, "SGR1 graph file")->required();
        s->add_option("--out", o.out, "output directory (created atomically)")->required();
        s->add_option("--seed", o.seed, "override the config seed");
        s->add_option("--method", o.method, "override the method")->check(CLI::IsMember({"strgcl", "grace"}));
        s->add_option("--epochs", o.epochs, "override num_epochs");
        s->add_flag("--force", o.force, "replace an existing output directory");
        s->add_flag("-q,--quiet", o.quiet, "no per-epoch progress on stderr");
    };

    auto* train_cmd = app.add_subcommand("train", "train a model; writes checkpoint and JSON-lines log");
    common(train_cmd, true);

    auto* embed_cmd = app.add_subcommand("embed", "encode a graph with a trained checkpoint");
    embed_cmd->add_option("--checkpoint", o.checkpoint, "SGC1 checkpoint")->required();
    embed_cmd->add_option("--data", o.data, "SGR1 graph file")->required();
    embed_cmd->add_option("--out", o.out, "output directory")->required();
    embed_cmd->add_flag("--force", o.force, "replace an existing output directory");

    auto eval_cmd = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        common(s, false);
        s->add_option("--checkpoint", o.checkpoint, "evaluate this checkpoint instead of training");
        s->add_option("--runs", o.runs, "independent training runs (seeds seed..seed+runs-1)")->check(CLI::PositiveNumber);
        s->add_option("--probe-seeds", o.probe_seeds, "probe splits per run")->check(CLI::PositiveNumber);
        return s;
    };
    auto* classify_cmd = eval_cmd("eval-classify", "train and linear-probe; writes eval_classify.json");
    auto* cluster_cmd = eval_cmd("eval-cluster", "train and k-means cluster; writes eval_cluster.json");

    auto* errors_cmd = app.add_subcommand("analyze-errors", "per-node misclassification profile over repeated runs");
    common(errors_cmd, true);
    errors_cmd->add_option("--runs", o.error_runs, "independent training runs")->capture_default_str()->check(CLI::PositiveNumber);
    errors_cmd->add_option("--threshold", o.threshold, "minimum misclassification count")->capture_default_str();
    errors_cmd->add_option("--jobs", o.jobs, "concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);

    auto* rules_cmd = app.add_subcommand("rules-dump", "per-node NTSC and LGTC quantities as CSV");
    rules_cmd->add_option("--config", o.config, "config (for pca_dim)")->check(CLI::ExistingFile);
    rules_cmd->add_option("--data", o.data, "SGR1 graph file")->required();
    rules_cmd->add_option("--out", o.out, "output directory")->required();
    rules_cmd->add_option("--pca-dim", o.pca_dim, "override pca_dim");
    rules_cmd->add_flag("--force", o.force, "replace an existing output directory");

    auto* self_cmd = app.add_subcommand("selfcheck", "run the randomized property suite");
    self_cmd->add_option("--seed", o.seed, "suite seed");
    self_cmd->add_option("--out", o.out, "optional output directory for selfcheck.json");
    self_cmd->add_flag("--force", o.force, "replace an existing output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kConfig;
    }
    apply_thread_cap();
    try {
        if (train_cmd->parsed()) return cmd_train(o);
        if (embed_cmd->parsed()) return cmd_embed(o);
        if (classify_cmd->parsed()) return cmd_evaluate(o, false);
        if (cluster_cmd->parsed()) return cmd_evaluate(o, true);
        if (errors_cmd->parsed()) return cmd_analyze_errors(o);
        if (rules_cmd->parsed()) return cmd_rules_dump(o);
        if (self_cmd->parsed()) return cmd_selfcheck(o);
    } catch (const Error& e) {
        std::cerr << "strgcl: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "strgcl: io error: " << e.what() << '\n';
        return kFormat;
    } catch (const std::exception& e) {
        std::cerr << "strgcl: " << e.what() << '\n';
        return kConfig;
    }
    return kConfig;
}
