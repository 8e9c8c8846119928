// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "support/testing.hpp"
#include "strgcl/eval/error_profile.hpp"
#include "strgcl/eval/experiments.hpp"
#include "strgcl/eval/kmeans.hpp"
#include "strgcl/eval/metrics.hpp"
#include "strgcl/eval/probe.hpp"
#include "strgcl/eval/report.hpp"
#include "strgcl/graph/synthetic.hpp"
#include "strgcl/selfcheck.hpp"

using namespace strgcl;

namespace {

// Three well-separated square blobs, one per class.
DenseMatrix blobs(std::size_t per, std::vector<std::int32_t>& labels, std::uint64_t seed = 1) {
    Rng rng(seed);
    const double centers[3][2] = {{5, 0}, {0, 5}, {-5, -5}};
    DenseMatrix x(3 * per, 2);
    labels.clear();
    for (std::size_t i = 0; i < 3 * per; ++i) {
        const std::size_t c = i % 3;
        x(i, 0) = centers[c][0] + rng.uniform(-0.5, 0.5);
        x(i, 1) = centers[c][1] + rng.uniform(-0.5, 0.5);
        labels.push_back(static_cast<std::int32_t>(c));
    }
    return x;
}

std::vector<std::int32_t> random_labels(std::size_t n, std::int32_t k, Rng& rng) {
    std::vector<std::int32_t> l(n);
    for (auto& v : l) v = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(k)));
    return l;
}

} // namespace

TEST(Metrics, IdenticalPartitionsScoreOneUnderRelabelling) {
    const std::vector<std::int32_t> a{0, 0, 1, 1, 2, 2}, b{5, 5, 3, 3, 9, 9};
    const auto s = clustering_metrics(a, b);
    EXPECT_NEAR(s.nmi, 1.0, 1e-12);
    EXPECT_NEAR(s.ari, 1.0, 1e-12);
}

TEST(Metrics, AgreeWithPairCountingOracle) {
    Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = random_labels(40, 4, rng), b = random_labels(40, 3, rng);
        const auto got = clustering_metrics(a, b);
        const auto want = selfcheck::oracle::clustering(a, b);
        EXPECT_NEAR(got.nmi, want.nmi, 1e-12);
        EXPECT_NEAR(got.ari, want.ari, 1e-12);
    }
}

TEST(Metrics, ErrorPaths) {
    const std::vector<std::int32_t> a{0, 1}, b{0};
    EXPECT_ERROR_KIND(clustering_metrics(a, b), ErrorKind::shape);
    EXPECT_ERROR_KIND(clustering_metrics(std::vector<std::int32_t>{}, std::vector<std::int32_t>{}),
                      ErrorKind::insufficient_samples);
    EXPECT_ERROR_KIND(accuracy(a, b), ErrorKind::shape);
    EXPECT_DOUBLE_EQ(accuracy(std::vector<std::int32_t>{1, 2, 3, 4}, std::vector<std::int32_t>{1, 0, 3, 0}), 0.5);
}

TEST(KMeans, RecoversSeparatedBlobs) {
    std::vector<std::int32_t> labels;
    const DenseMatrix x = blobs(20, labels);
    const KMeansResult r = kmeans_cluster(x, 3);
    EXPECT_NEAR(clustering_metrics(labels, r.assignments).ari, 1.0, 1e-12);
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
        EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] + 1e-9);
}

TEST(KMeans, SameSeedSameResult) {
    std::vector<std::int32_t> labels;
    const DenseMatrix x = blobs(15, labels, 4);
    KMeansOptions o;
    o.seed = 9;
    const auto a = kmeans_cluster(x, 4, o), b = kmeans_cluster(x, 4, o);
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_EQ(a.inertia, b.inertia);
}

TEST(KMeans, ErrorPaths) {
    const DenseMatrix x(3, 2, 1.0);
    EXPECT_ERROR_KIND(kmeans_cluster(x, 4), ErrorKind::config);
    EXPECT_ERROR_KIND(kmeans_cluster(x, 1), ErrorKind::config);
}

TEST(KMeans, DuplicatePointsStillProduceKLabels) {
    const DenseMatrix x(6, 2, 1.0);
    const auto r = kmeans_cluster(x, 2);
    EXPECT_EQ(r.assignments.size(), 6u);
    EXPECT_NEAR(r.inertia, 0.0, 1e-12);
}

TEST(Probe, SeparableEmbeddingsGiveHighAccuracy) {
    std::vector<std::int32_t> labels;
    const DenseMatrix x = blobs(40, labels);
    ProbeOptions o;
    o.seeds = 5;
    const auto rep = linear_probe(x, labels, 3, o);
    EXPECT_GT(rep.accuracy_mean, 0.95);
    EXPECT_EQ(rep.runs.size(), 5u);
    for (const auto& r : rep.runs) {
        EXPECT_EQ(r.test_nodes.size(), 108u);
        EXPECT_EQ(r.test_pred.size(), r.test_nodes.size());
    }
    const auto again = linear_probe(x, labels, 3, o);
    EXPECT_EQ(again.accuracy_mean, rep.accuracy_mean);
}

TEST(Probe, LogisticGradientVanishesAtOptimum) {
    std::vector<std::int32_t> labels;
    const DenseMatrix x = blobs(10, labels);
    Eigen::MatrixXd e(30, 2);
    for (Eigen::Index i = 0; i < 30; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) e(i, j) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    LogRegOptions o;
    o.l2 = 1e-2;
    const LogRegModel m = fit_logistic(e, labels, 3, o);
    EXPECT_TRUE(m.converged);
    EXPECT_LE(m.gradient_norm, o.tolerance);
}

TEST(Probe, UnlabelledNodesAreSkippedAndTooFewIsProtocolError) {
    std::vector<std::int32_t> labels;
    const DenseMatrix x = blobs(10, labels);
    labels[0] = -1;
    ProbeOptions o;
    o.seeds = 2;
    for (const auto& r : linear_probe(x, labels, 3, o).runs)
        for (auto n : r.test_nodes) EXPECT_NE(n, 0u);
    std::vector<std::int32_t> none(labels.size(), -1);
    none[3] = 1;
    EXPECT_ERROR_KIND(linear_probe(x, none, 3, o), ErrorKind::protocol);
    EXPECT_ERROR_KIND(linear_probe(x, labels, 0, o), ErrorKind::protocol);
    EXPECT_ERROR_KIND(linear_probe(DenseMatrix(5, 2), labels, 3, o), ErrorKind::shape);
}

TEST(ErrorProfile, SummarizeBucketsFromThreshold) {
    const ErrorProfile p = summarize_errors({0, 15, 20, 17, 14, 20}, 20, 15);
    EXPECT_EQ(p.histogram.size(), 6u);
    EXPECT_EQ(p.histogram.at(15), 1u);
    EXPECT_EQ(p.histogram.at(16), 0u);
    EXPECT_EQ(p.histogram.at(20), 2u);
    EXPECT_EQ(p.total, 4u);
    std::ostringstream csv;
    write_histogram_csv(csv, p);
    EXPECT_EQ(csv.str(), "misclassified_times,nodes\n15,1\n16,0\n17,1\n18,0\n19,0\n20,2\ntotal,4\n");
    EXPECT_ERROR_KIND(summarize_errors({1}, 20, 21), ErrorKind::config);
    EXPECT_ERROR_KIND(summarize_errors({21}, 20, 15), ErrorKind::contract);
}

TEST(ErrorProfile, ThreadCountDoesNotChangeResult) {
    const std::vector<std::int32_t> labels{0, 1, 0, 1, 2, 2, 0, 1};
    auto run = [&](std::size_t r, std::uint64_t seed) {
        ProbeRun pr;
        Rng rng(seed);
        for (std::uint32_t n = 0; n < labels.size(); ++n)
            if (rng.bernoulli(0.5)) {
                pr.test_nodes.push_back(n);
                pr.test_pred.push_back(static_cast<std::int32_t>(rng.below(3)));
            }
        pr.accuracy = static_cast<double>(r);
        return pr;
    };
    const ErrorProfile a = accumulate_errors(labels, 12, 3, 100, 1, run);
    const ErrorProfile b = accumulate_errors(labels, 12, 3, 100, 4, run);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.histogram, b.histogram);
    EXPECT_EQ(a.run_accuracy, b.run_accuracy);
    EXPECT_EQ(a.train_seeds.front(), 100u);
}

TEST(ErrorProfile, WorkerExceptionPropagates) {
    const std::vector<std::int32_t> labels{0, 1};
    auto run = [](std::size_t r, std::uint64_t) -> ProbeRun {
        if (r == 2) fail(ErrorKind::numeric, "boom");
        return {};
    };
    EXPECT_ERROR_KIND(accumulate_errors(labels, 5, 1, 0, 3, run), ErrorKind::numeric);
}

TEST(ErrorProfile, EndToEndIsReproducible) {
    SbmOptions so;
    so.nodes = 45;
    so.classes = 3;
    so.features = 12;
    so.p_in = 0.25;
    const Graph g = make_sbm(so);
    TrainConfig c;
    c.hidden_dim = 6;
    c.mlp_hidden_dim = 4;
    c.pca_dim = 4;
    c.num_epochs = 2;
    c.learning_rate = 1e-2;
    const ErrorProfile a = error_profile(g, c, 3, 2, {}, 1), b = error_profile(g, c, 3, 2, {}, 2);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.run_accuracy, b.run_accuracy);
    const Graph unlabelled = Graph::from_edges("u", 3, {{0, 1}}, FeatureMatrix(3, 2, 1.0f));
    EXPECT_ERROR_KIND(error_profile(unlabelled, c, 3, 2), ErrorKind::protocol);
}

TEST(Experiments, ClusterEmbeddingsIgnoresUnlabelledNodes) {
    std::vector<std::int32_t> labels;
    DenseMatrix x = blobs(10, labels);
    labels[4] = -1;
    const ClusterReport r = cluster_embeddings(x, labels, 3, 5);
    EXPECT_NEAR(r.nmi, 1.0, 1e-12);
    EXPECT_NEAR(r.ari, 1.0, 1e-12);
    EXPECT_ERROR_KIND(cluster_embeddings(x, labels, 1, 5), ErrorKind::protocol);
}

TEST(Experiments, SummarizeUsesPopulationStd) {
    const Summary s = summarize({1.0, 3.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.std, 1.0);
    EXPECT_EQ(summarize({}).mean, 0.0);
}

TEST(Report, RulesCsvHasHeaderAndOneRowPerNode) {
    const Graph g = Graph::from_edges("p", 3, {{0, 1}, {1, 2}}, FeatureMatrix{{1, 0}, {0, 1}, {1, 1}});
    std::ostringstream out;
    write_rules_csv(out, ntsc_breakdown(g), lgtc_breakdown(g.features().cast<double>(), g));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "node_id,degree,d_sum,w,AS,GS,Diff,s");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3u);
    EXPECT_EQ(hex64(0xabc), "0000000000000abc");
}
