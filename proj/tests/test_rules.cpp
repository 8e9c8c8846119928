// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "support/testing.hpp"
#include "strgcl/graph/synthetic.hpp"
#include "strgcl/rules/pca.hpp"
#include "strgcl/rules/rules.hpp"

using namespace strgcl;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    DenseMatrix m(r, c);
    for (auto& v : m.values()) v = rng.uniform(-1.0, 1.0);
    return m;
}

Graph sbm(std::uint64_t seed = 2) {
    SbmOptions o;
    o.nodes = 90;
    o.classes = 3;
    o.features = 30;
    o.p_in = 0.15;
    o.seed = seed;
    return make_sbm(o);
}

} // namespace

TEST(Pca, MatchesDenseEigendecomposition) {
    const DenseMatrix x = random_matrix(60, 12, 17);
    const PcaModel m = pca_fit(x, 4);
    const DenseMatrix cov = covariance(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(
        cov.data(), 12, 12));
    for (std::size_t c = 0; c < 4; ++c) {
        const Eigen::Index col = 11 - static_cast<Eigen::Index>(c);
        EXPECT_NEAR(m.eigenvalues[c], es.eigenvalues()(col), 1e-8 * es.eigenvalues()(11));
        double dot = 0.0;
        for (std::size_t j = 0; j < 12; ++j) dot += m.components(c, j) * es.eigenvectors()(static_cast<Eigen::Index>(j), col);
        EXPECT_NEAR(std::abs(dot), 1.0, 1e-6);
    }
}

TEST(Pca, ComponentsAreOrthonormalAndEigenvaluesSorted) {
    const PcaModel m = pca_fit(random_matrix(40, 10, 3), 6);
    for (std::size_t a = 0; a < 6; ++a) {
        for (std::size_t b = 0; b < 6; ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < 10; ++j) dot += m.components(a, j) * m.components(b, j);
            EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-10);
        }
        if (a > 0) {
            EXPECT_GE(m.eigenvalues[a - 1], m.eigenvalues[a]);
        }
    }
}

TEST(Pca, TransformIsCentered) {
    const DenseMatrix x = random_matrix(30, 8, 5);
    const DenseMatrix y = pca_transform(pca_fit(x, 3), x);
    const DenseMatrix mu = column_mean(y);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(mu(0, j), 0.0, 1e-12);
}

TEST(Pca, ConstantDataHasZeroVariance) {
    const PcaModel m = pca_fit(DenseMatrix(10, 4, 2.5), 2);
    for (double e : m.eigenvalues) EXPECT_NEAR(e, 0.0, 1e-12);
    const DenseMatrix y = pca_transform(m, DenseMatrix(10, 4, 2.5));
    for (double v : y.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Pca, ErrorPaths) {
    EXPECT_ERROR_KIND(pca_fit(random_matrix(1, 4, 1), 1), ErrorKind::config);
    EXPECT_ERROR_KIND(pca_fit(random_matrix(10, 4, 1), 5), ErrorKind::config);
    EXPECT_ERROR_KIND(pca_fit(random_matrix(10, 4, 1), 0), ErrorKind::config);
    const PcaModel m = pca_fit(random_matrix(10, 4, 1), 2);
    EXPECT_ERROR_KIND(pca_transform(m, random_matrix(3, 5, 2)), ErrorKind::shape);
}

TEST(Ntsc, WeightsAreNonNegativeWithZeroMinimum) {
    const Graph g = sbm();
    const auto b = ntsc_breakdown(g);
    EXPECT_NEAR(*std::min_element(b.w.begin(), b.w.end()), 0.0, 0.0);
    for (std::size_t i = 0; i < g.n(); ++i) {
        EXPECT_GE(b.w[i], 0.0);
        double s = 0.0;
        for (std::size_t p = g.adjacency().row_begin(i); p < g.adjacency().row_end(i); ++p)
            s += static_cast<double>(g.degree(g.adjacency().col_idx()[p]));
        EXPECT_EQ(b.d_sum[i], s);
    }
}

TEST(Ntsc, SparserNeighbourhoodsWeighMore) {
    // Path 0-1-2-3: d_sum = [2, 3, 3, 2].
    const Graph path = Graph::from_edges("p", 4, {{0, 1}, {1, 2}, {2, 3}}, FeatureMatrix(4, 1));
    const auto w = ntsc_weights(path);
    EXPECT_DOUBLE_EQ(w[0], std::log(4.0) - std::log(3.0));
    EXPECT_DOUBLE_EQ(w[1], 0.0);
    EXPECT_DOUBLE_EQ(w[3], w[0]);
    // Star: hub and leaves all have d_sum = 4.
    const Graph star = Graph::from_edges("star", 5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, FeatureMatrix(5, 1));
    for (double x : ntsc_weights(star)) EXPECT_DOUBLE_EQ(x, 0.0);
}

TEST(Lgtc, MatchesBruteForceCosines) {
    const Graph g = sbm(7);
    const DenseMatrix z = random_matrix(g.n(), 5, 11);
    const auto b = lgtc_breakdown(z, g);
    const DenseMatrix c = cosine_similarity_matrix(z);
    for (std::size_t i = 0; i < g.n(); ++i) {
        double gs = 0.0;
        for (std::size_t j = 0; j < g.n(); ++j)
            if (j != i) gs += c(i, j);
        gs /= static_cast<double>(g.n() - 1);
        EXPECT_NEAR(b.gs[i], gs, 1e-12);
        EXPECT_GE(b.diff[i], -1e-12);
        EXPECT_LE(b.diff[i], 1.0 + 1e-12);
        EXPECT_GE(b.s[i], 0.0);
    }
}

TEST(Lgtc, IsolatedNodeUsesGlobalSimilarity) {
    const Graph g = Graph::from_edges("g", 4, {{0, 1}, {1, 2}}, FeatureMatrix(4, 1));
    const auto b = lgtc_breakdown(random_matrix(4, 3, 2), g);
    EXPECT_DOUBLE_EQ(b.as[3], b.gs[3]);
    EXPECT_DOUBLE_EQ(b.diff[3], 0.5);
}

TEST(Lgtc, RowMismatchIsShapeError) {
    const Graph g = sbm();
    EXPECT_ERROR_KIND(lgtc_breakdown(random_matrix(g.n() + 1, 3, 1), g), ErrorKind::shape);
}

TEST(RuleInputs, GateInputStacksWeights) {
    const Graph g = sbm();
    const RuleInputs r = compute_rule_inputs(g, 8);
    EXPECT_EQ(r.rule_features.rows(), g.n());
    EXPECT_EQ(r.rule_features.cols(), 8u);
    for (std::size_t i = 0; i < g.n(); ++i) {
        EXPECT_EQ(r.gate_input(i, 0), r.weights.w[i]);
        EXPECT_EQ(r.gate_input(i, 1), r.weights.s[i]);
    }
    EXPECT_EQ(default_pca_dim(g), 30u);
}
