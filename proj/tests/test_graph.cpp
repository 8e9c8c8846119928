// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "support/testing.hpp"
#include "strgcl/graph/augment.hpp"
#include "strgcl/graph/graph.hpp"
#include "strgcl/graph/synthetic.hpp"

using namespace strgcl;

namespace {

Graph sbm(std::size_t n = 80, std::uint64_t seed = 4) {
    SbmOptions o;
    o.nodes = n;
    o.classes = 4;
    o.features = 20;
    o.p_in = 0.2;
    o.seed = seed;
    return make_sbm(o);
}

bool symmetric(const SparseCSR& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t p = a.row_begin(i); p < a.row_end(i); ++p)
            if (a.at(a.col_idx()[p], i) != a.values()[p]) return false;
    return true;
}

} // namespace

TEST(Graph, FromEdgesSymmetrizesAndDropsSelfLoops) {
    const Graph g = Graph::from_edges("g", 3, {{0, 1}, {1, 0}, {2, 2}, {1, 2}}, FeatureMatrix(3, 1));
    EXPECT_EQ(g.num_directed_edges(), 4u);
    EXPECT_EQ(g.degree(1), 2u);
    EXPECT_TRUE(symmetric(g.adjacency()));
    EXPECT_FALSE(g.has_labels());
}

TEST(Graph, ValidationErrors) {
    EXPECT_ERROR_KIND(Graph::from_edges("g", 2, {{0, 2}}, FeatureMatrix(2, 1)), ErrorKind::shape);
    EXPECT_ERROR_KIND(Graph::from_edges("g", 2, {{0, 1}}, FeatureMatrix(3, 1)), ErrorKind::shape);
    EXPECT_ERROR_KIND(Graph::from_edges("g", 2, {{0, 1}}, FeatureMatrix(2, 1), {0, 2}, 2), ErrorKind::shape);
    const SparseCSR one_way(2, 2, {0, 1, 1}, {1}, {1.0});
    EXPECT_ERROR_KIND(Graph("g", one_way, FeatureMatrix(2, 1)), ErrorKind::shape);
}

TEST(NormalizedAdjacency, RowsOfRegularGraphSumToOne) {
    const Graph g = Graph::from_edges("c", 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}, FeatureMatrix(5, 1));
    const DenseMatrix a = normalized_adjacency(g).densify();
    for (std::size_t i = 0; i < 5; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 5; ++j) s += a(i, j);
        EXPECT_NEAR(s, 1.0, 1e-15);
        EXPECT_NEAR(a(i, i), 1.0 / 3.0, 1e-15);
    }
}

TEST(NormalizedAdjacency, IsolatedNodeGetsUnitSelfLoop) {
    const Graph g = Graph::from_edges("g", 3, {{0, 1}}, FeatureMatrix(3, 1));
    const SparseCSR a = normalized_adjacency(g);
    EXPECT_DOUBLE_EQ(a.at(2, 2), 1.0);
    EXPECT_EQ(a.row_nnz(2), 1u);
    EXPECT_TRUE(symmetric(a));
}

TEST(Augment, DropEdgesKeepsSymmetryAndSubset) {
    const Graph g = sbm();
    Rng rng(8);
    for (double p : {0.0, 0.3, 0.7, 1.0}) {
        const SparseCSR d = drop_edges(g.adjacency(), p, rng);
        EXPECT_TRUE(symmetric(d));
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t q = d.row_begin(i); q < d.row_end(i); ++q) EXPECT_EQ(g.adjacency().at(i, d.col_idx()[q]), 1.0);
        if (p == 0.0) {
            EXPECT_EQ(d, g.adjacency());
        }
        if (p == 1.0) {
            EXPECT_EQ(d.nnz(), 0u);
        }
    }
}

TEST(Augment, DropRateIsRoughlyHonoured) {
    const Graph g = sbm(300, 2);
    Rng rng(3);
    const double kept = static_cast<double>(drop_edges(g.adjacency(), 0.3, rng).nnz()) / g.num_directed_edges();
    EXPECT_NEAR(kept, 0.7, 0.05);
}

TEST(Augment, MaskZeroesWholeColumns) {
    const Graph g = sbm();
    Rng rng(6);
    const auto mask = draw_feature_mask(g.num_features(), 0.5, rng);
    const DenseMatrix x = mask_columns(SparseCSR::from_dense(g.features()), mask).densify();
    for (std::size_t j = 0; j < g.num_features(); ++j)
        for (std::size_t i = 0; i < g.n(); ++i)
            EXPECT_EQ(x(i, j), mask[j] ? 0.0 : static_cast<double>(g.features()(i, j)));
}

TEST(Augment, RatesOutsideUnitIntervalAreConfigErrors) {
    const Graph g = sbm();
    Rng rng(1);
    EXPECT_ERROR_KIND(drop_edges(g.adjacency(), -0.1, rng), ErrorKind::config);
    EXPECT_ERROR_KIND(drop_edges(g.adjacency(), 1.5, rng), ErrorKind::config);
    EXPECT_ERROR_KIND(draw_feature_mask(4, 2.0, rng), ErrorKind::config);
}

TEST(Augment, SameSeedSameView) {
    const Graph g = sbm();
    Rng a(42), b(42);
    EXPECT_EQ(drop_edges(g.adjacency(), 0.4, a), drop_edges(g.adjacency(), 0.4, b));
    EXPECT_EQ(draw_feature_mask(20, 0.4, a), draw_feature_mask(20, 0.4, b));
}

TEST(Synthetic, SbmIsDeterministicAndLabelled) {
    const Graph a = sbm(), b = sbm();
    EXPECT_EQ(a.adjacency(), b.adjacency());
    EXPECT_EQ(a.features(), b.features());
    EXPECT_EQ(a.labels(), b.labels());
    EXPECT_TRUE(a.has_labels());
    EXPECT_EQ(a.num_classes(), 4u);
    EXPECT_NE(sbm(80, 5).adjacency(), a.adjacency());
}
