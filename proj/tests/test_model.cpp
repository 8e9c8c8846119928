// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "support/testing.hpp"
#include "strgcl/graph/synthetic.hpp"
#include "strgcl/model/model.hpp"

using namespace strgcl;

namespace {

ModelDims dims(bool rules = true, std::size_t layers = 2) {
    ModelDims d;
    d.input_dim = 6;
    d.hidden_dim = 4;
    d.num_layers = layers;
    d.mlp_hidden_dim = 5;
    d.rule_dim = 3;
    d.rule_branch = rules;
    return d;
}

} // namespace

TEST(Init, ShapesFollowLayerWidths) {
    const ModelParams p = init_params(dims(), 1);
    ASSERT_EQ(p.encoder.size(), 2u);
    EXPECT_EQ(p.encoder[0].weight.rows(), 6u);
    EXPECT_EQ(p.encoder[0].weight.cols(), 8u);
    EXPECT_EQ(p.encoder[1].weight.cols(), 4u);
    EXPECT_EQ(p.proj2.weight.cols(), 4u);
    EXPECT_EQ(p.rule1.weight.rows(), 3u);
    EXPECT_EQ(p.rule2.weight.cols(), 4u);
    EXPECT_EQ(p.gate1.weight.rows(), 2u);
    EXPECT_EQ(p.gate2.weight.cols(), 1u);
    EXPECT_EQ(init_params(dims(true, 1), 1).encoder[0].weight.cols(), 4u);
}

TEST(Init, GlorotBoundAndZeroBias) {
    const ModelParams p = init_params(dims(), 3);
    const double a = std::sqrt(6.0 / (6.0 + 8.0));
    for (double w : p.encoder[0].weight.values()) EXPECT_LE(std::abs(w), a);
    for (double b : p.encoder[0].bias.values()) EXPECT_EQ(b, 0.0);
}

TEST(Init, RuleBranchDoesNotPerturbSharedParameters) {
    const ModelParams with = init_params(dims(true), 7), without = init_params(dims(false), 7);
    ASSERT_EQ(with.encoder.size(), without.encoder.size());
    for (std::size_t l = 0; l < with.encoder.size(); ++l) EXPECT_EQ(with.encoder[l].weight, without.encoder[l].weight);
    EXPECT_EQ(with.proj1.weight, without.proj1.weight);
    EXPECT_EQ(with.proj2.weight, without.proj2.weight);
    EXPECT_FALSE(with == without);
}

TEST(Init, BadDimensionsAreConfigErrors) {
    auto d = dims();
    d.num_layers = 3;
    EXPECT_ERROR_KIND(init_params(d, 0), ErrorKind::config);
    d = dims();
    d.hidden_dim = 0;
    EXPECT_ERROR_KIND(init_params(d, 0), ErrorKind::config);
    d = dims();
    d.rule_dim = 0;
    EXPECT_ERROR_KIND(init_params(d, 0), ErrorKind::config);
}

TEST(Forward, OneLayerGcnIsAhatXWPlusBias) {
    const Graph g = Graph::from_edges("g", 3, {{0, 1}, {1, 2}}, FeatureMatrix{{1, 0, 2, 0, 0, 1}, {0, 1, 0, 0, 3, 0},
                                                                              {1, 1, 1, 0, 0, 0}});
    ModelParams p = init_params(dims(false, 1), 5);
    for (auto& b : p.encoder[0].bias.values()) b = 0.25;
    const SparseCSR a = normalized_adjacency(g);
    const DenseMatrix x = g.features().cast<double>();
    DenseMatrix want = matmul(a.densify(), matmul(x, p.encoder[0].weight));
    for (std::size_t i = 0; i < want.rows(); ++i)
        for (std::size_t j = 0; j < want.cols(); ++j) want(i, j) += 0.25;
    EXPECT_LT(max_abs_diff(gcn_forward(a, x, p), want), 1e-14);
}

TEST(Forward, TwoLayerGcnAppliesReluBetweenLayers) {
    SbmOptions o;
    o.nodes = 20;
    o.features = 6;
    const Graph g = make_sbm(o);
    const ModelParams p = init_params(dims(false, 2), 2);
    const DenseMatrix a = normalized_adjacency(g).densify();
    DenseMatrix h = matmul(a, matmul(g.features().cast<double>(), p.encoder[0].weight));
    for (auto& v : h.values()) v = std::max(v, 0.0);
    const DenseMatrix want = matmul(a, matmul(h, p.encoder[1].weight));
    EXPECT_LT(max_abs_diff(gcn_forward(normalized_adjacency(g), g.features().cast<double>(), p), want), 1e-13);
}

TEST(Forward, GateOutputLiesInUnitInterval) {
    const ModelParams p = init_params(dims(), 4);
    const auto q = param_mlp_forward({0.0, 1.0, 5.0, -3.0}, {0.2, 0.0, 0.9, 2.0}, p);
    ASSERT_EQ(q.size(), 4u);
    for (double v : q) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    EXPECT_ERROR_KIND(param_mlp_forward({0.0}, {0.0, 1.0}, p), ErrorKind::shape);
}

TEST(Forward, ScaleRuleReprScalesRows) {
    const DenseMatrix h{{1.0, 2.0}, {3.0, -4.0}};
    const DenseMatrix s = scale_rule_repr({0.5, 2.0}, h);
    EXPECT_EQ(s, (DenseMatrix{{0.5, 1.0}, {6.0, -8.0}}));
    EXPECT_ERROR_KIND(scale_rule_repr({1.0}, h), ErrorKind::shape);
}

TEST(Forward, RuleBranchContractOnGraceModel) {
    const ModelParams p = init_params(dims(false), 1);
    EXPECT_ERROR_KIND(rule_mlp_forward(DenseMatrix(2, 3), p), ErrorKind::contract);
    EXPECT_ERROR_KIND(param_mlp_forward({0.0}, {0.0}, p), ErrorKind::contract);
}

TEST(Forward, RuleMlpWidthMismatch) {
    const ModelParams p = init_params(dims(), 1);
    EXPECT_ERROR_KIND(rule_mlp_forward(DenseMatrix(2, 4), p), ErrorKind::shape);
    EXPECT_EQ(rule_mlp_forward(DenseMatrix(2, 3), p).cols(), 4u);
}
