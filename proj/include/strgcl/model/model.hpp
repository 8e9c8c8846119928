// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "strgcl/autodiff/tape.hpp"
#include "strgcl/linalg/sparse.hpp"
#include "strgcl/random.hpp"

namespace strgcl {

inline constexpr std::uint64_t kParamStream = 1;
inline constexpr std::uint64_t kAugmentStream = 2;
inline constexpr std::uint64_t kRuleParamStream = 3;

struct Linear {
    DenseMatrix weight; // in x out
    DenseMatrix bias;   // 1 x out
};

struct ModelDims {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0; // F', the embedding width
    std::size_t num_layers = 2;
    std::size_t mlp_hidden_dim = 0;
    std::size_t rule_dim = 0; // PCA width k
    bool rule_branch = true;
};

/// Encoder, projection head and (optionally) the rule and gating MLPs.
struct ModelParams {
    std::vector<Linear> encoder;
    Linear proj1, proj2;
    Linear rule1, rule2;
    Linear gate1, gate2;
    bool rule_branch = false;

    /// Calls f(name, DenseMatrix&) for every parameter in a fixed order.
    template <class F>
    void visit(F&& f) {
        for (std::size_t l = 0; l < encoder.size(); ++l) {
            f("encoder." + std::to_string(l) + ".weight", encoder[l].weight);
            f("encoder." + std::to_string(l) + ".bias", encoder[l].bias);
        }
        auto lin = [&](const char* name, Linear& p) {
            f(std::string(name) + ".weight", p.weight);
            f(std::string(name) + ".bias", p.bias);
        };
        lin("proj.0", proj1);
        lin("proj.1", proj2);
        if (rule_branch) {
            lin("rule_mlp.0", rule1);
            lin("rule_mlp.1", rule2);
            lin("param_mlp.0", gate1);
            lin("param_mlp.1", gate2);
        }
    }
    template <class F>
    void visit(F&& f) const {
        const_cast<ModelParams*>(this)->visit([&](const std::string& name, DenseMatrix& m) {
            f(name, static_cast<const DenseMatrix&>(m));
        });
    }

    std::size_t embedding_dim() const { return encoder.empty() ? 0 : encoder.back().weight.cols(); }

    friend bool operator==(const ModelParams& a, const ModelParams& b) {
        std::vector<const DenseMatrix*> pa, pb;
        a.visit([&](const std::string&, const DenseMatrix& m) { pa.push_back(&m); });
        b.visit([&](const std::string&, const DenseMatrix& m) { pb.push_back(&m); });
        if (pa.size() != pb.size()) return false;
        for (std::size_t i = 0; i < pa.size(); ++i)
            if (!(*pa[i] == *pb[i])) return false;
        return true;
    }
};

/// Glorot-uniform weights in ±sqrt(6 / (fan_in + fan_out)), zero bias.
inline Linear glorot_linear(std::size_t in, std::size_t out, Rng& rng) {
    require(in > 0 && out > 0, ErrorKind::config,
            "layer dimensions must be positive, got " + std::to_string(in) + "->" + std::to_string(out));
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    Linear l{DenseMatrix(in, out), DenseMatrix(1, out)};
    for (auto& w : l.weight.values()) w = rng.uniform(-a, a);
    return l;
}

/// Encoder widths follow F -> 2F' -> F' for two layers and F -> F' for one.
/// Rule-branch parameters come from their own stream, so the encoder and
/// projection head are identical with or without the branch.
inline ModelParams init_params(const ModelDims& d, std::uint64_t seed) {
    require(d.num_layers == 1 || d.num_layers == 2, ErrorKind::config, "num_layers must be 1 or 2");
    require(d.hidden_dim > 0, ErrorKind::config, "hidden_dim must be positive");
    ModelParams p;
    p.rule_branch = d.rule_branch;
    Rng rng(derive_seed(seed, kParamStream));
    if (d.num_layers == 2) {
        p.encoder.push_back(glorot_linear(d.input_dim, 2 * d.hidden_dim, rng));
        p.encoder.push_back(glorot_linear(2 * d.hidden_dim, d.hidden_dim, rng));
    } else {
        p.encoder.push_back(glorot_linear(d.input_dim, d.hidden_dim, rng));
    }
    p.proj1 = glorot_linear(d.hidden_dim, d.hidden_dim, rng);
    p.proj2 = glorot_linear(d.hidden_dim, d.hidden_dim, rng);
    if (d.rule_branch) {
        require(d.mlp_hidden_dim > 0, ErrorKind::config, "mlp_hidden_dim must be positive");
        Rng rr(derive_seed(seed, kRuleParamStream));
        p.rule1 = glorot_linear(d.rule_dim, d.mlp_hidden_dim, rr);
        p.rule2 = glorot_linear(d.mlp_hidden_dim, d.hidden_dim, rr);
        p.gate1 = glorot_linear(2, d.mlp_hidden_dim, rr);
        p.gate2 = glorot_linear(d.mlp_hidden_dim, 1, rr);
    }
    return p;
}

namespace ad {

struct LinearVar {
    Var weight, bias;
};

/// Parameter leaves of one forward pass, in ModelParams::visit order.
struct ParamVars {
    std::vector<LinearVar> encoder;
    LinearVar proj1, proj2, rule1, rule2, gate1, gate2;
    std::vector<Var> all;
};

inline ParamVars bind(Tape& tape, const ModelParams& p, bool track = true) {
    ParamVars v;
    std::vector<Var> leaves;
    p.visit([&](const std::string&, const DenseMatrix& m) {
        leaves.push_back(track ? tape.variable(m) : tape.constant(m));
    });
    std::size_t k = 0;
    auto take = [&] {
        LinearVar l{leaves[k], leaves[k + 1]};
        k += 2;
        return l;
    };
    for (std::size_t l = 0; l < p.encoder.size(); ++l) v.encoder.push_back(take());
    v.proj1 = take();
    v.proj2 = take();
    if (p.rule_branch) {
        v.rule1 = take();
        v.rule2 = take();
        v.gate1 = take();
        v.gate2 = take();
    }
    v.all = std::move(leaves);
    return v;
}

inline Var linear(Var x, const LinearVar& l) { return add_row_broadcast(matmul(x, l.weight), l.bias); }

/// relu(Â·X·W + b) on hidden layers, no activation on the last. The input
/// features are sparse, so the first product is spmm(X, W).
inline Var gcn_forward(const std::shared_ptr<const SparseCSR>& a_hat, const std::shared_ptr<const SparseCSR>& x,
                       const std::vector<LinearVar>& layers) {
    require(!layers.empty(), ErrorKind::shape, "encoder has no layers");
    require(x->cols() == layers[0].weight.rows(), ErrorKind::shape,
            "encoder input width " + std::to_string(x->cols()) + " != " + std::to_string(layers[0].weight.rows()));
    require(a_hat->cols() == x->rows(), ErrorKind::shape, "adjacency and features disagree on node count");
    Var h = add_row_broadcast(spmm(a_hat, spmm(x, layers[0].weight)), layers[0].bias);
    for (std::size_t l = 1; l < layers.size(); ++l) {
        h = relu(h);
        h = add_row_broadcast(spmm(a_hat, matmul(h, layers[l].weight)), layers[l].bias);
    }
    return h;
}

inline Var projection(Var h, const ParamVars& p) { return linear(relu(linear(h, p.proj1)), p.proj2); }

inline Var rule_mlp_forward(Var w_feat, const ParamVars& p) { return linear(relu(linear(w_feat, p.rule1)), p.rule2); }

/// q = σ(MLP_param([w, s])) as an N x 1 column.
inline Var param_mlp_forward(Var ws, const ParamVars& p) { return sigmoid(linear(relu(linear(ws, p.gate1)), p.gate2)); }

inline Var scale_rule_repr(Var q, Var h_r_prime) { return scale_rows(q, h_r_prime); }

} // namespace ad

// Value-only forms. They run the same tape code with constant leaves.

inline DenseMatrix gcn_forward(const SparseCSR& a_hat, const DenseMatrix& x, const ModelParams& p) {
    ad::Tape t;
    const auto vars = ad::bind(t, p, false);
    auto a = std::make_shared<const SparseCSR>(a_hat);
    auto xs = std::make_shared<const SparseCSR>(SparseCSR::from_dense(x));
    return ad::gcn_forward(a, xs, vars.encoder).value();
}

inline DenseMatrix rule_mlp_forward(const DenseMatrix& w_feat, const ModelParams& p) {
    require(p.rule_branch, ErrorKind::contract, "model has no rule branch");
    require(w_feat.cols() == p.rule1.weight.rows(), ErrorKind::shape, "rule features width mismatch");
    ad::Tape t;
    const auto vars = ad::bind(t, p, false);
    return ad::rule_mlp_forward(t.constant(w_feat), vars).value();
}

inline std::vector<double> param_mlp_forward(const std::vector<double>& w, const std::vector<double>& s,
                                             const ModelParams& p) {
    require(p.rule_branch, ErrorKind::contract, "model has no rule branch");
    require(w.size() == s.size(), ErrorKind::shape, "w and s lengths differ");
    DenseMatrix ws(w.size(), 2);
    for (std::size_t i = 0; i < w.size(); ++i) {
        ws(i, 0) = w[i];
        ws(i, 1) = s[i];
    }
    ad::Tape t;
    const auto vars = ad::bind(t, p, false);
    const DenseMatrix q = ad::param_mlp_forward(t.constant(ws), vars).value();
    return {q.values().begin(), q.values().end()};
}

inline DenseMatrix scale_rule_repr(const std::vector<double>& q, const DenseMatrix& h) {
    require(q.size() == h.rows(), ErrorKind::shape, "scale_rule_repr: q length != rows");
    DenseMatrix out = h;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= q[i];
    return out;
}

} // namespace strgcl
