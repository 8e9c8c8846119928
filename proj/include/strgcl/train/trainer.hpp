// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strgcl/graph/augment.hpp"
#include "strgcl/graph/graph.hpp"
#include "strgcl/losses/losses.hpp"
#include "strgcl/model/model.hpp"
#include "strgcl/rules/rules.hpp"
#include "strgcl/train/adam.hpp"
#include "strgcl/train/config.hpp"

namespace strgcl {

/// Everything one epoch's loss needs besides the parameters.
struct EpochInputs {
    std::shared_ptr<const SparseCSR> a_hat_1, a_hat_2; // normalized adjacency of each view
    std::shared_ptr<const SparseCSR> x_1, x_2;         // masked features of each view
    const RuleInputs* rules = nullptr;                  // null on the GRACE path
};

struct LossVars {
    ad::Var infonce, total;
    std::optional<ad::Var> rule, cross;
};

/// The full objective on one pair of views. InfoNCE sees projected
/// embeddings; the rule and cross terms see the encoder outputs U, V.
inline LossVars build_loss(ad::Tape& tape, const ad::ParamVars& p, const EpochInputs& in, const TrainConfig& cfg) {
    ad::Var u = ad::gcn_forward(in.a_hat_1, in.x_1, p.encoder);
    ad::Var v = ad::gcn_forward(in.a_hat_2, in.x_2, p.encoder);
    LossVars out;
    out.infonce = ad::infonce(ad::projection(u, p), ad::projection(v, p), cfg.tau);
    out.total = out.infonce;
    if (in.rules != nullptr) {
        ad::Var w_feat = tape.constant(in.rules->rule_features);
        ad::Var ws = tape.constant(in.rules->gate_input);
        ad::Var h_r = ad::scale_rule_repr(ad::param_mlp_forward(ws, p), ad::rule_mlp_forward(w_feat, p));
        out.rule = ad::rule_loss(h_r, cfg.tau_rule);
        out.cross = ad::scale(ad::add(ad::cross_loss(u, h_r), ad::cross_loss(v, h_r)), 0.5);
        out.total = ad::add(out.total, ad::add(ad::scale(*out.rule, cfg.alpha_rule), ad::scale(*out.cross, cfg.alpha_cross)));
    }
    return out;
}

inline ModelDims model_dims(const Graph& g, const TrainConfig& cfg, std::size_t rule_dim) {
    ModelDims d;
    d.input_dim = g.num_features();
    d.hidden_dim = cfg.hidden_dim;
    d.num_layers = cfg.num_layers;
    d.mlp_hidden_dim = cfg.mlp_hidden_dim;
    d.rule_dim = rule_dim;
    d.rule_branch = cfg.method == Method::strgcl;
    return d;
}

inline std::size_t effective_pca_dim(const Graph& g, const TrainConfig& cfg) {
    return std::min<std::size_t>({cfg.pca_dim, g.num_features(), g.n()});
}

struct TrainResult {
    ModelParams params;
    std::vector<LossBreakdown> log;
};

using EpochCallback = std::function<void(const LossBreakdown&)>;

/// Rule inputs are computed once up front; every epoch then draws two fresh
/// views (edges then features, view 1 then view 2) from the augment stream,
/// evaluates the objective and takes one Adam step.
class Trainer {
public:
    Trainer(const Graph& g, TrainConfig cfg) : g_(g), cfg_(std::move(cfg)), aug_(derive_seed(cfg_.seed, kAugmentStream)) {
        cfg_.validate();
        require(g_.n() >= 2, ErrorKind::config, "training needs at least 2 nodes");
        x_ = std::make_shared<const SparseCSR>(SparseCSR::from_dense(g_.features()));
        std::size_t rule_dim = 0;
        if (cfg_.method == Method::strgcl) {
            rules_ = compute_rule_inputs(g_, effective_pca_dim(g_, cfg_));
            rule_dim = rules_->rule_features.cols();
        }
        params_ = init_params(model_dims(g_, cfg_, rule_dim), cfg_.seed);
        params_.visit([&](const std::string& name, DenseMatrix&) { names_.push_back(name); });
    }

    const TrainConfig& config() const noexcept { return cfg_; }
    const ModelParams& params() const noexcept { return params_; }
    const std::vector<LossBreakdown>& log() const noexcept { return log_; }
    const std::optional<RuleInputs>& rules() const noexcept { return rules_; }

    EpochInputs draw_views() {
        EpochInputs in;
        const SparseCSR a1 = drop_edges(g_.adjacency(), cfg_.drop_edge_rate_1, aug_);
        const auto m1 = draw_feature_mask(g_.num_features(), cfg_.drop_feature_rate_1, aug_);
        const SparseCSR a2 = drop_edges(g_.adjacency(), cfg_.drop_edge_rate_2, aug_);
        const auto m2 = draw_feature_mask(g_.num_features(), cfg_.drop_feature_rate_2, aug_);
        in.a_hat_1 = std::make_shared<const SparseCSR>(normalized_adjacency(a1));
        in.a_hat_2 = std::make_shared<const SparseCSR>(normalized_adjacency(a2));
        in.x_1 = std::make_shared<const SparseCSR>(mask_columns(*x_, m1));
        in.x_2 = std::make_shared<const SparseCSR>(mask_columns(*x_, m2));
        in.rules = rules_ ? &*rules_ : nullptr;
        return in;
    }

    const LossBreakdown& step() {
        const std::size_t epoch = log_.size() + 1;
        try {
            const EpochInputs in = draw_views();
            ad::Tape tape;
            const ad::ParamVars vars = ad::bind(tape, params_);
            const LossVars loss = build_loss(tape, vars, in, cfg_);
            LossBreakdown b;
            b.epoch = epoch;
            b.infonce = loss.infonce.scalar();
            b.rule = loss.rule ? loss.rule->scalar() : 0.0;
            b.cross = loss.cross ? loss.cross->scalar() : 0.0;
            b.total = loss.total.scalar();
            require(std::isfinite(b.total), ErrorKind::numeric, "loss is not finite");

            const ad::Gradients grads = tape.backward(loss.total);
            std::vector<DenseMatrix*> ps;
            params_.visit([&](const std::string&, DenseMatrix& m) { ps.push_back(&m); });
            std::vector<DenseMatrix> gs;
            gs.reserve(vars.all.size());
            for (ad::Var leaf : vars.all) gs.push_back(grads.of(leaf));
            adam_step(ps, gs, adam_, cfg_.learning_rate, cfg_.weight_decay, names_);
            log_.push_back(b);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::numeric || e.kind() == ErrorKind::numeric_domain)
                fail(ErrorKind::numeric, "training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
            throw;
        }
        return log_.back();
    }

    TrainResult run(const EpochCallback& on_epoch = {}) {
        while (log_.size() < cfg_.num_epochs) {
            const LossBreakdown& b = step();
            if (on_epoch) on_epoch(b);
        }
        return {params_, log_};
    }

private:
    const Graph& g_;
    TrainConfig cfg_;
    Rng aug_;
    std::shared_ptr<const SparseCSR> x_;
    std::optional<RuleInputs> rules_;
    ModelParams params_;
    std::vector<std::string> names_;
    AdamState adam_;
    std::vector<LossBreakdown> log_;
};

inline TrainResult train(const Graph& g, const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
    return Trainer(g, cfg).run(on_epoch);
}

/// Encoder output on the original graph, before the projection head.
inline DenseMatrix embed(const Graph& g, const ModelParams& params) {
    require(!params.encoder.empty() && params.encoder.front().weight.rows() == g.num_features(), ErrorKind::shape,
            "checkpoint input width does not match the graph's feature count");
    ad::Tape t;
    const auto vars = ad::bind(t, params, false);
    auto a_hat = std::make_shared<const SparseCSR>(normalized_adjacency(g));
    auto x = std::make_shared<const SparseCSR>(SparseCSR::from_dense(g.features()));
    return ad::gcn_forward(a_hat, x, vars.encoder).value();
}

} // namespace strgcl
