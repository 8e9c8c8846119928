// SPDX-License-Identifier: Apache-2.0
#pragma once

// Randomized property suite. Every check compares the library against an
// independent, deliberately naive oracle (dense loops, explicit pair sums)
// or against an algebraic identity.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "strgcl/autodiff/grad_check.hpp"
#include "strgcl/eval/metrics.hpp"
#include "strgcl/eval/probe.hpp"
#include "strgcl/graph/augment.hpp"
#include "strgcl/graph/synthetic.hpp"
#include "strgcl/losses/losses.hpp"
#include "strgcl/rules/rules.hpp"
#include "strgcl/train/trainer.hpp"

namespace strgcl::selfcheck {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;  // worst error, or the observed quantity
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
};

struct Check {
    std::string name;
    std::function<CheckResult()> run;
};

namespace oracle {

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long double s = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
            c(i, j) = static_cast<double>(s);
        }
    return c;
}

inline DenseMatrix dense_adjacency(const Graph& g) {
    DenseMatrix a(g.n(), g.n());
    for (std::size_t i = 0; i < g.n(); ++i)
        for (std::size_t p = g.adjacency().row_begin(i); p < g.adjacency().row_end(i); ++p) a(i, g.adjacency().col_idx()[p]) = 1.0;
    return a;
}

inline double cosine(const DenseMatrix& x, std::size_t i, std::size_t j) {
    double dot = 0, ni = 0, nj = 0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        dot += x(i, c) * x(j, c);
        ni += x(i, c) * x(i, c);
        nj += x(j, c) * x(j, c);
    }
    if (ni == 0 || nj == 0) return 0.0;
    return dot / (std::sqrt(ni) * std::sqrt(nj));
}

inline std::vector<double> ntsc(const Graph& g) {
    const DenseMatrix a = dense_adjacency(g);
    const std::size_t n = g.n();
    std::vector<double> deg(n, 0), h(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) deg[i] += a(i, j);
    for (std::size_t i = 0; i < n; ++i) {
        double ds = 0;
        for (std::size_t j = 0; j < n; ++j) ds += a(i, j) * deg[j];
        h[i] = std::log(1.0 + ds);
    }
    const double hmax = *std::max_element(h.begin(), h.end());
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = hmax - h[i];
    return w;
}

/// AS, GS, Diff, s by explicit loops over node pairs.
inline LgtcBreakdown lgtc(const DenseMatrix& x, const Graph& g) {
    const DenseMatrix a = dense_adjacency(g);
    const std::size_t n = g.n();
    LgtcBreakdown out;
    out.as.resize(n);
    out.gs.resize(n);
    out.diff.resize(n);
    out.s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double gsum = 0, asum = 0;
        std::size_t deg = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double c = cosine(x, i, j);
            gsum += c;
            if (a(i, j) != 0) {
                asum += c;
                ++deg;
            }
        }
        out.gs[i] = n > 1 ? gsum / static_cast<double>(n - 1) : 0.0;
        out.as[i] = deg ? asum / static_cast<double>(deg) : out.gs[i];
        out.diff[i] = (out.as[i] - out.gs[i] + 1.0) / 2.0;
    }
    const double m = *std::max_element(out.diff.begin(), out.diff.end());
    for (std::size_t i = 0; i < n; ++i) out.s[i] = m - out.diff[i];
    return out;
}

inline double cosine_pair(const DenseMatrix& a, std::size_t i, const DenseMatrix& b, std::size_t j) {
    double dot = 0, ni = 0, nj = 0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        dot += a(i, c) * b(j, c);
        ni += a(i, c) * a(i, c);
        nj += b(j, c) * b(j, c);
    }
    if (ni == 0 || nj == 0) return 0.0;
    return dot / (std::sqrt(ni) * std::sqrt(nj));
}

/// Direct transcription of the per-node contrastive log-ratio, both views.
inline double infonce(const DenseMatrix& u, const DenseMatrix& v, double tau) {
    const std::size_t n = u.rows();
    auto view_loss = [&](const DenseMatrix& a, const DenseMatrix& b) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pos = std::exp(cosine_pair(a, i, b, i) / tau);
            double den = 0;
            for (std::size_t k = 0; k < n; ++k) {
                den += std::exp(cosine_pair(a, i, b, k) / tau);
                if (k != i) den += std::exp(cosine_pair(a, i, a, k) / tau);
            }
            total += -std::log(pos / den);
        }
        return total / static_cast<double>(n);
    };
    return 0.5 * (view_loss(u, v) + view_loss(v, u));
}

inline double rule_loss(const DenseMatrix& h, double tau) {
    const std::size_t n = h.rows();
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double den = 0;
        for (std::size_t j = 0; j < n; ++j) den += std::exp(cosine_pair(h, i, h, j) / tau);
        total += -std::log(std::exp(cosine_pair(h, i, h, i) / tau) / den);
    }
    return total / static_cast<double>(n);
}

inline double cross_loss(const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t n = a.rows(), d = a.cols();
    auto mean = [&](const DenseMatrix& m, std::size_t j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += m(i, j);
        return s / static_cast<double>(n);
    };
    auto cov = [&](const DenseMatrix& m, std::size_t j, std::size_t k) {
        const double mj = mean(m, j), mk = mean(m, k);
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += (m(i, j) - mj) * (m(i, k) - mk);
        return s / static_cast<double>(n - 1);
    };
    double mm = 0, mc = 0;
    for (std::size_t j = 0; j < d; ++j) mm += std::pow(mean(a, j) - mean(b, j), 2);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) mc += std::pow(cov(a, j, k) - cov(b, j, k), 2);
    return mm / static_cast<double>(d) + mc / static_cast<double>(d * d);
}

/// ARI from pair counting over all N(N-1)/2 pairs and NMI from the joint
/// distribution written out with maps.
inline ClusteringScores clustering(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
    const std::size_t n = a.size();
    double both = 0, only_a = 0, only_b = 0, neither = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool sa = a[i] == a[j], sb = b[i] == b[j];
            if (sa && sb) ++both;
            else if (sa) ++only_a;
            else if (sb) ++only_b;
            else ++neither;
        }
    const double pairs = both + only_a + only_b + neither;
    const double pa = both + only_a, pb = both + only_b;
    const double expected = pairs > 0 ? pa * pb / pairs : 0;
    const double maxi = 0.5 * (pa + pb);
    ClusteringScores s;
    s.ari = maxi == expected ? 1.0 : (both - expected) / (maxi - expected);

    std::map<std::pair<std::int32_t, std::int32_t>, double> joint;
    std::map<std::int32_t, double> ma, mb;
    for (std::size_t i = 0; i < n; ++i) {
        joint[{a[i], b[i]}] += 1.0;
        ma[a[i]] += 1.0;
        mb[b[i]] += 1.0;
    }
    const double nn = static_cast<double>(n);
    double mi = 0, ha = 0, hb = 0;
    for (const auto& [k, c] : joint) mi += (c / nn) * std::log((c / nn) / ((ma[k.first] / nn) * (mb[k.second] / nn)));
    for (const auto& [k, c] : ma) ha -= (c / nn) * std::log(c / nn);
    for (const auto& [k, c] : mb) hb -= (c / nn) * std::log(c / nn);
    s.nmi = (ha + hb) > 0 ? mi / (0.5 * (ha + hb)) : 1.0;
    return s;
}

} // namespace oracle

namespace detail {

inline DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0, double hi = 1.0) {
    DenseMatrix m(r, c);
    for (auto& v : m.values()) v = rng.uniform(lo, hi);
    return m;
}

inline SparseCSR random_csr(std::size_t r, std::size_t c, double density, Rng& rng) {
    DenseMatrix d(r, c);
    for (auto& v : d.values())
        if (rng.bernoulli(density)) v = rng.uniform(-2.0, 2.0);
    return SparseCSR::from_dense(d);
}

inline Graph random_graph(std::size_t n, double p, std::size_t f, Rng& rng, bool nonnegative = false) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    FeatureMatrix x(n, f);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.bernoulli(0.05)) continue; // occasional all-zero row
        for (std::size_t j = 0; j < f; ++j)
            x(i, j) = static_cast<float>(nonnegative ? rng.uniform(0.0, 1.0) : rng.uniform(-1.0, 1.0));
    }
    return Graph::from_edges("random", n, edges, std::move(x));
}

inline Graph permute_graph(const Graph& g, const std::vector<std::uint32_t>& perm) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < g.n(); ++i)
        for (std::size_t p = g.adjacency().row_begin(i); p < g.adjacency().row_end(i); ++p)
            edges.emplace_back(perm[i], perm[g.adjacency().col_idx()[p]]);
    FeatureMatrix x(g.n(), g.num_features());
    for (std::size_t i = 0; i < g.n(); ++i)
        for (std::size_t j = 0; j < g.num_features(); ++j) x(perm[i], j) = g.features()(i, j);
    return Graph::from_edges(g.name(), g.n(), edges, std::move(x));
}

inline std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(p));
    return p;
}

inline double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline CheckResult result(std::string name, double measured, double tol, std::string detail = {}) {
    return {std::move(name), measured <= tol, measured, tol, std::move(detail), 0.0};
}

/// Scalar readout sum(op(x) ∘ R) with a fixed random R, so one grad check
/// covers the whole Jacobian of a matrix-valued op.
inline ad::Var readout(ad::Tape& t, ad::Var y, std::uint64_t seed) {
    Rng rng(seed);
    return ad::sum(ad::hadamard(y, t.constant(random_matrix(y.rows(), y.cols(), rng))));
}

} // namespace detail

struct OpCase {
    std::string name;
    std::vector<DenseMatrix> inputs;
    std::function<ad::Var(ad::Tape&, std::span<const ad::Var>)> op;
};

/// One case per differentiable tape operation.
inline std::vector<OpCase> op_cases(std::uint64_t seed) {
    using namespace ad;
    Rng rng(seed);
    auto R = [&](std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
        return detail::random_matrix(r, c, rng, lo, hi);
    };
    auto sp = std::make_shared<const SparseCSR>(detail::random_csr(5, 4, 0.5, rng));
    // relu inputs kept away from the kink so central differences apply
    DenseMatrix away = R(4, 3);
    for (auto& v : away.values()) v = v >= 0 ? v + 0.1 : v - 0.1;
    std::vector<OpCase> c;
    c.push_back({"gemm_nn", {R(3, 4), R(4, 2)}, [](Tape&, std::span<const Var> p) { return gemm(p[0], Trans::no, p[1], Trans::no, 0.7); }});
    c.push_back({"gemm_nt", {R(3, 4), R(2, 4)}, [](Tape&, std::span<const Var> p) { return gemm(p[0], Trans::no, p[1], Trans::yes); }});
    c.push_back({"gemm_tn", {R(4, 3), R(4, 2)}, [](Tape&, std::span<const Var> p) { return gemm(p[0], Trans::yes, p[1], Trans::no); }});
    c.push_back({"gemm_tt", {R(4, 3), R(2, 4)}, [](Tape&, std::span<const Var> p) { return gemm(p[0], Trans::yes, p[1], Trans::yes, -1.3); }});
    c.push_back({"spmm", {R(4, 3)}, [sp](Tape&, std::span<const Var> p) { return spmm(sp, p[0]); }});
    c.push_back({"add", {R(3, 3), R(3, 3)}, [](Tape&, std::span<const Var> p) { return add(p[0], p[1]); }});
    c.push_back({"sub", {R(3, 3), R(3, 3)}, [](Tape&, std::span<const Var> p) { return sub(p[0], p[1]); }});
    c.push_back({"hadamard", {R(3, 2), R(3, 2)}, [](Tape&, std::span<const Var> p) { return hadamard(p[0], p[1]); }});
    c.push_back({"add_row_broadcast", {R(4, 3), R(1, 3)}, [](Tape&, std::span<const Var> p) { return add_row_broadcast(p[0], p[1]); }});
    c.push_back({"relu", {away}, [](Tape&, std::span<const Var> p) { return relu(p[0]); }});
    c.push_back({"sigmoid", {R(3, 3, -3, 3)}, [](Tape&, std::span<const Var> p) { return sigmoid(p[0]); }});
    c.push_back({"exp", {R(3, 3)}, [](Tape&, std::span<const Var> p) { return exp(p[0]); }});
    c.push_back({"log", {R(3, 3, 0.5, 2.0)}, [](Tape&, std::span<const Var> p) { return log(p[0]); }});
    c.push_back({"log1p", {R(3, 3, -0.5, 2.0)}, [](Tape&, std::span<const Var> p) { return log1p(p[0]); }});
    c.push_back({"scale", {R(3, 3)}, [](Tape&, std::span<const Var> p) { return scale(p[0], -2.5); }});
    c.push_back({"shift", {R(3, 3)}, [](Tape&, std::span<const Var> p) { return shift(p[0], 0.75); }});
    c.push_back({"square", {R(3, 3)}, [](Tape&, std::span<const Var> p) { return square(p[0]); }});
    c.push_back({"row_normalize", {R(4, 3)}, [](Tape&, std::span<const Var> p) { return row_normalize(p[0]); }});
    c.push_back({"row_sum", {R(4, 3)}, [](Tape&, std::span<const Var> p) { return row_sum(p[0]); }});
    c.push_back({"col_sum", {R(4, 3)}, [](Tape&, std::span<const Var> p) { return col_sum(p[0], 0.3); }});
    c.push_back({"col_mean", {R(4, 3)}, [](Tape&, std::span<const Var> p) { return col_mean(p[0]); }});
    c.push_back({"sum", {R(4, 3)}, [](Tape&, std::span<const Var> p) { return sum(p[0], 2.0); }});
    c.push_back({"mean", {R(4, 3)}, [](Tape&, std::span<const Var> p) { return mean(p[0]); }});
    c.push_back({"diag", {R(4, 4)}, [](Tape&, std::span<const Var> p) { return diag(p[0]); }});
    c.push_back({"transpose", {R(2, 5)}, [](Tape&, std::span<const Var> p) { return transpose(p[0]); }});
    c.push_back({"covariance", {R(6, 3)}, [](Tape&, std::span<const Var> p) { return covariance(p[0]); }});
    c.push_back({"concat_cols", {R(3, 2), R(3, 4)}, [](Tape&, std::span<const Var> p) { return concat_cols(p[0], p[1]); }});
    c.push_back({"slice_cols", {R(3, 5)}, [](Tape&, std::span<const Var> p) { return slice_cols(p[0], 1, 4); }});
    c.push_back({"scale_rows", {R(4, 1), R(4, 3)}, [](Tape&, std::span<const Var> p) { return scale_rows(p[0], p[1]); }});
    c.push_back({"gram", {R(4, 3)}, [](Tape&, std::span<const Var> p) { return gram(p[0], 1.7); }});
    c.push_back({"row_logsumexp", {R(4, 5, -2, 2)}, [](Tape&, std::span<const Var> p) { return row_logsumexp(p[0]); }});
    c.push_back({"row_logsumexp_skip_diag", {R(4, 4, -2, 2)}, [](Tape&, std::span<const Var> p) { return row_logsumexp(p[0], true); }});
    c.push_back({"logaddexp", {R(4, 2, -3, 3), R(4, 2, -3, 3)}, [](Tape&, std::span<const Var> p) { return logaddexp(p[0], p[1]); }});
    c.push_back({"row_dot", {R(4, 3), R(4, 3)}, [](Tape&, std::span<const Var> p) { return row_dot(p[0], p[1], 0.5); }});
    return c;
}

/// Small full-objective fixture: graph, rule inputs, config and a lambda that
/// evaluates the total loss from parameter leaves.
struct ObjectiveFixture {
    Graph graph;
    TrainConfig cfg;
    RuleInputs rules;
    ModelParams params;
    EpochInputs inputs;
};

inline ObjectiveFixture objective_fixture(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    ObjectiveFixture fx;
    fx.graph = detail::random_graph(n, 0.3, 6, rng, true);
    fx.cfg.hidden_dim = 4;
    fx.cfg.mlp_hidden_dim = 5;
    fx.cfg.num_layers = 2;
    fx.cfg.pca_dim = 3;
    fx.cfg.alpha_rule = 0.7;
    fx.cfg.alpha_cross = 1.3;
    fx.cfg.seed = seed;
    fx.rules = compute_rule_inputs(fx.graph, 3);
    fx.params = init_params(model_dims(fx.graph, fx.cfg, 3), seed);
    // zero biases at init put ReLU pre-activations exactly on the kink
    fx.params.visit([&](const std::string&, DenseMatrix& m) {
        for (auto& v : m.values()) v += rng.uniform(-0.1, 0.1);
    });
    Rng aug(derive_seed(seed, kAugmentStream));
    auto x = SparseCSR::from_dense(fx.graph.features());
    fx.inputs.a_hat_1 = std::make_shared<const SparseCSR>(normalized_adjacency(drop_edges(fx.graph.adjacency(), 0.2, aug)));
    fx.inputs.x_1 = std::make_shared<const SparseCSR>(mask_columns(x, draw_feature_mask(6, 0.3, aug)));
    fx.inputs.a_hat_2 = std::make_shared<const SparseCSR>(normalized_adjacency(drop_edges(fx.graph.adjacency(), 0.4, aug)));
    fx.inputs.x_2 = std::make_shared<const SparseCSR>(mask_columns(x, draw_feature_mask(6, 0.1, aug)));
    return fx;
}

/// Grad-checks the full objective w.r.t. every parameter matrix.
inline double objective_grad_error(const ObjectiveFixture& fx, double eps = 1e-5) {
    std::vector<DenseMatrix> leaves;
    fx.params.visit([&](const std::string&, const DenseMatrix& m) { leaves.push_back(m); });
    ModelParams shape = fx.params;
    EpochInputs in = fx.inputs;
    in.rules = &fx.rules;
    const TrainConfig cfg = fx.cfg;
    return ad::grad_check(
        [&](ad::Tape& t, std::span<const ad::Var> vars) {
            // rebuild ParamVars around the supplied leaves in visit order
            ad::ParamVars pv;
            std::size_t k = 0;
            auto take = [&] {
                ad::LinearVar l{vars[k], vars[k + 1]};
                k += 2;
                return l;
            };
            for (std::size_t l = 0; l < shape.encoder.size(); ++l) pv.encoder.push_back(take());
            pv.proj1 = take();
            pv.proj2 = take();
            pv.rule1 = take();
            pv.rule2 = take();
            pv.gate1 = take();
            pv.gate2 = take();
            return build_loss(t, pv, in, cfg).total;
        },
        leaves, eps);
}

inline std::vector<Check> property_checks(std::uint64_t seed = 20240801) {
    std::vector<Check> checks;

    checks.push_back({"grad_check: every differentiable op < 1e-4", [seed] {
        double worst = 0;
        std::string who;
        for (std::uint64_t rep = 0; rep < 3; ++rep)
            for (auto& c : op_cases(seed + rep)) {
                auto fn = c.op;
                const std::uint64_t rs = seed * 31 + rep;
                const double e = ad::grad_check(
                    [fn, rs](ad::Tape& t, std::span<const ad::Var> p) { return detail::readout(t, fn(t, p), rs); }, c.inputs, 1e-5);
                if (e > worst) {
                    worst = e;
                    who = c.name;
                }
            }
        return detail::result("grad_check: every differentiable op < 1e-4", worst, 1e-4, "worst op: " + who);
    }});

    checks.push_back({"grad_check: quadratic loss < 1e-8", [seed] {
        Rng rng(seed + 1);
        const DenseMatrix w = detail::random_matrix(3, 4, rng);
        const double e = ad::grad_check(
            [](ad::Tape&, std::span<const ad::Var> p) { return ad::sum(ad::square(p[0]), 0.5); }, std::vector<DenseMatrix>{w}, 1e-5);
        return detail::result("grad_check: quadratic loss < 1e-8", e, 1e-8);
    }});

    checks.push_back({"grad_check: InfoNCE, 4 nodes x dim 3 < 1e-5", [seed] {
        double worst = 0;
        for (std::uint64_t r = 0; r < 5; ++r) {
            Rng rng(seed + 100 + r);
            std::vector<DenseMatrix> in{detail::random_matrix(4, 3, rng), detail::random_matrix(4, 3, rng)};
            worst = std::max(worst, ad::grad_check(
                                        [](ad::Tape&, std::span<const ad::Var> p) { return ad::infonce(p[0], p[1], 0.5); }, in, 1e-5));
        }
        return detail::result("grad_check: InfoNCE, 4 nodes x dim 3 < 1e-5", worst, 1e-5);
    }});

    checks.push_back({"grad_check: rule and cross losses < 1e-4", [seed] {
        double worst = 0;
        for (std::uint64_t r = 0; r < 5; ++r) {
            Rng rng(seed + 200 + r);
            std::vector<DenseMatrix> one{detail::random_matrix(5, 3, rng)};
            worst = std::max(worst, ad::grad_check(
                                        [](ad::Tape&, std::span<const ad::Var> p) { return ad::rule_loss(p[0], 0.4); }, one, 1e-5));
            std::vector<DenseMatrix> two{detail::random_matrix(6, 3, rng), detail::random_matrix(6, 3, rng)};
            worst = std::max(worst, ad::grad_check(
                                        [](ad::Tape&, std::span<const ad::Var> p) { return ad::cross_loss(p[0], p[1]); }, two, 1e-5));
        }
        return detail::result("grad_check: rule and cross losses < 1e-4", worst, 1e-4);
    }});

    checks.push_back({"grad_check: GCN encoder readout < 1e-4", [seed] {
        Rng rng(seed + 300);
        const Graph g = detail::random_graph(10, 0.3, 5, rng);
        auto a_hat = std::make_shared<const SparseCSR>(normalized_adjacency(g));
        auto x = std::make_shared<const SparseCSR>(SparseCSR::from_dense(g.features()));
        std::vector<DenseMatrix> w{detail::random_matrix(5, 6, rng), detail::random_matrix(1, 6, rng),
                                   detail::random_matrix(6, 3, rng), detail::random_matrix(1, 3, rng)};
        const double e = ad::grad_check(
            [&](ad::Tape& t, std::span<const ad::Var> p) {
                std::vector<ad::LinearVar> layers{{p[0], p[1]}, {p[2], p[3]}};
                return detail::readout(t, ad::gcn_forward(a_hat, x, layers), seed);
            },
            w, 1e-5);
        return detail::result("grad_check: GCN encoder readout < 1e-4", e, 1e-4);
    }});

    checks.push_back({"grad_check: full objective, 12-node graph < 1e-4", [seed] {
        const double e = objective_grad_error(objective_fixture(12, seed + 400));
        return detail::result("grad_check: full objective, 12-node graph < 1e-4", e, 1e-4);
    }});

    checks.push_back({"grad_check: first-epoch objective, N <= 16 < 1e-4", [seed] {
        double worst = 0;
        for (std::size_t n : {5u, 9u, 16u}) worst = std::max(worst, objective_grad_error(objective_fixture(n, seed + 500 + n)));
        return detail::result("grad_check: first-epoch objective, N <= 16 < 1e-4", worst, 1e-4);
    }});

    checks.push_back({"spmm = dense matmul on 100 random CSR < 1e-12 rel", [seed] {
        Rng rng(seed + 600);
        double worst = 0;
        for (int rep = 0; rep < 100; ++rep) {
            const std::size_t r = 1 + rng.below(32), c = 1 + rng.below(32), k = 1 + rng.below(8);
            const SparseCSR s = detail::random_csr(r, c, rng.uniform(0.0, 0.6), rng);
            const DenseMatrix b = detail::random_matrix(c, k, rng);
            const DenseMatrix want = oracle::matmul(s.densify(), b);
            const DenseMatrix got = spmm(s, b);
            const double scale = std::max(1.0, frobenius_norm(want));
            worst = std::max(worst, max_abs_diff(got, want) / scale);
        }
        return detail::result("spmm = dense matmul on 100 random CSR < 1e-12 rel", worst, 1e-12);
    }});

    checks.push_back({"covariance symmetric (1e-12) and PSD (>= -1e-10)", [seed] {
        Rng rng(seed + 700);
        double worst_sym = 0, min_eig = 0;
        for (int rep = 0; rep < 20; ++rep) {
            const DenseMatrix m = detail::random_matrix(2 + rng.below(20), 1 + rng.below(8), rng);
            const DenseMatrix c = covariance(m);
            worst_sym = std::max(worst_sym, max_abs_diff(c, c.transposed()));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(strgcl::detail::view(c)));
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        }
        const double measured = std::max(worst_sym / 1e-12, -min_eig / 1e-10);
        return CheckResult{"covariance symmetric (1e-12) and PSD (>= -1e-10)", measured <= 1.0, measured, 1.0,
                           "asym " + std::to_string(worst_sym) + ", min eig " + std::to_string(min_eig)};
    }});

    checks.push_back({"cosine similarity diagonal = 1 on nonzero rows", [seed] {
        Rng rng(seed + 800);
        double worst = 0;
        for (int rep = 0; rep < 20; ++rep) {
            DenseMatrix m = detail::random_matrix(1 + rng.below(12), 1 + rng.below(6), rng);
            const DenseMatrix s = cosine_similarity_matrix(m);
            for (std::size_t i = 0; i < m.rows(); ++i) worst = std::max(worst, std::abs(s(i, i) - 1.0));
        }
        return detail::result("cosine similarity diagonal = 1 on nonzero rows", worst, 1e-12);
    }});

    checks.push_back({"normalized adjacency symmetric, pattern A+I, k-regular exact", [seed] {
        Rng rng(seed + 900);
        double worst = 0;
        for (int rep = 0; rep < 30; ++rep) {
            const Graph g = detail::random_graph(1 + rng.below(30), rng.uniform(0.0, 0.5), 1, rng);
            const SparseCSR ah = normalized_adjacency(g);
            const DenseMatrix d = ah.densify();
            worst = std::max(worst, max_abs_diff(d, d.transposed()));
            for (std::size_t i = 0; i < g.n(); ++i)
                for (std::size_t j = 0; j < g.n(); ++j) {
                    const bool want = i == j || g.adjacency().at(i, j) != 0.0;
                    if (want != (d(i, j) != 0.0)) worst = 1.0;
                }
        }
        // cycles are 2-regular: Â = (A + I) / 3 exactly
        for (std::size_t n : {3u, 4u, 7u}) {
            std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
            for (std::uint32_t i = 0; i < n; ++i) e.emplace_back(i, static_cast<std::uint32_t>((i + 1) % n));
            const Graph g = Graph::from_edges("cycle", n, e, FeatureMatrix(n, 1));
            const SparseCSR ah = normalized_adjacency(g);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t p = ah.row_begin(i); p < ah.row_end(i); ++p)
                    if (ah.values()[p] != 1.0 / 3.0) worst = std::max(worst, std::abs(ah.values()[p] - 1.0 / 3.0) + 1.0);
        }
        return detail::result("normalized adjacency symmetric, pattern A+I, k-regular exact", worst, 1e-15);
    }});

    checks.push_back({"augmentations bit-identical for equal seeds", [seed] {
        Rng g_rng(seed + 1000);
        const Graph g = detail::random_graph(40, 0.2, 8, g_rng);
        bool same = true;
        for (std::uint64_t s = 0; s < 10; ++s) {
            Rng a(s), b(s);
            same = same && drop_edges(g, 0.4, a).adjacency == drop_edges(g, 0.4, b).adjacency;
            same = same && mask_features(g, 0.3, a).features == mask_features(g, 0.3, b).features;
        }
        return CheckResult{"augmentations bit-identical for equal seeds", same, same ? 0.0 : 1.0, 0.0, {}};
    }});

    checks.push_back({"NTSC matches brute force on 50 random graphs < 1e-10", [seed] {
        Rng rng(seed + 1100);
        double worst = 0;
        for (int rep = 0; rep < 50; ++rep) {
            const Graph g = detail::random_graph(1 + rng.below(64), rng.uniform(0.0, 0.3), 2, rng);
            worst = std::max(worst, detail::max_abs(ntsc_weights(g), oracle::ntsc(g)));
        }
        return detail::result("NTSC matches brute force on 50 random graphs < 1e-10", worst, 1e-10);
    }});

    checks.push_back({"LGTC matches brute force on 50 random graphs < 1e-10", [seed] {
        Rng rng(seed + 1200);
        double worst = 0;
        for (int rep = 0; rep < 50; ++rep) {
            const std::size_t n = 2 + rng.below(63);
            const Graph g = detail::random_graph(n, rng.uniform(0.0, 0.3), 1 + rng.below(6), rng);
            const DenseMatrix x = g.features().cast<double>();
            const LgtcBreakdown got = lgtc_breakdown(x, g), want = oracle::lgtc(x, g);
            worst = std::max({worst, detail::max_abs(got.as, want.as), detail::max_abs(got.gs, want.gs),
                              detail::max_abs(got.diff, want.diff), detail::max_abs(got.s, want.s)});
        }
        return detail::result("LGTC matches brute force on 50 random graphs < 1e-10", worst, 1e-10);
    }});

    checks.push_back({"NTSC permutation-equivariant and monotone in d_sum", [seed] {
        Rng rng(seed + 1300);
        double worst = 0;
        for (int rep = 0; rep < 20; ++rep) {
            const Graph g = detail::random_graph(2 + rng.below(40), rng.uniform(0.05, 0.3), 1, rng);
            const auto perm = detail::random_permutation(g.n(), rng);
            const auto w = ntsc_weights(g);
            const auto wp = ntsc_weights(detail::permute_graph(g, perm));
            for (std::size_t i = 0; i < g.n(); ++i) worst = std::max(worst, std::abs(wp[perm[i]] - w[i]));
            const auto b = ntsc_breakdown(g);
            for (std::size_t i = 0; i < g.n(); ++i)
                for (std::size_t j = 0; j < g.n(); ++j)
                    if (b.d_sum[i] > b.d_sum[j] && !(b.w[i] < b.w[j])) worst = 1.0;
            if (*std::min_element(w.begin(), w.end()) != 0.0) worst = 1.0;
        }
        return detail::result("NTSC permutation-equivariant and monotone in d_sum", worst, 1e-12);
    }});

    checks.push_back({"LGTC Diff within [0,1] on nonnegative features; s >= 0, min s = 0", [seed] {
        Rng rng(seed + 1400);
        double worst = 0;
        for (int rep = 0; rep < 30; ++rep) {
            const Graph g = detail::random_graph(2 + rng.below(50), rng.uniform(0.0, 0.3), 1 + rng.below(6), rng, true);
            const auto b = lgtc_breakdown(g.features().cast<double>(), g);
            for (double d : b.diff) worst = std::max({worst, -d, d - 1.0});
            for (double s : b.s) worst = std::max(worst, -s);
            worst = std::max(worst, std::abs(*std::min_element(b.s.begin(), b.s.end())));
        }
        return detail::result("LGTC Diff within [0,1] on nonnegative features; s >= 0, min s = 0", worst, 0.0);
    }});

    checks.push_back({"PCA components orthonormal; k = F preserves distances", [seed] {
        Rng rng(seed + 1500);
        double worst = 0;
        for (int rep = 0; rep < 10; ++rep) {
            const std::size_t f = 2 + rng.below(10), n = f + rng.below(30);
            const DenseMatrix x = detail::random_matrix(n, f, rng);
            const std::size_t k = 1 + rng.below(std::min(n, f));
            const PcaModel m = pca_fit(x, k);
            const DenseMatrix g = gemm(m.components, Trans::no, m.components, Trans::yes);
            worst = std::max(worst, max_abs_diff(g, DenseMatrix::identity(k)));
            const PcaModel full = pca_fit(x, f);
            const DenseMatrix t = pca_transform(full, x);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double d0 = 0, d1 = 0;
                    for (std::size_t c = 0; c < f; ++c) d0 += std::pow(x(i, c) - x(j, c), 2), d1 += std::pow(t(i, c) - t(j, c), 2);
                    worst = std::max(worst, std::abs(std::sqrt(d0) - std::sqrt(d1)));
                }
        }
        return detail::result("PCA components orthonormal; k = F preserves distances", worst, 1e-8);
    }});

    checks.push_back({"InfoNCE matches per-node brute force < 1e-10", [seed] {
        Rng rng(seed + 1600);
        double worst = 0;
        for (int rep = 0; rep < 20; ++rep) {
            const std::size_t n = 2 + rng.below(12), d = 1 + rng.below(5);
            const DenseMatrix u = detail::random_matrix(n, d, rng), v = detail::random_matrix(n, d, rng);
            const double tau = rng.uniform(0.2, 2.0);
            worst = std::max(worst, std::abs(infonce(u, v, tau) - oracle::infonce(u, v, tau)));
            const double tr = rng.uniform(0.2, 2.0);
            worst = std::max(worst, std::abs(rule_loss(u, tr) - oracle::rule_loss(u, tr)));
            worst = std::max(worst, std::abs(cross_loss(u, v) - oracle::cross_loss(u, v)));
        }
        return detail::result("InfoNCE matches per-node brute force < 1e-10", worst, 1e-10, "also rule and cross losses");
    }});

    checks.push_back({"InfoNCE invariant to positive rescaling < 1e-10", [seed] {
        Rng rng(seed + 1700);
        double worst = 0;
        for (int rep = 0; rep < 20; ++rep) {
            const DenseMatrix u = detail::random_matrix(8, 4, rng), v = detail::random_matrix(8, 4, rng);
            const double c = rng.uniform(0.01, 100.0);
            DenseMatrix cu = u, cv = v;
            for (auto& x : cu.values()) x *= c;
            for (auto& x : cv.values()) x *= c;
            worst = std::max(worst, std::abs(infonce(u, v, 0.5) - infonce(cu, cv, 0.5)));
        }
        return detail::result("InfoNCE invariant to positive rescaling < 1e-10", worst, 1e-10);
    }});

    checks.push_back({"rule loss positive (N >= 2) and row-rescaling invariant", [seed] {
        Rng rng(seed + 1800);
        double worst = 0;
        for (int rep = 0; rep < 20; ++rep) {
            const DenseMatrix h = detail::random_matrix(2 + rng.below(10), 3, rng);
            const double l = rule_loss(h, 0.4);
            if (!(l > 0.0)) worst = 1.0;
            DenseMatrix hs = h;
            for (std::size_t i = 0; i < hs.rows(); ++i) {
                const double c = rng.uniform(0.1, 10.0);
                for (auto& x : hs.row(i)) x *= c;
            }
            worst = std::max(worst, std::abs(l - rule_loss(hs, 0.4)));
        }
        return detail::result("rule loss positive (N >= 2) and row-rescaling invariant", worst, 1e-10);
    }});

    checks.push_back({"cross loss zero iff means and covariances agree (8x4)", [seed] {
        Rng rng(seed + 1900);
        double worst = 0;
        for (int rep = 0; rep < 20; ++rep) {
            const DenseMatrix a = detail::random_matrix(8, 4, rng);
            // a row permutation keeps the empirical moments
            const auto p = detail::random_permutation(8, rng);
            DenseMatrix b(8, 4);
            for (std::size_t i = 0; i < 8; ++i)
                for (std::size_t j = 0; j < 4; ++j) b(p[i], j) = a(i, j);
            worst = std::max(worst, cross_loss(a, b));
            worst = std::max(worst, cross_loss(b, a));
            const DenseMatrix c = detail::random_matrix(8, 4, rng);
            const double mean_gap = max_abs_diff(column_mean(a), column_mean(c));
            const double cov_gap = max_abs_diff(covariance(a), covariance(c));
            const bool matched = mean_gap < 1e-12 && cov_gap < 1e-12;
            if (!matched && !(cross_loss(a, c) > 1e-10 && cross_loss(c, a) > 1e-10)) worst = 1.0;
        }
        return detail::result("cross loss zero iff means and covariances agree (8x4)", worst, 1e-10);
    }});

    checks.push_back({"forward pass permutation-equivariant", [seed] {
        Rng rng(seed + 2000);
        const Graph g = detail::random_graph(20, 0.2, 5, rng);
        TrainConfig cfg;
        cfg.hidden_dim = 4;
        const ModelParams p = init_params(model_dims(g, cfg, 3), seed);
        const auto perm = detail::random_permutation(g.n(), rng);
        const DenseMatrix h = embed(g, p);
        const DenseMatrix hp = embed(detail::permute_graph(g, perm), p);
        double worst = 0;
        for (std::size_t i = 0; i < g.n(); ++i)
            for (std::size_t j = 0; j < h.cols(); ++j) worst = std::max(worst, std::abs(hp(perm[i], j) - h(i, j)));
        return detail::result("forward pass permutation-equivariant", worst, 1e-12);
    }});

    checks.push_back({"NMI/ARI match contingency oracle on 100 labelings < 1e-12", [seed] {
        Rng rng(seed + 2100);
        double worst = 0;
        for (int rep = 0; rep < 100; ++rep) {
            const std::size_t n = 1 + rng.below(50);
            const std::size_t ka = 1 + rng.below(5), kb = 1 + rng.below(5);
            std::vector<std::int32_t> a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = static_cast<std::int32_t>(rng.below(ka));
                b[i] = static_cast<std::int32_t>(rng.below(kb));
            }
            const auto got = clustering_metrics(a, b);
            const auto want = oracle::clustering(a, b);
            worst = std::max({worst, std::abs(got.nmi - want.nmi), std::abs(got.ari - want.ari)});
        }
        return detail::result("NMI/ARI match contingency oracle on 100 labelings < 1e-12", worst, 1e-12);
    }});

    checks.push_back({"probe accuracy invariant to orthogonal rotation < 1e-6", [seed] {
        SbmOptions o;
        o.nodes = 150;
        o.classes = 3;
        o.features = 12;
        o.seed = seed;
        const Graph g = make_sbm(o);
        DenseMatrix h = g.features().cast<double>();
        Rng rng(seed + 2200);
        for (auto& v : h.values()) v += rng.uniform(-0.3, 0.3);
        Eigen::MatrixXd raw(12, 12);
        for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = rng.uniform(-1.0, 1.0);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
        const Eigen::MatrixXd q = qr.householderQ();
        DenseMatrix qm(12, 12);
        for (std::size_t i = 0; i < 12; ++i)
            for (std::size_t j = 0; j < 12; ++j) qm(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        ProbeOptions po;
        po.seeds = 3;
        po.train_frac = 0.3;
        const auto a = linear_probe(h, g.labels(), g.num_classes(), po);
        const auto b = linear_probe(matmul(h, qm), g.labels(), g.num_classes(), po);
        return detail::result("probe accuracy invariant to orthogonal rotation < 1e-6", std::abs(a.accuracy_mean - b.accuracy_mean), 1e-6);
    }});

    return checks;
}

inline std::vector<CheckResult> run_checks(const std::vector<Check>& checks, std::ostream* log = nullptr) {
    std::vector<CheckResult> out;
    for (const auto& c : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = CheckResult{c.name, false, 0.0, 0.0, std::string("threw: ") + e.what()};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log != nullptr) {
            *log << (r.passed ? "PASS " : "FAIL ") << r.name << "  (measured " << r.measured << ", tol " << r.tolerance;
            if (!r.detail.empty()) *log << ", " << r.detail;
            *log << ", " << r.seconds << " s)\n";
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace strgcl::selfcheck
