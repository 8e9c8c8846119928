// SPDX-License-Identifier: Apache-2.0
#pragma once

// Tape-based reverse-mode differentiation over a fixed vocabulary of matrix
// operations. Nodes are appended in evaluation order, so the tape is already
// topologically sorted and backward() is a single reverse sweep.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strgcl/linalg/functions.hpp"
#include "strgcl/linalg/matrix.hpp"
#include "strgcl/linalg/sparse.hpp"

namespace strgcl::ad {

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const DenseMatrix& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
    /// Shortcut for 1x1 nodes.
    double scalar() const { return value()(0, 0); }
};

class BackwardContext {
public:
    BackwardContext(Tape& tape, std::size_t node, const DenseMatrix& grad) : tape_(tape), node_(node), grad_(grad) {}

    const DenseMatrix& grad() const noexcept { return grad_; }
    const DenseMatrix& output() const;
    const DenseMatrix& input(std::size_t k) const;
    bool wants(std::size_t k) const;
    void accumulate(std::size_t k, DenseMatrix contribution);

private:
    Tape& tape_;
    std::size_t node_;
    const DenseMatrix& grad_;
};

using BackwardFn = std::function<void(BackwardContext&)>;

/// Gradient map returned by Tape::backward. Nodes that never received a
/// contribution report an all-zero gradient of their own shape.
class Gradients {
public:
    Gradients() = default;
    Gradients(std::vector<std::optional<DenseMatrix>> grads, std::vector<std::pair<std::size_t, std::size_t>> shapes)
        : grads_(std::move(grads)), shapes_(std::move(shapes)) {}

    DenseMatrix of(Var v) const {
        if (v.id < grads_.size() && grads_[v.id]) return *grads_[v.id];
        const auto [r, c] = shapes_.at(v.id);
        return DenseMatrix(r, c);
    }

private:
    std::vector<std::optional<DenseMatrix>> grads_;
    std::vector<std::pair<std::size_t, std::size_t>> shapes_;
};

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(DenseMatrix v) { return push(std::move(v), {}, nullptr, false, true); }
    Var variable(DenseMatrix v) { return push(std::move(v), {}, nullptr, true, true); }

    const DenseMatrix& value(std::size_t id) const { return nodes_.at(id).value; }
    bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Appends an operation node. `fn` is dropped when no input needs a gradient.
    Var record(DenseMatrix value, std::vector<std::size_t> inputs, BackwardFn fn) {
        bool needs = false;
        for (auto i : inputs) {
            require(i < nodes_.size(), ErrorKind::contract, "input node does not precede its operation");
            needs = needs || nodes_[i].requires_grad;
        }
        return push(std::move(value), std::move(inputs), needs ? std::move(fn) : nullptr, needs, false);
    }

    Gradients backward(Var loss) {
        require(loss.tape == this, ErrorKind::contract, "loss node belongs to a different tape");
        const DenseMatrix& lv = value(loss.id);
        require(lv.rows() == 1 && lv.cols() == 1, ErrorKind::contract,
                "backward needs a scalar loss, got " + shape_str(lv));
        grads_.assign(nodes_.size(), std::nullopt);
        grads_[loss.id] = DenseMatrix(1, 1, 1.0);
        for (std::size_t k = loss.id + 1; k-- > 0;) {
            Node& node = nodes_[k];
            if (!grads_[k] || !node.requires_grad) continue;
            if (node.backward) {
                BackwardContext ctx(*this, k, *grads_[k]);
                node.backward(ctx);
            }
            if (!node.leaf) grads_[k].reset(); // intermediate gradients are not reported
        }
        std::vector<std::pair<std::size_t, std::size_t>> shapes;
        shapes.reserve(nodes_.size());
        for (const auto& n : nodes_) shapes.emplace_back(n.value.rows(), n.value.cols());
        return Gradients(std::move(grads_), std::move(shapes));
    }

private:
    friend class BackwardContext;

    struct Node {
        DenseMatrix value;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        bool requires_grad = false;
        bool leaf = false;
    };

    Var push(DenseMatrix v, std::vector<std::size_t> inputs, BackwardFn fn, bool requires_grad, bool leaf) {
        require(v.all_finite(), ErrorKind::numeric,
                "non-finite value at tape node " + std::to_string(nodes_.size()));
        nodes_.push_back(Node{std::move(v), std::move(inputs), std::move(fn), requires_grad, leaf});
        return Var{this, nodes_.size() - 1};
    }

    std::vector<Node> nodes_;
    std::vector<std::optional<DenseMatrix>> grads_;
};

inline const DenseMatrix& Var::value() const { return tape->value(id); }

inline const DenseMatrix& BackwardContext::output() const { return tape_.nodes_[node_].value; }
inline const DenseMatrix& BackwardContext::input(std::size_t k) const {
    return tape_.nodes_[tape_.nodes_[node_].inputs[k]].value;
}
inline bool BackwardContext::wants(std::size_t k) const {
    return tape_.nodes_[tape_.nodes_[node_].inputs[k]].requires_grad;
}
inline void BackwardContext::accumulate(std::size_t k, DenseMatrix contribution) {
    const std::size_t id = tape_.nodes_[node_].inputs[k];
    auto& slot = tape_.grads_[id];
    if (!slot) slot = std::move(contribution);
    else axpy(*slot, contribution);
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

namespace detail {
inline Tape& tape_of(Var a) {
    require(a.tape != nullptr, ErrorKind::contract, "unbound Var");
    return *a.tape;
}
inline Tape& tape_of(Var a, Var b) {
    require(a.tape != nullptr && a.tape == b.tape, ErrorKind::contract, "operands live on different tapes");
    return *a.tape;
}
} // namespace detail

/// alpha * op(a) * op(b)
inline Var gemm(Var a, Trans ta, Var b, Trans tb, double alpha = 1.0) {
    Tape& t = detail::tape_of(a, b);
    DenseMatrix out = strgcl::gemm(a.value(), ta, b.value(), tb, alpha);
    return t.record(std::move(out), {a.id, b.id}, [ta, tb, alpha](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& av = c.input(0);
        const DenseMatrix& bv = c.input(1);
        if (c.wants(0)) {
            if (ta == Trans::no) c.accumulate(0, strgcl::gemm(g, Trans::no, bv, tb == Trans::no ? Trans::yes : Trans::no, alpha));
            else if (tb == Trans::no) c.accumulate(0, strgcl::gemm(bv, Trans::no, g, Trans::yes, alpha));
            else c.accumulate(0, strgcl::gemm(bv, Trans::yes, g, Trans::yes, alpha));
        }
        if (c.wants(1)) {
            if (tb == Trans::no) c.accumulate(1, strgcl::gemm(av, ta == Trans::no ? Trans::yes : Trans::no, g, Trans::no, alpha));
            else if (ta == Trans::no) c.accumulate(1, strgcl::gemm(g, Trans::yes, av, Trans::no, alpha));
            else c.accumulate(1, strgcl::gemm(g, Trans::yes, av, Trans::yes, alpha));
        }
    });
}

inline Var matmul(Var a, Var b) { return gemm(a, Trans::no, b, Trans::no); }
/// alpha * a * bᵀ
inline Var matmul_nt(Var a, Var b, double alpha = 1.0) { return gemm(a, Trans::no, b, Trans::yes, alpha); }

/// s * b with a constant sparse operand.
inline Var spmm(std::shared_ptr<const SparseCSR> s, Var b) {
    Tape& t = detail::tape_of(b);
    DenseMatrix out = strgcl::spmm(*s, b.value());
    return t.record(std::move(out), {b.id},
                    [s](BackwardContext& c) { c.accumulate(0, spmm_transposed(*s, c.grad())); });
}

inline Var add(Var a, Var b) {
    Tape& t = detail::tape_of(a, b);
    require_same_shape(a.value(), b.value(), "add");
    DenseMatrix out = a.value();
    axpy(out, b.value());
    return t.record(std::move(out), {a.id, b.id}, [](BackwardContext& c) {
        if (c.wants(0)) c.accumulate(0, c.grad());
        if (c.wants(1)) c.accumulate(1, c.grad());
    });
}

inline Var sub(Var a, Var b) {
    Tape& t = detail::tape_of(a, b);
    require_same_shape(a.value(), b.value(), "sub");
    DenseMatrix out = a.value();
    axpy(out, b.value(), -1.0);
    return t.record(std::move(out), {a.id, b.id}, [](BackwardContext& c) {
        if (c.wants(0)) c.accumulate(0, c.grad());
        if (c.wants(1)) {
            DenseMatrix g = c.grad();
            for (auto& v : g.values()) v = -v;
            c.accumulate(1, std::move(g));
        }
    });
}

inline Var hadamard(Var a, Var b) {
    Tape& t = detail::tape_of(a, b);
    require_same_shape(a.value(), b.value(), "hadamard");
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.value().data()[i] * b.value().data()[i];
    return t.record(std::move(out), {a.id, b.id}, [](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        for (std::size_t k = 0; k < 2; ++k) {
            if (!c.wants(k)) continue;
            const DenseMatrix& other = c.input(1 - k);
            DenseMatrix d(g.rows(), g.cols());
            for (std::size_t i = 0; i < d.size(); ++i) d.data()[i] = g.data()[i] * other.data()[i];
            c.accumulate(k, std::move(d));
        }
    });
}

/// a + 1·bias, bias is 1 x cols.
inline Var add_row_broadcast(Var a, Var bias) {
    Tape& t = detail::tape_of(a, bias);
    require(bias.rows() == 1 && bias.cols() == a.cols(), ErrorKind::shape,
            "add_row_broadcast: bias " + shape_str(bias.value()) + " for " + shape_str(a.value()));
    DenseMatrix out = a.value();
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bias.value()(0, j);
    return t.record(std::move(out), {a.id, bias.id}, [](BackwardContext& c) {
        if (c.wants(0)) c.accumulate(0, c.grad());
        if (c.wants(1)) {
            const DenseMatrix& g = c.grad();
            DenseMatrix d(1, g.cols());
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) d(0, j) += g(i, j);
            c.accumulate(1, std::move(d));
        }
    });
}

inline Var unary(Var a, UnaryFn fn) {
    Tape& t = detail::tape_of(a);
    DenseMatrix out = elementwise(a.value(), fn);
    return t.record(std::move(out), {a.id}, [fn](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& x = c.input(0);
        const DenseMatrix& y = c.output();
        DenseMatrix d(g.rows(), g.cols());
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double gi = g.data()[i], xi = x.data()[i], yi = y.data()[i];
            double v = 0.0;
            switch (fn.kind) {
            case UnaryKind::relu: v = xi > 0.0 ? gi : 0.0; break;
            case UnaryKind::sigmoid: v = gi * yi * (1.0 - yi); break;
            case UnaryKind::exp: v = gi * yi; break;
            case UnaryKind::log: v = gi / xi; break;
            case UnaryKind::log1p: v = gi / (1.0 + xi); break;
            case UnaryKind::scale: v = gi * fn.c; break;
            case UnaryKind::shift: v = gi; break;
            case UnaryKind::square: v = 2.0 * xi * gi; break;
            }
            d.data()[i] = v;
        }
        c.accumulate(0, std::move(d));
    });
}

inline Var relu(Var a) { return unary(a, UnaryFn::relu()); }
inline Var sigmoid(Var a) { return unary(a, UnaryFn::sigmoid()); }
inline Var exp(Var a) { return unary(a, UnaryFn::exp()); }
inline Var log(Var a) { return unary(a, UnaryFn::log()); }
inline Var log1p(Var a) { return unary(a, UnaryFn::log1p()); }
inline Var scale(Var a, double c) { return unary(a, UnaryFn::scale(c)); }
inline Var shift(Var a, double c) { return unary(a, UnaryFn::shift(c)); }
inline Var square(Var a) { return unary(a, UnaryFn::square()); }

/// alpha * a * aᵀ. Only one triangle is computed; backward is alpha (G + Gᵀ) a.
inline Var gram(Var a, double alpha = 1.0) {
    Tape& t = detail::tape_of(a);
    const DenseMatrix& x = a.value();
    const std::size_t n = x.rows();
    DenseMatrix out(n, n);
    if (x.cols() > 0) {
        using ColMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
        ColMat lower = ColMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        lower.selfadjointView<Eigen::Lower>().rankUpdate(strgcl::detail::view(x), alpha);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j; i < n; ++i) {
                const double v = lower(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                out(i, j) = v;
                out(j, i) = v;
            }
    }
    return t.record(std::move(out), {a.id}, [alpha](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        DenseMatrix sym(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) sym(i, j) = g(i, j) + g(j, i);
        c.accumulate(0, gemm(sym, Trans::no, c.input(0), Trans::no, alpha));
    });
}

/// N x 1 vector out_i = log Σ_j exp(a_ij), optionally leaving out j = i.
/// Each row is shifted by its maximum before exponentiating.
inline Var row_logsumexp(Var a, bool skip_diag = false) {
    Tape& t = detail::tape_of(a);
    const DenseMatrix& x = a.value();
    require(!skip_diag || x.rows() == x.cols(), ErrorKind::shape, "row_logsumexp: skip_diag needs a square matrix");
    require(x.cols() > (skip_diag ? 1u : 0u), ErrorKind::insufficient_samples, "row_logsumexp over an empty row");
    using Arr = Eigen::Array<double, Eigen::Dynamic, 1>;
    const auto cols = static_cast<Eigen::Index>(x.cols());
    DenseMatrix out(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        Eigen::Map<const Arr> row(x.data() + i * x.cols(), cols);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < x.cols(); ++j)
            if (!(skip_diag && j == i)) m = std::max(m, x(i, j));
        double s = (row - m).exp().sum();
        if (skip_diag) s -= std::exp(x(i, i) - m);
        out(i, 0) = m + std::log(s);
    }
    return t.record(std::move(out), {a.id}, [skip_diag](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& x = c.input(0);
        const DenseMatrix& y = c.output();
        const auto cols = static_cast<Eigen::Index>(x.cols());
        DenseMatrix d(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            Eigen::Map<const Arr> row(x.data() + i * x.cols(), cols);
            Eigen::Map<Arr> dst(d.data() + i * x.cols(), cols);
            dst = g(i, 0) * (row - y(i, 0)).exp();
            if (skip_diag) d(i, i) = 0.0;
        }
        c.accumulate(0, std::move(d));
    });
}

/// Entrywise log(exp(a) + exp(b)).
inline Var logaddexp(Var a, Var b) {
    Tape& t = detail::tape_of(a, b);
    require_same_shape(a.value(), b.value(), "logaddexp");
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = a.value().data()[i], y = b.value().data()[i];
        out.data()[i] = std::max(x, y) + std::log1p(std::exp(-std::abs(x - y)));
    }
    return t.record(std::move(out), {a.id, b.id}, [](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& x = c.input(0);
        const DenseMatrix& y = c.input(1);
        DenseMatrix da(g.rows(), g.cols()), db(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double w = strgcl::sigmoid(x.data()[i] - y.data()[i]);
            da.data()[i] = g.data()[i] * w;
            db.data()[i] = g.data()[i] * (1.0 - w);
        }
        if (c.wants(0)) c.accumulate(0, std::move(da));
        if (c.wants(1)) c.accumulate(1, std::move(db));
    });
}

/// N x 1 vector out_i = alpha Σ_j a_ij b_ij.
inline Var row_dot(Var a, Var b, double alpha = 1.0) {
    Tape& t = detail::tape_of(a, b);
    require_same_shape(a.value(), b.value(), "row_dot");
    const DenseMatrix& x = a.value();
    const DenseMatrix& y = b.value();
    DenseMatrix out(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * y(i, j);
        out(i, 0) = alpha * s;
    }
    return t.record(std::move(out), {a.id, b.id}, [alpha](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        for (std::size_t k = 0; k < 2; ++k) {
            if (!c.wants(k)) continue;
            const DenseMatrix& other = c.input(1 - k);
            DenseMatrix d(other.rows(), other.cols());
            for (std::size_t i = 0; i < d.rows(); ++i)
                for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) = alpha * g(i, 0) * other(i, j);
            c.accumulate(k, std::move(d));
        }
    });
}

/// Unit-L2 rows; zero rows map to zero with zero gradient.
inline Var row_normalize(Var a) {
    Tape& t = detail::tape_of(a);
    const DenseMatrix& x = a.value();
    DenseMatrix out(x.rows(), x.cols());
    DenseMatrix inv_norm(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (double v : x.row(i)) s += v * v;
        if (s == 0.0) continue;
        const double inv = 1.0 / std::sqrt(s);
        inv_norm(i, 0) = inv;
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) * inv;
    }
    return t.record(std::move(out), {a.id}, [inv_norm = std::move(inv_norm)](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& y = c.output();
        DenseMatrix d(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.rows(); ++i) {
            const double inv = inv_norm(i, 0);
            if (inv == 0.0) continue;
            double dot = 0.0;
            for (std::size_t j = 0; j < g.cols(); ++j) dot += y(i, j) * g(i, j);
            for (std::size_t j = 0; j < g.cols(); ++j) d(i, j) = (g(i, j) - y(i, j) * dot) * inv;
        }
        c.accumulate(0, std::move(d));
    });
}

/// N x 1 vector of row sums.
inline Var row_sum(Var a) {
    Tape& t = detail::tape_of(a);
    const DenseMatrix& x = a.value();
    DenseMatrix out(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (double v : x.row(i)) s += v;
        out(i, 0) = s;
    }
    return t.record(std::move(out), {a.id}, [](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& x = c.input(0);
        DenseMatrix d(x.rows(), x.cols());
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) = g(i, 0);
        c.accumulate(0, std::move(d));
    });
}

/// 1 x C vector of column sums, `scale` applied to the result.
inline Var col_sum(Var a, double scale = 1.0) {
    Tape& t = detail::tape_of(a);
    const DenseMatrix& x = a.value();
    DenseMatrix out(1, x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(0, j) += x(i, j);
    for (auto& v : out.values()) v *= scale;
    return t.record(std::move(out), {a.id}, [scale](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& x = c.input(0);
        DenseMatrix d(x.rows(), x.cols());
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) = g(0, j) * scale;
        c.accumulate(0, std::move(d));
    });
}

inline Var col_mean(Var a) {
    require(a.rows() > 0, ErrorKind::insufficient_samples, "col_mean of an empty matrix");
    return col_sum(a, 1.0 / static_cast<double>(a.rows()));
}

/// 1 x 1 sum of all entries, `scale` applied.
inline Var sum(Var a, double scale = 1.0) {
    Tape& t = detail::tape_of(a);
    double s = 0.0;
    for (double v : a.value().values()) s += v;
    return t.record(DenseMatrix(1, 1, s * scale), {a.id}, [scale](BackwardContext& c) {
        const DenseMatrix& x = c.input(0);
        c.accumulate(0, DenseMatrix(x.rows(), x.cols(), c.grad()(0, 0) * scale));
    });
}

inline Var mean(Var a) {
    require(a.value().size() > 0, ErrorKind::insufficient_samples, "mean of an empty matrix");
    return sum(a, 1.0 / static_cast<double>(a.value().size()));
}

/// N x 1 diagonal of a square matrix.
inline Var diag(Var a) {
    Tape& t = detail::tape_of(a);
    const DenseMatrix& x = a.value();
    require(x.rows() == x.cols(), ErrorKind::shape, "diag of non-square " + shape_str(x));
    DenseMatrix out(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, 0) = x(i, i);
    return t.record(std::move(out), {a.id}, [](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const std::size_t n = g.rows();
        DenseMatrix d(n, n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = g(i, 0);
        c.accumulate(0, std::move(d));
    });
}

inline Var transpose(Var a) {
    Tape& t = detail::tape_of(a);
    return t.record(a.value().transposed(), {a.id},
                    [](BackwardContext& c) { c.accumulate(0, c.grad().transposed()); });
}

/// Sample covariance of the columns, (X-mu)^T (X-mu) / (N-1).
inline Var covariance(Var a) {
    Tape& t = detail::tape_of(a);
    const DenseMatrix& x = a.value();
    require(x.rows() >= 2, ErrorKind::insufficient_samples,
            "covariance needs at least 2 rows, got " + std::to_string(x.rows()));
    const double inv = 1.0 / static_cast<double>(x.rows() - 1);
    auto centered = std::make_shared<DenseMatrix>(center_columns(x));
    DenseMatrix cov = strgcl::gemm(*centered, Trans::yes, *centered, Trans::no, inv);
    return t.record(std::move(cov), {a.id}, [centered, inv](BackwardContext& c) {
        // d/dX = Xc (G + Gᵀ) / (N-1); the mean-removal term vanishes because
        // the columns of Xc sum to zero.
        const DenseMatrix& g = c.grad();
        DenseMatrix sym(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) sym(i, j) = g(i, j) + g(j, i);
        c.accumulate(0, strgcl::gemm(*centered, Trans::no, sym, Trans::no, inv));
    });
}

inline Var concat_cols(Var a, Var b) {
    Tape& t = detail::tape_of(a, b);
    require(a.rows() == b.rows(), ErrorKind::shape, "concat_cols: row mismatch");
    const std::size_t ca = a.cols(), cb = b.cols();
    DenseMatrix out(a.rows(), ca + cb);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < ca; ++j) out(i, j) = a.value()(i, j);
        for (std::size_t j = 0; j < cb; ++j) out(i, ca + j) = b.value()(i, j);
    }
    return t.record(std::move(out), {a.id, b.id}, [ca, cb](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        if (c.wants(0)) {
            DenseMatrix d(g.rows(), ca);
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < ca; ++j) d(i, j) = g(i, j);
            c.accumulate(0, std::move(d));
        }
        if (c.wants(1)) {
            DenseMatrix d(g.rows(), cb);
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < cb; ++j) d(i, j) = g(i, ca + j);
            c.accumulate(1, std::move(d));
        }
    });
}

/// Columns [begin, end).
inline Var slice_cols(Var a, std::size_t begin, std::size_t end) {
    Tape& t = detail::tape_of(a);
    require(begin <= end && end <= a.cols(), ErrorKind::shape, "slice_cols: range out of bounds");
    const DenseMatrix& x = a.value();
    DenseMatrix out(x.rows(), end - begin);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = x(i, j);
    return t.record(std::move(out), {a.id}, [begin, end](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& x = c.input(0);
        DenseMatrix d(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = begin; j < end; ++j) d(i, j) = g(i, j - begin);
        c.accumulate(0, std::move(d));
    });
}

/// Row i of `a` multiplied by q(i, 0).
inline Var scale_rows(Var q, Var a) {
    Tape& t = detail::tape_of(q, a);
    require(q.cols() == 1 && q.rows() == a.rows(), ErrorKind::shape,
            "scale_rows: weights " + shape_str(q.value()) + " for " + shape_str(a.value()));
    DenseMatrix out = a.value();
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= q.value()(i, 0);
    return t.record(std::move(out), {q.id, a.id}, [](BackwardContext& c) {
        const DenseMatrix& g = c.grad();
        const DenseMatrix& qv = c.input(0);
        const DenseMatrix& av = c.input(1);
        if (c.wants(0)) {
            DenseMatrix d(qv.rows(), 1);
            for (std::size_t i = 0; i < g.rows(); ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < g.cols(); ++j) s += g(i, j) * av(i, j);
                d(i, 0) = s;
            }
            c.accumulate(0, std::move(d));
        }
        if (c.wants(1)) {
            DenseMatrix d = g;
            for (std::size_t i = 0; i < d.rows(); ++i)
                for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) *= qv(i, 0);
            c.accumulate(1, std::move(d));
        }
    });
}

} // namespace strgcl::ad
