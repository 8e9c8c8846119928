// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "strgcl/eval/metrics.hpp"
#include "strgcl/linalg/functions.hpp"
#include "strgcl/random.hpp"

namespace strgcl {

struct LogRegOptions {
    double l2 = 1e-4;
    double tolerance = 1e-6; // on the L2 norm of the full gradient
    std::size_t max_iterations = 5000;
};

struct LogRegModel {
    Eigen::MatrixXd weight; // F x C
    Eigen::RowVectorXd bias;
    std::size_t iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
};

namespace detail {

struct LogRegProblem {
    const Eigen::MatrixXd& x; // n x F
    const std::vector<std::int32_t>& y;
    std::size_t classes;
    double l2;

    /// Mean cross-entropy + (l2/2)|W|^2; fills the gradient when asked.
    double eval(const Eigen::MatrixXd& w, const Eigen::RowVectorXd& b, Eigen::MatrixXd* gw, Eigen::RowVectorXd* gb) const {
        const auto n = static_cast<double>(x.rows());
        Eigen::MatrixXd logits = x * w;
        logits.rowwise() += b;
        double loss = 0.0;
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            const double m = logits.row(i).maxCoeff();
            Eigen::RowVectorXd e = (logits.row(i).array() - m).exp().matrix();
            const double s = e.sum();
            loss += m + std::log(s) - logits(i, y[static_cast<std::size_t>(i)]);
            if (gw != nullptr) {
                logits.row(i) = e / s;
                logits(i, y[static_cast<std::size_t>(i)]) -= 1.0;
            }
        }
        loss = loss / n + 0.5 * l2 * w.squaredNorm();
        if (gw != nullptr) {
            *gw = x.transpose() * logits / n + l2 * w;
            *gb = logits.colwise().sum() / n;
        }
        return loss;
    }
};

} // namespace detail

/// L2-regularized multinomial logistic regression (bias unpenalized) by
/// accelerated gradient descent with backtracking and function-value restart.
inline LogRegModel fit_logistic(const Eigen::MatrixXd& x, const std::vector<std::int32_t>& y, std::size_t classes,
                                const LogRegOptions& opt = {}) {
    require(x.rows() > 0 && static_cast<std::size_t>(x.rows()) == y.size(), ErrorKind::shape,
            "fit_logistic: feature rows and labels disagree");
    require(classes >= 1, ErrorKind::config, "fit_logistic needs at least one class");
    const detail::LogRegProblem prob{x, y, classes, opt.l2};
    const auto f = x.cols();
    const auto c = static_cast<Eigen::Index>(classes);

    LogRegModel m;
    m.weight = Eigen::MatrixXd::Zero(f, c);
    m.bias = Eigen::RowVectorXd::Zero(c);
    Eigen::MatrixXd w_prev = m.weight, yw = m.weight, gw;
    Eigen::RowVectorXd b_prev = m.bias, yb = m.bias, gb;
    double lip = 1.0;
    double t = 1.0;
    double fx = prob.eval(m.weight, m.bias, nullptr, nullptr);
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        const double fy = prob.eval(yw, yb, &gw, &gb);
        const double g2 = gw.squaredNorm() + gb.squaredNorm();
        Eigen::MatrixXd w_new;
        Eigen::RowVectorXd b_new;
        double f_new = 0.0;
        for (;;) {
            w_new = yw - gw / lip;
            b_new = yb - gb / lip;
            f_new = prob.eval(w_new, b_new, nullptr, nullptr);
            if (f_new <= fy - 0.5 * g2 / lip || lip > 1e12) break;
            lip *= 2.0;
        }
        if (f_new > fx) { // restart momentum from the current iterate
            t = 1.0;
            yw = m.weight;
            yb = m.bias;
            continue;
        }
        w_prev = std::move(m.weight);
        b_prev = std::move(m.bias);
        m.weight = std::move(w_new);
        m.bias = std::move(b_new);
        fx = f_new;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        yw = m.weight + beta * (m.weight - w_prev);
        yb = m.bias + beta * (m.bias - b_prev);
        t = t_next;
        lip = std::max(lip * 0.9, 1e-6);

        Eigen::MatrixXd cw;
        Eigen::RowVectorXd cb;
        prob.eval(m.weight, m.bias, &cw, &cb);
        m.gradient_norm = std::sqrt(cw.squaredNorm() + cb.squaredNorm());
        m.iterations = it;
        if (m.gradient_norm < opt.tolerance) {
            m.converged = true;
            break;
        }
    }
    return m;
}

inline std::vector<std::int32_t> predict_logistic(const LogRegModel& m, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd logits = x * m.weight;
    logits.rowwise() += m.bias;
    std::vector<std::int32_t> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index arg = 0;
        for (Eigen::Index j = 1; j < logits.cols(); ++j)
            if (logits(i, j) > logits(i, arg)) arg = j;
        out[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(arg);
    }
    return out;
}

struct ProbeOptions {
    double train_frac = 0.1;
    double val_frac = 0.1; // share of the training split used to pick l2
    std::vector<double> l2_grid{1e-2, 1e-3, 1e-4};
    std::size_t seeds = 20;
    std::uint64_t base_seed = 0;
    double tolerance = 1e-6;
    std::size_t max_iterations = 5000;
};

struct ProbeRun {
    std::uint64_t seed = 0;
    double l2 = 0.0;
    double accuracy = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<std::uint32_t> test_nodes;
    std::vector<std::int32_t> test_pred;
};

struct ProbeReport {
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0; // population standard deviation over seeds
    std::vector<ProbeRun> runs;
};

/// One random train/test split of the labelled nodes (no stratification),
/// l2 chosen on a validation slice of the training split, then refit.
inline ProbeRun probe_once(const DenseMatrix& h, const std::vector<std::int32_t>& labels, std::size_t classes,
                           const ProbeOptions& opt, std::uint64_t seed) {
    require(h.rows() == labels.size(), ErrorKind::shape, "probe: embedding rows != label count");
    require(opt.train_frac > 0.0 && opt.train_frac < 1.0, ErrorKind::config, "train_frac must lie in (0,1)");
    require(!opt.l2_grid.empty(), ErrorKind::config, "probe needs a non-empty l2 grid");
    std::vector<std::uint32_t> nodes;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) nodes.push_back(static_cast<std::uint32_t>(i));
    require(nodes.size() >= 2, ErrorKind::protocol, "linear probe needs at least 2 labelled nodes");
    Rng rng(seed);
    rng.shuffle(std::span<std::uint32_t>(nodes));
    const std::size_t n = nodes.size();
    const std::size_t n_train = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(opt.train_frac * static_cast<double>(n))), 1, n - 1);

    const DenseMatrix z = row_normalize(h);
    auto gather = [&](std::size_t lo, std::size_t hi, std::vector<std::int32_t>& y) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(hi - lo), static_cast<Eigen::Index>(z.cols()));
        y.clear();
        for (std::size_t r = lo; r < hi; ++r) {
            for (std::size_t j = 0; j < z.cols(); ++j) x(static_cast<Eigen::Index>(r - lo), static_cast<Eigen::Index>(j)) = z(nodes[r], j);
            y.push_back(labels[nodes[r]]);
        }
        return x;
    };

    LogRegOptions lo;
    lo.tolerance = opt.tolerance;
    lo.max_iterations = opt.max_iterations;
    lo.l2 = opt.l2_grid.back();
    const std::size_t n_val = static_cast<std::size_t>(std::llround(opt.val_frac * static_cast<double>(n_train)));
    if (opt.l2_grid.size() > 1 && n_val >= 1 && n_val < n_train) {
        std::vector<std::int32_t> y_fit, y_val;
        const Eigen::MatrixXd x_fit = gather(0, n_train - n_val, y_fit);
        const Eigen::MatrixXd x_val = gather(n_train - n_val, n_train, y_val);
        double best = -1.0;
        for (double l2 : opt.l2_grid) {
            LogRegOptions o = lo;
            o.l2 = l2;
            const double acc = accuracy(y_val, predict_logistic(fit_logistic(x_fit, y_fit, classes, o), x_val));
            if (acc > best) {
                best = acc;
                lo.l2 = l2;
            }
        }
    }

    std::vector<std::int32_t> y_train, y_test;
    const Eigen::MatrixXd x_train = gather(0, n_train, y_train);
    const Eigen::MatrixXd x_test = gather(n_train, n, y_test);
    const LogRegModel model = fit_logistic(x_train, y_train, classes, lo);
    ProbeRun run;
    run.seed = seed;
    run.l2 = lo.l2;
    run.iterations = model.iterations;
    run.converged = model.converged;
    run.test_pred = predict_logistic(model, x_test);
    run.test_nodes.assign(nodes.begin() + static_cast<std::ptrdiff_t>(n_train), nodes.end());
    run.accuracy = accuracy(y_test, run.test_pred);
    return run;
}

inline ProbeReport linear_probe(const DenseMatrix& h, const std::vector<std::int32_t>& labels, std::size_t classes,
                                const ProbeOptions& opt = {}) {
    require(classes >= 1, ErrorKind::protocol, "linear probe needs labels");
    require(opt.seeds >= 1, ErrorKind::config, "probe needs at least one seed");
    ProbeReport rep;
    for (std::size_t r = 0; r < opt.seeds; ++r) rep.runs.push_back(probe_once(h, labels, classes, opt, derive_seed(opt.base_seed, r)));
    double s = 0.0;
    for (const auto& r : rep.runs) s += r.accuracy;
    rep.accuracy_mean = s / static_cast<double>(rep.runs.size());
    double v = 0.0;
    for (const auto& r : rep.runs) v += (r.accuracy - rep.accuracy_mean) * (r.accuracy - rep.accuracy_mean);
    rep.accuracy_std = std::sqrt(v / static_cast<double>(rep.runs.size()));
    return rep;
}

} // namespace strgcl
