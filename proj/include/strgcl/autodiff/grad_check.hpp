// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "strgcl/autodiff/tape.hpp"

namespace strgcl::ad {

/// Builds a scalar loss on `tape` from the parameter leaves it is handed.
using LossBuilder = std::function<Var(Tape&, std::span<const Var>)>;

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t worst_param = 0;
    std::size_t worst_entry = 0;
};

/// Compares reverse-mode gradients against central differences, entry by
/// entry. The error measure is |analytic - numeric| / max(1, |analytic|).
inline GradCheckResult grad_check_detailed(const LossBuilder& loss_fn, std::span<const DenseMatrix> params,
                                           double eps = 1e-5) {
    require(eps >= 1e-7 && eps <= 1e-3, ErrorKind::config, "grad_check eps must lie in [1e-7, 1e-3]");

    auto evaluate = [&](std::vector<DenseMatrix> values, std::vector<DenseMatrix>* grads) {
        Tape tape;
        std::vector<Var> vars;
        vars.reserve(values.size());
        for (auto& v : values) vars.push_back(tape.variable(std::move(v)));
        Var loss = loss_fn(tape, vars);
        const double out = loss.scalar();
        if (grads != nullptr) {
            Gradients g = tape.backward(loss);
            for (auto v : vars) grads->push_back(g.of(v));
        }
        return out;
    };

    std::vector<DenseMatrix> analytic;
    evaluate(std::vector<DenseMatrix>(params.begin(), params.end()), &analytic);

    GradCheckResult result;
    std::vector<DenseMatrix> work(params.begin(), params.end());
    for (std::size_t p = 0; p < work.size(); ++p) {
        for (std::size_t e = 0; e < work[p].size(); ++e) {
            const double orig = work[p].data()[e];
            work[p].data()[e] = orig + eps;
            const double up = evaluate(work, nullptr);
            work[p].data()[e] = orig - eps;
            const double down = evaluate(work, nullptr);
            work[p].data()[e] = orig;
            const double numeric = (up - down) / (2.0 * eps);
            const double a = analytic[p].data()[e];
            const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
            if (err > result.max_relative_error) result = {err, p, e};
        }
    }
    return result;
}

inline double grad_check(const LossBuilder& loss_fn, std::span<const DenseMatrix> params, double eps = 1e-5) {
    return grad_check_detailed(loss_fn, params, eps).max_relative_error;
}

} // namespace strgcl::ad
