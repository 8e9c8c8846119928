// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "strgcl/linalg/matrix.hpp"

namespace strgcl {

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<DenseMatrix> m, v;
    std::size_t t = 0;
};

/// One bias-corrected Adam step with coupled L2 decay (wd·p added to the
/// gradient). `names` is only used to label diagnostics.
inline void adam_step(std::span<DenseMatrix* const> params, std::span<const DenseMatrix> grads, AdamState& st,
                      double lr, double weight_decay, std::span<const std::string> names = {}) {
    require(params.size() == grads.size(), ErrorKind::shape, "adam_step: parameter/gradient count mismatch");
    if (st.m.empty()) {
        for (const DenseMatrix* p : params) {
            st.m.emplace_back(p->rows(), p->cols());
            st.v.emplace_back(p->rows(), p->cols());
        }
    }
    require(st.m.size() == params.size(), ErrorKind::shape, "adam_step: state built for a different parameter set");
    for (std::size_t k = 0; k < params.size(); ++k) {
        require_same_shape(*params[k], grads[k], "adam_step");
        require_same_shape(*params[k], st.m[k], "adam_step state");
        if (!grads[k].all_finite()) {
            std::size_t bad = 0;
            while (std::isfinite(grads[k].data()[bad])) ++bad;
            const std::string who = k < names.size() ? names[k] : "#" + std::to_string(k);
            fail(ErrorKind::numeric, "non-finite gradient in parameter " + who + " at entry " + std::to_string(bad) +
                                         " (step " + std::to_string(st.t + 1) + ")");
        }
    }
    ++st.t;
    const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        double* p = params[k]->data();
        const double* g = grads[k].data();
        double* m = st.m[k].data();
        double* v = st.v[k].data();
        for (std::size_t i = 0; i < params[k]->size(); ++i) {
            const double gi = g[i] + weight_decay * p[i];
            m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * gi;
            v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * gi * gi;
            p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + st.eps);
        }
    }
}

} // namespace strgcl
