// Copyright 2026 The qimg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Central finite-difference check of the classifier gradients.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qimg/cnn.hpp"
#include "qimg/metrics.hpp"
#include "qimg/mlp.hpp"

namespace qimg::testing {

inline std::vector<double *> parameters(MlpModel &m) {
    std::vector<double *> out;
    for (auto &l : m.layers) {
        for (double &w : l.weights) out.push_back(&w);
        for (double &b : l.bias) out.push_back(&b);
    }
    return out;
}

inline std::vector<double> flatten(const MlpGradients &g) {
    std::vector<double> out;
    for (const auto &l : g.layers) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

inline std::vector<double *> parameters(CnnBaseline &m) {
    std::vector<double *> out;
    for (double &w : m.kernels) out.push_back(&w);
    for (double &b : m.kernel_bias) out.push_back(&b);
    const auto head = parameters(m.head);
    out.insert(out.end(), head.begin(), head.end());
    return out;
}

inline std::vector<double> flatten(const CnnGradients &g) {
    std::vector<double> out(g.kernels);
    out.insert(out.end(), g.kernel_bias.begin(), g.kernel_bias.end());
    const auto head = flatten(g.head);
    out.insert(out.end(), head.begin(), head.end());
    return out;
}

template <typename Model>
double mean_loss(const Model &model, const LabeledSet &batch) {
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) total += cross_entropy(predict_proba(model, batch.inputs[i]), batch.labels[i]);
    return total / static_cast<double>(batch.size());
}

/// max |analytic - numeric| / max(|analytic|, |numeric|, 1e-6) over all parameters.
template <typename Model>
double max_gradient_error(Model model, const LabeledSet &batch, double h = 1e-5) {
    const auto analytic = flatten(backprop_gradients(model, batch));
    const auto params = parameters(model);
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = *params[i];
        *params[i] = saved + h;
        const double up = mean_loss(model, batch);
        *params[i] = saved - h;
        const double down = mean_loss(model, batch);
        *params[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
    }
    return worst;
}

/// Up to 3 dense layers of at most 32 units, random biases and input standardization.
inline MlpModel random_small_mlp(Rng &rng, int &input_dim) {
    input_dim = 1 + static_cast<int>(rng.below(12));
    std::vector<int> sizes{input_dim};
    const int hidden = static_cast<int>(rng.below(3));
    for (int l = 0; l < hidden; ++l) sizes.push_back(1 + static_cast<int>(rng.below(32)));
    sizes.push_back(2 + static_cast<int>(rng.below(4)));
    MlpModel m = MlpModel::glorot(sizes, rng);
    for (auto &l : m.layers) {
        for (double &b : l.bias) b = rng.uniform(-0.1, 0.1);
    }
    if (rng.bernoulli(0.5)) {
        for (int i = 0; i < input_dim; ++i) {
            m.input_shift.push_back(rng.uniform(-0.5, 0.5));
            m.input_scale.push_back(rng.uniform(0.5, 2.0));
        }
    }
    return m;
}

inline CnnBaseline random_small_cnn(Rng &rng) {
    CnnConfig cfg;
    cfg.kernel = 2 + static_cast<int>(rng.below(2));
    cfg.filters = 1 + static_cast<int>(rng.below(3));
    cfg.pool = 1 + static_cast<int>(rng.below(2));
    cfg.hidden.clear();
    if (rng.bernoulli(0.5)) cfg.hidden.push_back(2 + static_cast<int>(rng.below(8)));
    const int side = 5 + static_cast<int>(rng.below(4));
    CnnBaseline m = CnnBaseline::random(side, 2 + static_cast<int>(rng.below(3)), cfg, rng);
    for (double &b : m.kernel_bias) b = rng.uniform(-0.1, 0.1);
    for (auto &l : m.head.layers) {
        for (double &b : l.bias) b = rng.uniform(-0.1, 0.1);
    }
    return m;
}

inline LabeledSet random_batch(Rng &rng, int input_dim, int n_classes, double lo, double hi) {
    LabeledSet batch;
    const int n = 1 + static_cast<int>(rng.below(6));
    for (int i = 0; i < n; ++i) {
        std::vector<double> x(static_cast<std::size_t>(input_dim));
        for (double &v : x) v = rng.uniform(lo, hi);
        batch.add(std::move(x), static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes))));
    }
    return batch;
}

}  // namespace qimg::testing
