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

// Fully connected classifier: ReLU hidden layers, softmax output, inverted dropout
// on hidden activations during training.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qimg/error.hpp"
#include "qimg/metrics.hpp"
#include "qimg/rng.hpp"

namespace qimg {

/// Inputs with class labels. Every input has the same length.
struct LabeledSet {
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    bool empty() const { return labels.empty(); }
    void add(std::vector<double> x, int label) {
        inputs.push_back(std::move(x));
        labels.push_back(label);
    }
};

/// y = W x + b with W stored row-major as (out x in).
struct DenseLayer {
    int in = 0;
    int out = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    DenseLayer() = default;
    DenseLayer(int in_dim, int out_dim)
        : in(in_dim), out(out_dim), weights(static_cast<std::size_t>(in_dim) * out_dim, 0.0), bias(out_dim, 0.0) {}

    double &w(int o, int i) { return weights[static_cast<std::size_t>(o) * in + i]; }
    double w(int o, int i) const { return weights[static_cast<std::size_t>(o) * in + i]; }

    friend bool operator==(const DenseLayer &, const DenseLayer &) = default;
};

struct MlpModel {
    std::vector<int> layer_sizes;  ///< input, hidden..., classes
    std::vector<DenseLayer> layers;
    double dropout_rate = 0.0;
    std::vector<double> input_shift;  ///< empty, or one per input: x' = (x - shift) * scale
    std::vector<double> input_scale;

    /// All weights and biases zero.
    static MlpModel zeros(std::vector<int> sizes) {
        if (sizes.size() < 2) throw ValidationError("an MLP needs at least input and output sizes");
        for (int s : sizes) {
            if (s < 1) throw ValidationError("layer sizes must be positive");
        }
        MlpModel m;
        m.layer_sizes = std::move(sizes);
        for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) m.layers.emplace_back(m.layer_sizes[l], m.layer_sizes[l + 1]);
        return m;
    }

    /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
    static MlpModel glorot(std::vector<int> sizes, Rng &rng) {
        MlpModel m = zeros(std::move(sizes));
        for (auto &layer : m.layers) {
            const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
            for (double &w : layer.weights) w = rng.uniform(-limit, limit);
        }
        return m;
    }

    int input_dim() const { return layer_sizes.front(); }
    int n_classes() const { return layer_sizes.back(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto &l : layers) n += l.weights.size() + l.bias.size();
        return n;
    }

    friend bool operator==(const MlpModel &, const MlpModel &) = default;
};

/// Same shapes as the model's layers.
struct MlpGradients {
    std::vector<DenseLayer> layers;

    static MlpGradients like(const MlpModel &m) {
        MlpGradients g;
        for (const auto &l : m.layers) g.layers.emplace_back(l.in, l.out);
        return g;
    }

    void scale(double s) {
        for (auto &l : layers) {
            for (double &w : l.weights) w *= s;
            for (double &b : l.bias) b *= s;
        }
    }
};

namespace detail {

struct MlpTrace {
    std::vector<std::vector<double>> inputs;  ///< input to each layer
    std::vector<std::vector<double>> pre;     ///< pre-activation of each layer
    std::vector<std::vector<double>> masks;   ///< dropout scale per hidden layer (empty in inference)
    std::vector<double> probs;
};

/// Forward pass. Dropout masks are drawn only when `dropout_rng` is given.
inline MlpTrace mlp_forward(const MlpModel &model, std::span<const double> x, Rng *dropout_rng) {
    if (static_cast<int>(x.size()) != model.input_dim()) {
        throw ValidationError("feature length " + std::to_string(x.size()) + " does not match model input " +
                              std::to_string(model.input_dim()));
    }
    MlpTrace t;
    std::vector<double> a(x.begin(), x.end());
    if (!model.input_shift.empty()) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] - model.input_shift[i]) * model.input_scale[i];
    }
    const double keep = 1.0 - model.dropout_rate;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const DenseLayer &layer = model.layers[l];
        std::vector<double> z(layer.bias);
        for (int o = 0; o < layer.out; ++o) {
            const double *row = &layer.weights[static_cast<std::size_t>(o) * layer.in];
            double acc = 0.0;
            for (int i = 0; i < layer.in; ++i) acc += row[i] * a[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(o)] += acc;
        }
        t.inputs.push_back(std::move(a));
        const bool hidden = l + 1 < model.layers.size();
        if (hidden) {
            a.assign(z.size(), 0.0);
            std::vector<double> mask;
            if (dropout_rng != nullptr && model.dropout_rate > 0.0) {
                mask.resize(z.size());
                for (double &m : mask) m = dropout_rng->bernoulli(keep) ? 1.0 / keep : 0.0;
            }
            for (std::size_t i = 0; i < z.size(); ++i) {
                a[i] = z[i] < 0.0 ? 0.0 : z[i];
                if (!mask.empty()) a[i] *= mask[i];
            }
            t.masks.push_back(std::move(mask));
        } else {
            t.probs = softmax(z);
        }
        t.pre.push_back(std::move(z));
    }
    return t;
}

/// Adds weight * d(loss)/d(params) into `grads`, given d(loss)/d(logits). Returns d(loss)/d(input).
inline std::vector<double> mlp_backward(const MlpModel &model, const MlpTrace &t, std::vector<double> dz,
                                        MlpGradients &grads, double weight) {
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const DenseLayer &layer = model.layers[l];
        DenseLayer &g = grads.layers[l];
        const auto &a = t.inputs[l];
        std::vector<double> da(static_cast<std::size_t>(layer.in), 0.0);
        for (int o = 0; o < layer.out; ++o) {
            const double d = dz[static_cast<std::size_t>(o)];
            if (d == 0.0) continue;
            const double wd = weight * d;
            g.bias[static_cast<std::size_t>(o)] += wd;
            double *grow = &g.weights[static_cast<std::size_t>(o) * layer.in];
            const double *row = &layer.weights[static_cast<std::size_t>(o) * layer.in];
            for (int i = 0; i < layer.in; ++i) {
                grow[i] += wd * a[static_cast<std::size_t>(i)];
                da[static_cast<std::size_t>(i)] += row[i] * d;
            }
        }
        if (l == 0) return da;
        const auto &z = t.pre[l - 1];
        const auto &mask = t.masks[l - 1];
        for (std::size_t i = 0; i < da.size(); ++i) {
            da[i] = z[i] > 0.0 ? da[i] : 0.0;
            if (!mask.empty()) da[i] *= mask[i];
        }
        dz = std::move(da);
    }
    return {};
}

inline std::vector<double> softmax_ce_delta(const std::vector<double> &probs, int label) {
    std::vector<double> d(probs);
    d[static_cast<std::size_t>(label)] -= 1.0;
    return d;
}

inline void check_label(int label, int n_classes) {
    if (label < 0 || label >= n_classes) {
        throw ValidationError("label " + std::to_string(label) + " outside [0, " + std::to_string(n_classes) + ")");
    }
}

}  // namespace detail

/// Class probabilities in inference mode (no dropout).
inline std::vector<double> forward(const MlpModel &model, std::span<const double> features) {
    return detail::mlp_forward(model, features, nullptr).probs;
}

inline std::vector<double> predict_proba(const MlpModel &model, std::span<const double> x) { return forward(model, x); }

/// Mean cross-entropy gradient over `indices` of `set`; dropout is applied when `dropout_rng` is set.
inline MlpGradients batch_gradients(const MlpModel &model, const LabeledSet &set, std::span<const std::size_t> indices,
                                    Rng *dropout_rng) {
    MlpGradients grads = MlpGradients::like(model);
    if (indices.empty()) return grads;
    const double weight = 1.0 / static_cast<double>(indices.size());
    for (std::size_t idx : indices) {
        detail::check_label(set.labels[idx], model.n_classes());
        const auto trace = detail::mlp_forward(model, set.inputs[idx], dropout_rng);
        detail::mlp_backward(model, trace, detail::softmax_ce_delta(trace.probs, set.labels[idx]), grads, weight);
    }
    return grads;
}

/// Gradients of the mean cross-entropy over the whole batch, inference mode.
inline MlpGradients backprop_gradients(const MlpModel &model, const LabeledSet &batch) {
    std::vector<std::size_t> all(batch.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return batch_gradients(model, batch, all, nullptr);
}

inline void sgd_step(MlpModel &model, const MlpGradients &grads, double learning_rate) {
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto &layer = model.layers[l];
        const auto &g = grads.layers[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= learning_rate * g.weights[i];
        for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= learning_rate * g.bias[i];
    }
}

/// Sets the input standardization to the per-feature mean and inverse standard deviation
/// of `set`. Constant features are only shifted.
inline void fit_standardization(MlpModel &model, const LabeledSet &set) {
    if (set.empty()) throw ValidationError("cannot fit standardization on an empty set");
    const auto d = static_cast<std::size_t>(model.input_dim());
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (const auto &x : set.inputs) {
        if (x.size() != d) throw ValidationError("feature length does not match model input");
        for (std::size_t i = 0; i < d; ++i) mean[i] += x[i];
    }
    const double n = static_cast<double>(set.size());
    for (double &m : mean) m /= n;
    for (const auto &x : set.inputs) {
        for (std::size_t i = 0; i < d; ++i) var[i] += (x[i] - mean[i]) * (x[i] - mean[i]);
    }
    model.input_shift = mean;
    model.input_scale.assign(d, 1.0);
    for (std::size_t i = 0; i < d; ++i) {
        const double sd = std::sqrt(var[i] / n);
        if (sd > 1e-8) model.input_scale[i] = 1.0 / sd;
    }
}

inline void set_dropout(MlpModel &model, double rate) { model.dropout_rate = rate; }
inline int output_classes(const MlpModel &model) { return model.n_classes(); }

}  // namespace qimg
