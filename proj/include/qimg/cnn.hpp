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

// Classical baseline: one convolution layer, max-pooling, ReLU, then a dense head.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qimg/error.hpp"
#include "qimg/mlp.hpp"
#include "qimg/rng.hpp"

namespace qimg {

/// Valid (no padding) stride-1 cross-correlation of a single-channel image.
inline std::vector<double> conv2d_valid(std::span<const double> image, int width, int height,
                                        std::span<const double> kernel, int k, double bias = 0.0) {
    if (k < 1 || k > width || k > height) {
        throw ValidationError("kernel size " + std::to_string(k) + " does not fit a " + std::to_string(width) + "x" +
                              std::to_string(height) + " image");
    }
    if (image.size() != static_cast<std::size_t>(width) * height) throw ValidationError("image buffer size mismatch");
    if (kernel.size() != static_cast<std::size_t>(k) * k) throw ValidationError("kernel buffer size mismatch");
    const int ow = width - k + 1;
    const int oh = height - k + 1;
    std::vector<double> out(static_cast<std::size_t>(ow) * oh, bias);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int u = 0; u < k; ++u) {
                for (int v = 0; v < k; ++v) acc += kernel[static_cast<std::size_t>(u) * k + v] * image[static_cast<std::size_t>(y + u) * width + x + v];
            }
            out[static_cast<std::size_t>(y) * ow + x] += acc;
        }
    }
    return out;
}

/// Non-overlapping window x window max pooling; trailing rows/columns that do not
/// fill a window are dropped. `argmax`, when given, receives the source index of each max.
inline std::vector<double> max_pool(std::span<const double> map, int width, int height, int window,
                                    std::vector<std::size_t> *argmax = nullptr) {
    if (window < 1 || window > width || window > height) throw ValidationError("pool window does not fit the map");
    const int ow = width / window;
    const int oh = height / window;
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    if (argmax != nullptr) argmax->assign(out.size(), 0);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            std::size_t best = static_cast<std::size_t>(y * window) * width + x * window;
            for (int u = 0; u < window; ++u) {
                for (int v = 0; v < window; ++v) {
                    const std::size_t src = static_cast<std::size_t>(y * window + u) * width + x * window + v;
                    if (map[src] > map[best]) best = src;
                }
            }
            const std::size_t o = static_cast<std::size_t>(y) * ow + x;
            out[o] = map[best];
            if (argmax != nullptr) (*argmax)[o] = best;
        }
    }
    return out;
}

struct CnnConfig {
    int kernel = 3;
    int filters = 8;
    int pool = 2;
    std::vector<int> hidden{64};
};

struct CnnBaseline {
    int side = 0;
    int kernel = 3;
    int filters = 8;
    int pool = 2;
    std::vector<double> kernels;      ///< filters x kernel x kernel
    std::vector<double> kernel_bias;  ///< one per filter
    MlpModel head;

    int conv_side() const { return side - kernel + 1; }
    int pooled_side() const { return conv_side() / pool; }
    int flat_size() const { return filters * pooled_side() * pooled_side(); }
    int input_dim() const { return side * side; }
    int n_classes() const { return head.n_classes(); }

    std::size_t parameter_count() const { return kernels.size() + kernel_bias.size() + head.parameter_count(); }

    /// Zero-initialized model. Throws when the kernel or pool window does not fit.
    static CnnBaseline zeros(int side, int n_classes, const CnnConfig &cfg = {}) {
        if (side < 1 || cfg.kernel < 1 || cfg.kernel > side) {
            throw ValidationError("kernel " + std::to_string(cfg.kernel) + " does not fit side " + std::to_string(side));
        }
        if (cfg.filters < 1) throw ValidationError("at least one filter is required");
        if (cfg.pool < 1 || cfg.pool > side - cfg.kernel + 1) throw ValidationError("pool window does not fit the feature map");
        CnnBaseline m;
        m.side = side;
        m.kernel = cfg.kernel;
        m.filters = cfg.filters;
        m.pool = cfg.pool;
        m.kernels.assign(static_cast<std::size_t>(cfg.filters) * cfg.kernel * cfg.kernel, 0.0);
        m.kernel_bias.assign(static_cast<std::size_t>(cfg.filters), 0.0);
        std::vector<int> sizes{m.flat_size()};
        sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
        sizes.push_back(n_classes);
        m.head = MlpModel::zeros(std::move(sizes));
        return m;
    }

    /// Glorot-uniform kernels (fan_in = k*k, fan_out = filters*k*k) and head.
    static CnnBaseline random(int side, int n_classes, const CnnConfig &cfg, Rng &rng) {
        CnnBaseline m = zeros(side, n_classes, cfg);
        const double fan = static_cast<double>(cfg.kernel * cfg.kernel);
        const double limit = std::sqrt(6.0 / (fan + fan * cfg.filters));
        for (double &w : m.kernels) w = rng.uniform(-limit, limit);
        m.head = MlpModel::glorot(m.head.layer_sizes, rng);
        return m;
    }

    friend bool operator==(const CnnBaseline &, const CnnBaseline &) = default;
};

struct CnnGradients {
    std::vector<double> kernels;
    std::vector<double> kernel_bias;
    MlpGradients head;
};

namespace detail {

struct CnnTrace {
    std::vector<double> flat;                       ///< pooled, rectified, filter-major
    std::vector<std::vector<std::size_t>> argmax;   ///< per filter, pooled -> conv index
    MlpTrace head;
};

inline CnnTrace cnn_forward(const CnnBaseline &model, std::span<const double> image, Rng *dropout_rng) {
    if (static_cast<int>(image.size()) != model.input_dim()) {
        throw ValidationError("image length " + std::to_string(image.size()) + " does not match CNN input " +
                              std::to_string(model.input_dim()));
    }
    CnnTrace t;
    const int k = model.kernel;
    const std::size_t kk = static_cast<std::size_t>(k) * k;
    t.flat.reserve(static_cast<std::size_t>(model.flat_size()));
    t.argmax.resize(static_cast<std::size_t>(model.filters));
    for (int f = 0; f < model.filters; ++f) {
        const auto conv = conv2d_valid(image, model.side, model.side,
                                       std::span<const double>(model.kernels).subspan(f * kk, kk), k,
                                       model.kernel_bias[static_cast<std::size_t>(f)]);
        const auto pooled = max_pool(conv, model.conv_side(), model.conv_side(), model.pool, &t.argmax[static_cast<std::size_t>(f)]);
        for (double v : pooled) t.flat.push_back(v < 0.0 ? 0.0 : v);
    }
    t.head = mlp_forward(model.head, t.flat, dropout_rng);
    return t;
}

}  // namespace detail

/// Class probabilities in inference mode. `image` is side*side intensities (row-major).
inline std::vector<double> cnn_baseline_forward(const CnnBaseline &model, std::span<const double> image) {
    return detail::cnn_forward(model, image, nullptr).head.probs;
}

inline std::vector<double> predict_proba(const CnnBaseline &model, std::span<const double> x) {
    return cnn_baseline_forward(model, x);
}

inline CnnGradients batch_gradients(const CnnBaseline &model, const LabeledSet &set, std::span<const std::size_t> indices,
                                    Rng *dropout_rng) {
    CnnGradients g{std::vector<double>(model.kernels.size(), 0.0), std::vector<double>(model.kernel_bias.size(), 0.0),
                   MlpGradients::like(model.head)};
    if (indices.empty()) return g;
    const double weight = 1.0 / static_cast<double>(indices.size());
    const int k = model.kernel;
    const int cs = model.conv_side();
    const int ps = model.pooled_side();
    const std::size_t per_filter = static_cast<std::size_t>(ps) * ps;
    for (std::size_t idx : indices) {
        detail::check_label(set.labels[idx], model.n_classes());
        const auto &image = set.inputs[idx];
        const auto t = detail::cnn_forward(model, image, dropout_rng);
        const auto dflat = detail::mlp_backward(model.head, t.head, detail::softmax_ce_delta(t.head.probs, set.labels[idx]),
                                                g.head, weight);
        for (int f = 0; f < model.filters; ++f) {
            const auto &arg = t.argmax[static_cast<std::size_t>(f)];
            for (std::size_t p = 0; p < per_filter; ++p) {
                const std::size_t flat_index = static_cast<std::size_t>(f) * per_filter + p;
                if (t.flat[flat_index] <= 0.0) continue;
                const double d = weight * dflat[flat_index];
                if (d == 0.0) continue;
                const int cy = static_cast<int>(arg[p]) / cs;
                const int cx = static_cast<int>(arg[p]) % cs;
                g.kernel_bias[static_cast<std::size_t>(f)] += d;
                double *gk = &g.kernels[static_cast<std::size_t>(f) * k * k];
                for (int u = 0; u < k; ++u) {
                    for (int v = 0; v < k; ++v) gk[u * k + v] += d * image[static_cast<std::size_t>(cy + u) * model.side + cx + v];
                }
            }
        }
    }
    return g;
}

inline CnnGradients backprop_gradients(const CnnBaseline &model, const LabeledSet &batch) {
    std::vector<std::size_t> all(batch.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return batch_gradients(model, batch, all, nullptr);
}

inline void sgd_step(CnnBaseline &model, const CnnGradients &g, double learning_rate) {
    for (std::size_t i = 0; i < model.kernels.size(); ++i) model.kernels[i] -= learning_rate * g.kernels[i];
    for (std::size_t i = 0; i < model.kernel_bias.size(); ++i) model.kernel_bias[i] -= learning_rate * g.kernel_bias[i];
    sgd_step(model.head, g.head, learning_rate);
}

inline void set_dropout(CnnBaseline &model, double rate) { model.head.dropout_rate = rate; }
inline int output_classes(const CnnBaseline &model) { return model.n_classes(); }

}  // namespace qimg
