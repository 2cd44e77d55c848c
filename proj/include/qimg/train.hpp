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

// Minibatch SGD training shared by the MLP head and the CNN baseline.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qimg/cnn.hpp"
#include "qimg/error.hpp"
#include "qimg/metrics.hpp"
#include "qimg/mlp.hpp"
#include "qimg/rng.hpp"

namespace qimg {

struct TrainConfig {
    int epochs = 10;
    int batch_size = 8;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    double dropout_rate = 0.2;
    std::vector<int> hidden{64};

    void validate() const {
        if (epochs < 1) throw ValidationError("epochs must be >= 1");
        if (batch_size < 1) throw ValidationError("batch size must be >= 1");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be > 0");
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ValidationError("dropout rate must lie in [0, 1)");
        for (int h : hidden) {
            if (h < 1) throw ValidationError("hidden widths must be positive");
        }
    }
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;

    friend bool operator==(const EpochMetrics &, const EpochMetrics &) = default;
};

struct TrainReport {
    std::vector<EpochMetrics> epochs;
    double runtime_seconds = 0.0;  ///< wall clock, training plus per-epoch validation
    ConfusionMatrix confusion;     ///< final model on the validation set
};

template <typename Model>
struct TrainResult {
    Model model;
    TrainReport report;
};

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
    std::vector<int> predictions;
};

/// Mean cross-entropy, accuracy and argmax predictions in inference mode.
template <typename Model>
Evaluation evaluate(const Model &model, const LabeledSet &set) {
    if (set.empty()) throw ValidationError("cannot evaluate on an empty set");
    Evaluation e;
    e.predictions.reserve(set.size());
    double total = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto probs = predict_proba(model, set.inputs[i]);
        total += cross_entropy(probs, set.labels[i]);
        e.predictions.push_back(argmax(probs));
    }
    e.loss = total / static_cast<double>(set.size());
    e.accuracy = accuracy(e.predictions, set.labels);
    return e;
}

namespace detail {

inline void check_training_sets(const LabeledSet &train_set, const LabeledSet &val_set, int n_classes) {
    if (train_set.empty()) throw ValidationError("training set is empty");
    if (val_set.empty()) throw ValidationError("validation set is empty");
    std::vector<int> seen(static_cast<std::size_t>(n_classes), 0);
    for (int label : train_set.labels) {
        check_label(label, n_classes);
        seen[static_cast<std::size_t>(label)] = 1;
    }
    for (int label : val_set.labels) check_label(label, n_classes);
    for (int c = 0; c < n_classes; ++c) {
        if (!seen[static_cast<std::size_t>(c)]) throw ValidationError("class " + std::to_string(c) + " has no training sample");
    }
}

}  // namespace detail

/// Minibatch SGD on mean cross-entropy. Sample order and dropout masks come from
/// `config.seed`, so identical inputs give identical models and reports (runtime aside).
template <typename Model>
TrainResult<Model> train(Model model, const LabeledSet &train_set, const LabeledSet &val_set, const TrainConfig &config) {
    config.validate();
    detail::check_training_sets(train_set, val_set, output_classes(model));
    set_dropout(model, config.dropout_rate);

    const auto started = std::chrono::steady_clock::now();
    TrainResult<Model> result{std::move(model), {}};
    Rng order_rng = Rng::derive(config.seed, 1);
    Rng dropout_rng = Rng::derive(config.seed, 2);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto batch = static_cast<std::size_t>(config.batch_size);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle(order.begin(), order.end(), order_rng);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t len = std::min(batch, order.size() - start);
            const auto grads = batch_gradients(result.model, train_set, std::span(order).subspan(start, len), &dropout_rng);
            sgd_step(result.model, grads, config.learning_rate);
        }
        const auto tr = evaluate(result.model, train_set);
        const auto va = evaluate(result.model, val_set);
        if (!std::isfinite(tr.loss) || !std::isfinite(va.loss)) {
            throw DivergedTrainingError(epoch, "non-finite loss");
        }
        result.report.epochs.push_back({epoch, tr.loss, tr.accuracy, va.loss, va.accuracy});
        if (epoch == config.epochs) {
            result.report.confusion = confusion_matrix(va.predictions, val_set.labels, output_classes(result.model));
        }
    }
    result.report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// One row per epoch: epoch,train_loss,train_acc,val_loss,val_acc.
inline std::string report_to_csv(const TrainReport &report) {
    std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (const auto &e : report.epochs) {
        out += std::to_string(e.epoch) + ',' + format_double(e.train_loss) + ',' + format_double(e.train_accuracy) + ',' +
               format_double(e.val_loss) + ',' + format_double(e.val_accuracy) + '\n';
    }
    return out;
}

/// Rows are true classes, columns predicted classes.
inline std::string confusion_to_csv(const ConfusionMatrix &cm, const std::vector<std::string> &class_names) {
    std::string out = "true\\predicted";
    for (int j = 0; j < cm.n_classes(); ++j) {
        out += ',' + (static_cast<std::size_t>(j) < class_names.size() ? class_names[static_cast<std::size_t>(j)] : std::to_string(j));
    }
    out += '\n';
    for (int i = 0; i < cm.n_classes(); ++i) {
        out += static_cast<std::size_t>(i) < class_names.size() ? class_names[static_cast<std::size_t>(i)] : std::to_string(i);
        for (int j = 0; j < cm.n_classes(); ++j) out += ',' + std::to_string(cm.at(i, j));
        out += '\n';
    }
    return out;
}

}  // namespace qimg
