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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qimg/error.hpp"

namespace qimg {

/// Probability floor used by cross_entropy.
inline constexpr double kProbabilityFloor = 1e-12;

/// Numerically stable softmax.
inline std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    if (out.empty()) return out;
    const double top = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (double &v : out) {
        v = std::exp(v - top);
        total += v;
    }
    for (double &v : out) v /= total;
    return out;
}

/// -log(predicted[label]), with predicted clamped below at 1e-12.
inline double cross_entropy(std::span<const double> predicted, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= predicted.size()) {
        throw ValidationError("label " + std::to_string(label) + " outside [0, " + std::to_string(predicted.size()) + ")");
    }
    return -std::log(std::max(predicted[static_cast<std::size_t>(label)], kProbabilityFloor));
}

/// Index of the largest entry (first one on ties).
inline int argmax(std::span<const double> v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Fraction of predictions equal to their label. For multiclass problems this is the
/// one-vs-rest micro-averaged (TP + TN) / (TP + TN + FP + FN).
inline double accuracy(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.empty()) throw ValidationError("accuracy of an empty prediction set");
    if (predictions.size() != labels.size()) throw ValidationError("prediction and label counts differ");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

/// Square count matrix indexed (true class, predicted class).
class ConfusionMatrix {
   public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int n_classes) : n_(n_classes), counts_(static_cast<std::size_t>(n_classes) * n_classes) {
        if (n_classes < 1) throw ValidationError("confusion matrix needs at least one class");
    }

    int n_classes() const { return n_; }
    std::uint64_t at(int truth, int predicted) const { return counts_[index(truth, predicted)]; }
    void add(int truth, int predicted) { ++counts_[index(truth, predicted)]; }

    std::uint64_t trace() const {
        std::uint64_t t = 0;
        for (int i = 0; i < n_; ++i) t += at(i, i);
        return t;
    }
    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts_) t += c;
        return t;
    }
    std::uint64_t row_sum(int truth) const {
        std::uint64_t t = 0;
        for (int j = 0; j < n_; ++j) t += at(truth, j);
        return t;
    }
    double accuracy() const { return total() == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(total()); }

    friend bool operator==(const ConfusionMatrix &, const ConfusionMatrix &) = default;

   private:
    std::size_t index(int truth, int predicted) const {
        if (truth < 0 || truth >= n_ || predicted < 0 || predicted >= n_) {
            throw ValidationError("class index outside confusion matrix of size " + std::to_string(n_));
        }
        return static_cast<std::size_t>(truth) * n_ + predicted;
    }

    int n_ = 0;
    std::vector<std::uint64_t> counts_;
};

inline ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels, int n_classes) {
    if (predictions.size() != labels.size()) throw ValidationError("prediction and label counts differ");
    ConfusionMatrix cm(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) cm.add(labels[i], predictions[i]);
    return cm;
}

}  // namespace qimg
