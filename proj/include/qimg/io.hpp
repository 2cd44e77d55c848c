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

// JSON persistence for feature sets and trained models.
//
// Feature file (format_version 1):
//   {"format_version":1, "method":"qcnn", "side":16, "feature_length":64, "count":N,
//    "shots":0, "dataset_hash":"...", "class_names":[...], "labels":[...], "rows":[[...], ...]}
//
// Model file (format_version 1):
//   {"format_version":1, "kind":"mlp"|"cnn", "layer_sizes":[...],
//    "weights":[[row-major out x in], ...], "biases":[[...], ...],
//    "activations":["relu", ..., "softmax"], "dropout_rate":r,
//    "conv":{...}            (cnn only)
//    "metadata":{"method", "seed", "dataset_hash", "side", "class_names", "shots",
//                "gamma", "noise_p", "readout_p"}}

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qimg/cnn.hpp"
#include "qimg/error.hpp"
#include "qimg/mlp.hpp"

namespace qimg {

inline constexpr int kFeatureFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open file");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw IoError(path.string() + ": invalid JSON: " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw IoError(path.string() + ": write failed");
}

inline void write_json_file(const std::filesystem::path &path, const nlohmann::json &doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

/// Parses `doc[key]` as T, turning schema problems into IoError mentioning `what`.
template <typename T>
T json_field(const nlohmann::json &doc, const char *key, const std::string &what) {
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw IoError(what + ": bad or missing field '" + key + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Features

struct FeatureSet {
    std::string method;
    int side = 0;
    std::size_t feature_length = 0;
    std::uint64_t shots = 0;
    double noise_p = 0.0;
    double readout_p = 0.0;
    std::uint64_t seed = 0;  ///< encoding seed
    std::optional<double> gamma;
    std::string dataset_hash;
    std::vector<std::string> class_names;
    std::vector<int> labels;
    std::vector<std::vector<double>> rows;

    friend bool operator==(const FeatureSet &, const FeatureSet &) = default;
};

inline nlohmann::json to_json(const FeatureSet &fs) {
    return {{"format_version", kFeatureFormatVersion},
            {"method", fs.method},
            {"side", fs.side},
            {"feature_length", fs.feature_length},
            {"count", fs.rows.size()},
            {"shots", fs.shots},
            {"noise_p", fs.noise_p},
            {"readout_p", fs.readout_p},
            {"seed", fs.seed},
            {"gamma", fs.gamma ? nlohmann::json(*fs.gamma) : nlohmann::json(nullptr)},
            {"dataset_hash", fs.dataset_hash},
            {"class_names", fs.class_names},
            {"labels", fs.labels},
            {"rows", fs.rows}};
}

inline FeatureSet feature_set_from_json(const nlohmann::json &doc, const std::string &what = "feature file") {
    const int version = json_field<int>(doc, "format_version", what);
    if (version != kFeatureFormatVersion) throw IoError(what + ": unsupported format_version " + std::to_string(version));
    FeatureSet fs;
    fs.method = json_field<std::string>(doc, "method", what);
    fs.side = json_field<int>(doc, "side", what);
    fs.feature_length = json_field<std::size_t>(doc, "feature_length", what);
    fs.shots = json_field<std::uint64_t>(doc, "shots", what);
    fs.noise_p = json_field<double>(doc, "noise_p", what);
    fs.readout_p = json_field<double>(doc, "readout_p", what);
    fs.seed = json_field<std::uint64_t>(doc, "seed", what);
    if (!json_field<nlohmann::json>(doc, "gamma", what).is_null()) fs.gamma = json_field<double>(doc, "gamma", what);
    fs.dataset_hash = json_field<std::string>(doc, "dataset_hash", what);
    fs.class_names = json_field<std::vector<std::string>>(doc, "class_names", what);
    fs.labels = json_field<std::vector<int>>(doc, "labels", what);
    fs.rows = json_field<std::vector<std::vector<double>>>(doc, "rows", what);
    const auto count = json_field<std::size_t>(doc, "count", what);
    if (count != fs.rows.size() || count != fs.labels.size()) throw IoError(what + ": count does not match rows/labels");
    for (const auto &row : fs.rows) {
        if (row.size() != fs.feature_length) throw IoError(what + ": row length differs from feature_length");
    }
    for (int label : fs.labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= fs.class_names.size()) throw IoError(what + ": label out of range");
    }
    return fs;
}

inline void save_features(const std::filesystem::path &path, const FeatureSet &fs) { write_json_file(path, to_json(fs)); }
inline FeatureSet load_features(const std::filesystem::path &path) {
    return feature_set_from_json(read_json_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Models

struct ModelMetadata {
    std::string method;  ///< qcnn | frqi | neqr | cnn | mlp
    std::uint64_t seed = 0;
    std::string dataset_hash;
    int side = 0;
    std::vector<std::string> class_names;
    std::uint64_t shots = 0;
    std::optional<double> gamma;
    double noise_p = 0.0;
    double readout_p = 0.0;

    friend bool operator==(const ModelMetadata &, const ModelMetadata &) = default;
};

using AnyModel = std::variant<MlpModel, CnnBaseline>;

struct ModelFile {
    AnyModel model;
    ModelMetadata metadata;
};

namespace detail {

inline nlohmann::json mlp_json(const MlpModel &m) {
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    nlohmann::json activations = nlohmann::json::array();
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        weights.push_back(m.layers[l].weights);
        biases.push_back(m.layers[l].bias);
        activations.push_back(l + 1 < m.layers.size() ? "relu" : "softmax");
    }
    return {{"layer_sizes", m.layer_sizes}, {"weights", weights}, {"biases", biases}, {"activations", activations},
            {"dropout_rate", m.dropout_rate}, {"input_shift", m.input_shift}, {"input_scale", m.input_scale}};
}

inline MlpModel mlp_from_json(const nlohmann::json &doc, const std::string &what) {
    MlpModel m;
    try {
        m = MlpModel::zeros(json_field<std::vector<int>>(doc, "layer_sizes", what));
    } catch (const ValidationError &e) {
        throw IoError(what + ": " + e.what());
    }
    m.dropout_rate = json_field<double>(doc, "dropout_rate", what);
    const auto weights = json_field<std::vector<std::vector<double>>>(doc, "weights", what);
    const auto biases = json_field<std::vector<std::vector<double>>>(doc, "biases", what);
    const auto activations = json_field<std::vector<std::string>>(doc, "activations", what);
    if (weights.size() != m.layers.size() || biases.size() != m.layers.size() || activations.size() != m.layers.size()) {
        throw IoError(what + ": layer count does not match layer_sizes");
    }
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        if (weights[l].size() != m.layers[l].weights.size() || biases[l].size() != m.layers[l].bias.size()) {
            throw IoError(what + ": parameter shape mismatch in layer " + std::to_string(l));
        }
        const char *want = l + 1 < m.layers.size() ? "relu" : "softmax";
        if (activations[l] != want) throw IoError(what + ": unsupported activation '" + activations[l] + "'");
        m.layers[l].weights = weights[l];
        m.layers[l].bias = biases[l];
    }
    m.input_shift = json_field<std::vector<double>>(doc, "input_shift", what);
    m.input_scale = json_field<std::vector<double>>(doc, "input_scale", what);
    const auto d = static_cast<std::size_t>(m.input_dim());
    if (m.input_shift.size() != m.input_scale.size() || (!m.input_shift.empty() && m.input_shift.size() != d)) {
        throw IoError(what + ": input standardization does not match layer_sizes");
    }
    return m;
}

}  // namespace detail

inline nlohmann::json to_json(const ModelFile &file) {
    nlohmann::json doc;
    doc["format_version"] = kModelFormatVersion;
    if (const auto *mlp = std::get_if<MlpModel>(&file.model)) {
        doc["kind"] = "mlp";
        doc.update(detail::mlp_json(*mlp));
    } else {
        const auto &cnn = std::get<CnnBaseline>(file.model);
        doc["kind"] = "cnn";
        doc.update(detail::mlp_json(cnn.head));
        doc["conv"] = {{"side", cnn.side},       {"kernel", cnn.kernel},   {"filters", cnn.filters},
                       {"pool", cnn.pool},       {"kernels", cnn.kernels}, {"kernel_bias", cnn.kernel_bias}};
    }
    const auto &md = file.metadata;
    doc["metadata"] = {{"method", md.method},
                       {"seed", md.seed},
                       {"dataset_hash", md.dataset_hash},
                       {"side", md.side},
                       {"class_names", md.class_names},
                       {"shots", md.shots},
                       {"gamma", md.gamma ? nlohmann::json(*md.gamma) : nlohmann::json(nullptr)},
                       {"noise_p", md.noise_p},
                       {"readout_p", md.readout_p}};
    return doc;
}

inline ModelFile model_from_json(const nlohmann::json &doc, const std::string &what = "model file") {
    const int version = json_field<int>(doc, "format_version", what);
    if (version != kModelFormatVersion) throw IoError(what + ": unsupported format_version " + std::to_string(version));
    const auto kind = json_field<std::string>(doc, "kind", what);
    ModelFile file{MlpModel{}, {}};
    MlpModel head = detail::mlp_from_json(doc, what);
    if (kind == "mlp") {
        file.model = std::move(head);
    } else if (kind == "cnn") {
        const auto conv = json_field<nlohmann::json>(doc, "conv", what);
        CnnConfig cfg;
        cfg.kernel = json_field<int>(conv, "kernel", what);
        cfg.filters = json_field<int>(conv, "filters", what);
        cfg.pool = json_field<int>(conv, "pool", what);
        cfg.hidden.assign(head.layer_sizes.begin() + 1, head.layer_sizes.end() - 1);
        CnnBaseline cnn;
        try {
            cnn = CnnBaseline::zeros(json_field<int>(conv, "side", what), head.n_classes(), cfg);
        } catch (const ValidationError &e) {
            throw IoError(what + ": " + e.what());
        }
        if (cnn.head.layer_sizes != head.layer_sizes) throw IoError(what + ": head does not match convolution shape");
        cnn.kernels = json_field<std::vector<double>>(conv, "kernels", what);
        cnn.kernel_bias = json_field<std::vector<double>>(conv, "kernel_bias", what);
        if (cnn.kernels.size() != static_cast<std::size_t>(cfg.filters * cfg.kernel * cfg.kernel) ||
            cnn.kernel_bias.size() != static_cast<std::size_t>(cfg.filters)) {
            throw IoError(what + ": kernel shape mismatch");
        }
        cnn.head = std::move(head);
        file.model = std::move(cnn);
    } else {
        throw IoError(what + ": unknown model kind '" + kind + "'");
    }
    const auto md = json_field<nlohmann::json>(doc, "metadata", what);
    file.metadata.method = json_field<std::string>(md, "method", what);
    file.metadata.seed = json_field<std::uint64_t>(md, "seed", what);
    file.metadata.dataset_hash = json_field<std::string>(md, "dataset_hash", what);
    file.metadata.side = json_field<int>(md, "side", what);
    file.metadata.class_names = json_field<std::vector<std::string>>(md, "class_names", what);
    file.metadata.shots = json_field<std::uint64_t>(md, "shots", what);
    if (md.contains("gamma") && !md.at("gamma").is_null()) file.metadata.gamma = json_field<double>(md, "gamma", what);
    file.metadata.noise_p = json_field<double>(md, "noise_p", what);
    file.metadata.readout_p = json_field<double>(md, "readout_p", what);
    return file;
}

inline void save_model(const std::filesystem::path &path, const ModelFile &file) { write_json_file(path, to_json(file)); }
inline ModelFile load_model(const std::filesystem::path &path) { return model_from_json(read_json_file(path), path.string()); }

}  // namespace qimg
