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

// End-to-end pipelines (encode -> train -> evaluate) and the comparison table.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qimg/cnn.hpp"
#include "qimg/dataset.hpp"
#include "qimg/encoders.hpp"
#include "qimg/error.hpp"
#include "qimg/io.hpp"
#include "qimg/mlp.hpp"
#include "qimg/noise.hpp"
#include "qimg/train.hpp"

namespace qimg {

/// Everything that can sit in front of the dense head.
enum class PipelineKind { QCNN, FRQI, NEQR, CNN, MLP };

inline std::string_view to_string(PipelineKind k) {
    switch (k) {
        case PipelineKind::QCNN: return "qcnn";
        case PipelineKind::FRQI: return "frqi";
        case PipelineKind::NEQR: return "neqr";
        case PipelineKind::CNN: return "cnn";
        case PipelineKind::MLP: return "mlp";
    }
    return "?";
}

inline PipelineKind parse_pipeline(std::string_view name) {
    for (auto k : {PipelineKind::QCNN, PipelineKind::FRQI, PipelineKind::NEQR, PipelineKind::CNN, PipelineKind::MLP}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("unknown method '" + std::string(name) + "' (expected qcnn|frqi|neqr|cnn|mlp)");
}

inline bool is_quantum(PipelineKind k) { return k == PipelineKind::QCNN || k == PipelineKind::FRQI || k == PipelineKind::NEQR; }

inline Method quantum_method(PipelineKind k) {
    switch (k) {
        case PipelineKind::QCNN: return Method::QCNN;
        case PipelineKind::FRQI: return Method::FRQI;
        case PipelineKind::NEQR: return Method::NEQR;
        default: throw ValidationError(std::string(to_string(k)) + " is not a quantum encoder");
    }
}

struct EncodeOptions {
    std::uint64_t shots = 0;  ///< 0 = exact
    double noise_p = 0.0;
    double readout_p = 0.0;
    std::uint64_t seed = 0;

    bool noisy() const { return noise_p > 0.0 || readout_p > 0.0; }
};

/// Classifier input for one image. `index` selects the image's private random stream.
inline std::vector<double> encode_image(const GrayImage &img, PipelineKind kind, const EncodeOptions &opt,
                                        std::uint64_t index) {
    if (!is_quantum(kind)) {
        std::vector<double> out(img.size());
        for (std::size_t i = 0; i < img.size(); ++i) out[i] = img.pixels[i] / 255.0;
        return out;
    }
    const Method m = quantum_method(kind);
    const std::uint64_t seed = Rng::mix(opt.seed ^ Rng::mix(index));
    if (opt.noisy()) {
        if (opt.shots == 0) throw ValidationError("noisy encoding needs shots >= 1");
        return noisy_extract_features(img, m, NoiseSpec{opt.noise_p, opt.readout_p, seed}, opt.shots).values;
    }
    return extract_features(img, m, opt.shots, seed).values;
}

struct EncodedImages {
    std::vector<std::vector<double>> rows;
    std::vector<double> seconds;  ///< per image
};

inline EncodedImages encode_dataset(const Dataset &ds, PipelineKind kind, const EncodeOptions &opt) {
    EncodedImages out;
    out.rows.reserve(ds.size());
    out.seconds.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        out.rows.push_back(encode_image(ds.samples[i].image, kind, opt, i));
        out.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return out;
}

inline double mean_of(const std::vector<double> &v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// One row of the comparison table.
struct BenchResult {
    std::string method;
    std::string dataset_id;
    std::size_t sample_count = 0;
    std::size_t train_count = 0;
    std::size_t val_count = 0;
    std::size_t feature_size = 0;
    std::size_t parameter_count = 0;
    double accuracy = 0.0;    ///< validation accuracy of the final model
    double final_loss = 0.0;  ///< validation cross-entropy of the final model
    double encode_seconds_per_image = 0.0;
    double train_seconds = 0.0;
    double predict_seconds_per_image = 0.0;
    std::string error;  ///< non-empty when the method failed

    bool ok() const { return error.empty(); }
};

struct PipelineConfig {
    PipelineKind kind = PipelineKind::QCNN;
    TrainConfig train;
    EncodeOptions encode;
    SplitSpec split;
    CnnConfig cnn;
};

struct PipelineRun {
    BenchResult result;
    TrainReport report;
    AnyModel model;
    SplitIndices split;
    std::vector<int> val_predictions;
};

inline LabeledSet gather(const std::vector<std::vector<double>> &rows, const std::vector<int> &labels,
                         const std::vector<std::size_t> &idx) {
    LabeledSet set;
    for (auto i : idx) set.add(rows[i], labels[i]);
    return set;
}

/// Splits already-encoded rows, trains the classifier and evaluates it on the validation
/// part. For `PipelineKind::CNN` the rows must be side x side images scaled to [0, 1].
inline PipelineRun train_encoded(const std::vector<std::vector<double>> &rows, const std::vector<int> &labels,
                                 const std::vector<std::string> &class_names, const PipelineConfig &cfg) {
    cfg.train.validate();
    if (rows.empty()) throw DatasetError("dataset is empty");
    if (rows.size() != labels.size()) throw ValidationError("row and label counts differ");
    PipelineRun run{{}, {}, MlpModel{}, split_indices(labels, class_names, cfg.split), {}};
    BenchResult &r = run.result;
    r.method = std::string(to_string(cfg.kind));
    r.sample_count = rows.size();
    r.train_count = run.split.train.size();
    r.val_count = run.split.val.size();
    r.feature_size = rows.front().size();
    for (const auto &row : rows) {
        if (row.size() != r.feature_size) throw ValidationError("encoded rows differ in length");
    }
    const LabeledSet train_set = gather(rows, labels, run.split.train);
    const LabeledSet val_set = gather(rows, labels, run.split.val);
    const int n_classes = static_cast<int>(class_names.size());

    Rng init_rng = Rng::derive(cfg.train.seed, 0);
    auto finish = [&](const auto &model, const TrainReport &report) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto ev = evaluate(model, val_set);
        const double predict = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.predict_seconds_per_image = predict / static_cast<double>(val_set.size());
        r.accuracy = ev.accuracy;
        r.final_loss = ev.loss;
        r.train_seconds = report.runtime_seconds;
        r.parameter_count = model.parameter_count();
        run.val_predictions = ev.predictions;
        run.report = report;
        run.model = model;
    };
    if (cfg.kind == PipelineKind::CNN) {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(r.feature_size))));
        if (static_cast<std::size_t>(side) * side != r.feature_size) throw ValidationError("CNN input is not a square image");
        CnnConfig cnn = cfg.cnn;
        cnn.hidden = cfg.train.hidden;
        auto result = train(CnnBaseline::random(side, n_classes, cnn, init_rng), train_set, val_set, cfg.train);
        finish(result.model, result.report);
    } else {
        std::vector<int> sizes{static_cast<int>(r.feature_size)};
        sizes.insert(sizes.end(), cfg.train.hidden.begin(), cfg.train.hidden.end());
        sizes.push_back(n_classes);
        MlpModel model = MlpModel::glorot(sizes, init_rng);
        fit_standardization(model, train_set);
        auto result = train(std::move(model), train_set, val_set, cfg.train);
        finish(result.model, result.report);
    }
    return run;
}

/// Encodes the whole dataset, then trains and evaluates as `train_encoded`.
inline PipelineRun run_pipeline(const Dataset &ds, const PipelineConfig &cfg) {
    cfg.train.validate();
    if (ds.size() == 0) throw DatasetError("dataset is empty");
    const auto enc = encode_dataset(ds, cfg.kind, cfg.encode);
    std::vector<int> labels;
    labels.reserve(ds.size());
    for (const auto &s : ds.samples) labels.push_back(s.label);
    PipelineRun run = train_encoded(enc.rows, labels, ds.class_names, cfg);
    run.result.dataset_id = dataset_hash(ds);
    run.result.encode_seconds_per_image = is_quantum(cfg.kind) ? mean_of(enc.seconds) : 0.0;
    return run;
}

// ---------------------------------------------------------------------------
// Comparison table in three serializations

inline const char *kBenchCsvHeader =
    "method,dataset_id,images,train,val,features,parameters,accuracy,loss,encode_s_per_image,train_s,"
    "predict_s_per_image,train_plus_val_s,error\n";

inline std::string csv_quote(const std::string &text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string bench_to_csv(const std::vector<BenchResult> &rows) {
    std::string out = kBenchCsvHeader;
    for (const auto &r : rows) {
        out += r.method + ',' + r.dataset_id + ',' + std::to_string(r.sample_count) + ',' + std::to_string(r.train_count) +
               ',' + std::to_string(r.val_count) + ',' + std::to_string(r.feature_size) + ',' +
               std::to_string(r.parameter_count) + ',' + format_double(r.accuracy) + ',' + format_double(r.final_loss) +
               ',' + format_double(r.encode_seconds_per_image) + ',' + format_double(r.train_seconds) + ',' +
               format_double(r.predict_seconds_per_image) + ',' +
               format_double(r.train_seconds + r.predict_seconds_per_image * static_cast<double>(r.val_count)) + ',' +
               csv_quote(r.error) + '\n';
    }
    return out;
}

inline nlohmann::json bench_to_json(const std::vector<BenchResult> &rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &r : rows) {
        arr.push_back({{"method", r.method},
                       {"dataset_id", r.dataset_id},
                       {"images", r.sample_count},
                       {"train", r.train_count},
                       {"val", r.val_count},
                       {"features", r.feature_size},
                       {"parameters", r.parameter_count},
                       {"accuracy", r.accuracy},
                       {"loss", r.final_loss},
                       {"encode_s_per_image", r.encode_seconds_per_image},
                       {"train_s", r.train_seconds},
                       {"predict_s_per_image", r.predict_seconds_per_image},
                       {"error", r.error}});
    }
    return {{"format_version", 1}, {"rows", arr}};
}

inline std::string format_seconds(double s) {
    char buf[32];
    if (s < 1e-3) {
        std::snprintf(buf, sizeof(buf), "%.1f us", s * 1e6);
    } else if (s < 1.0) {
        std::snprintf(buf, sizeof(buf), "%.1f ms", s * 1e3);
    } else if (s < 60.0) {
        std::snprintf(buf, sizeof(buf), "%.2f s", s);
    } else {
        std::snprintf(buf, sizeof(buf), "%d:%02d min", static_cast<int>(s) / 60, static_cast<int>(s) % 60);
    }
    return buf;
}

/// Human-readable table, one row per method.
inline std::string bench_to_text(const std::vector<BenchResult> &rows) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-6s %7s %9s %7s %8s %11s %11s %11s %s\n", "Model", "Images", "Features", "Acc.",
                  "Loss", "Encode/img", "Train", "Predict/img", "Params");
    out += line;
    for (const auto &r : rows) {
        if (!r.ok()) {
            std::snprintf(line, sizeof(line), "%-6s %7zu  FAILED: %s\n", r.method.c_str(), r.sample_count, r.error.c_str());
            out += line;
            continue;
        }
        std::snprintf(line, sizeof(line), "%-6s %7zu %9zu %6.1f%% %8.4f %11s %11s %11s %zu\n", r.method.c_str(),
                      r.sample_count, r.feature_size, 100.0 * r.accuracy, r.final_loss,
                      r.encode_seconds_per_image > 0.0 ? format_seconds(r.encode_seconds_per_image).c_str() : "---",
                      format_seconds(r.train_seconds).c_str(), format_seconds(r.predict_seconds_per_image).c_str(),
                      r.parameter_count);
        out += line;
    }
    return out;
}

}  // namespace qimg
