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

// qimg: generate or load image datasets, encode them with quantum image
// representations, train the dense head or the CNN baseline, predict, benchmark.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qimg/qimg.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qimg;

constexpr const char *kOutEnv = "QIMG_OUT_DIR";
constexpr const char *kDefaultOut = "qimg_out";

struct RunConfig {
    std::vector<std::string> methods;
    std::string dataset;
    std::string features;
    std::string model;
    std::string image;
    std::string out;
    int side = 16;
    bool side_set = false;
    std::optional<double> gamma;
    bool gamma_first = false;
    double split = 0.7;
    int epochs = 10;
    int batch = 8;
    double lr = 0.05;
    double dropout = 0.2;
    std::vector<int> hidden{64};
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    double noise_p = 0.0;
    double readout_p = 0.0;
    std::optional<std::uint64_t> noise_seed;
    int classes = 4;
    int per_class = 200;
    double blur = 0.0;
    double pixel_noise = 0.0;

    std::uint64_t encode_seed() const { return noise_seed.value_or(seed); }
};

json to_json(const RunConfig &c) {
    return {{"method", c.methods},
            {"dataset", c.dataset},
            {"features", c.features},
            {"model", c.model},
            {"image", c.image},
            {"out", c.out},
            {"side", c.side},
            {"gamma", c.gamma ? json(*c.gamma) : json(nullptr)},
            {"gamma_first", c.gamma_first},
            {"split", c.split},
            {"epochs", c.epochs},
            {"batch", c.batch},
            {"lr", c.lr},
            {"dropout", c.dropout},
            {"hidden", c.hidden},
            {"seed", c.seed},
            {"shots", c.shots},
            {"noise_spec", {{"depolarizing_prob", c.noise_p}, {"readout_flip_prob", c.readout_p}, {"seed", c.encode_seed()}}},
            {"classes", c.classes},
            {"per_class", c.per_class},
            {"blur", c.blur},
            {"pixel_noise", c.pixel_noise}};
}

// ---------------------------------------------------------------------------
// Config documents

class ConfigReader {
   public:
    ConfigReader(std::string what) : what_(std::move(what)) {}

    int as_int(const std::string &key, const json &v) const {
        if (!v.is_number_integer()) wrong(key, "an integer");
        return v.get<int>();
    }
    std::uint64_t as_uint(const std::string &key, const json &v) const {
        if (!v.is_number_unsigned()) wrong(key, "a non-negative integer");
        return v.get<std::uint64_t>();
    }
    double as_double(const std::string &key, const json &v) const {
        if (!v.is_number()) wrong(key, "a number");
        return v.get<double>();
    }
    bool as_bool(const std::string &key, const json &v) const {
        if (!v.is_boolean()) wrong(key, "a boolean");
        return v.get<bool>();
    }
    std::string as_string(const std::string &key, const json &v) const {
        if (!v.is_string()) wrong(key, "a string");
        return v.get<std::string>();
    }

    [[noreturn]] void wrong(const std::string &key, const char *want) const {
        throw ValidationError(what_ + ": '" + key + "' must be " + want);
    }
    [[noreturn]] void unknown(const std::string &key) const { throw ValidationError(what_ + ": unknown key '" + key + "'"); }

   private:
    std::string what_;
};

void apply_config(RunConfig &c, const json &doc, const std::string &what) {
    if (!doc.is_object()) throw ValidationError(what + ": a config file holds one JSON object");
    const ConfigReader r(what);
    for (const auto &[key, v] : doc.items()) {
        if (key == "method") {
            c.methods.clear();
            if (v.is_string()) {
                c.methods.push_back(v.get<std::string>());
            } else if (v.is_array()) {
                for (const auto &m : v) c.methods.push_back(r.as_string(key, m));
            } else {
                r.wrong(key, "a string or an array of strings");
            }
        } else if (key == "dataset") {
            c.dataset = r.as_string(key, v);
        } else if (key == "features") {
            c.features = r.as_string(key, v);
        } else if (key == "model") {
            c.model = r.as_string(key, v);
        } else if (key == "image") {
            c.image = r.as_string(key, v);
        } else if (key == "out") {
            c.out = r.as_string(key, v);
        } else if (key == "side") {
            c.side = r.as_int(key, v);
            c.side_set = true;
        } else if (key == "gamma") {
            if (v.is_null()) {
                c.gamma.reset();
            } else {
                c.gamma = r.as_double(key, v);
            }
        } else if (key == "gamma_first") {
            c.gamma_first = r.as_bool(key, v);
        } else if (key == "split") {
            c.split = r.as_double(key, v);
        } else if (key == "epochs") {
            c.epochs = r.as_int(key, v);
        } else if (key == "batch") {
            c.batch = r.as_int(key, v);
        } else if (key == "lr") {
            c.lr = r.as_double(key, v);
        } else if (key == "dropout") {
            c.dropout = r.as_double(key, v);
        } else if (key == "hidden") {
            if (!v.is_array()) r.wrong(key, "an array of integers");
            c.hidden.clear();
            for (const auto &h : v) c.hidden.push_back(r.as_int(key, h));
        } else if (key == "seed") {
            c.seed = r.as_uint(key, v);
        } else if (key == "shots") {
            c.shots = r.as_uint(key, v);
        } else if (key == "noise_p") {
            c.noise_p = r.as_double(key, v);
        } else if (key == "readout_p") {
            c.readout_p = r.as_double(key, v);
        } else if (key == "noise_spec") {
            if (!v.is_object()) r.wrong(key, "an object");
            for (const auto &[sub, sv] : v.items()) {
                const std::string name = "noise_spec." + sub;
                if (sub == "depolarizing_prob") {
                    c.noise_p = r.as_double(name, sv);
                } else if (sub == "readout_flip_prob") {
                    c.readout_p = r.as_double(name, sv);
                } else if (sub == "seed") {
                    c.noise_seed = r.as_uint(name, sv);
                } else {
                    r.unknown(name);
                }
            }
        } else if (key == "classes") {
            c.classes = r.as_int(key, v);
        } else if (key == "per_class") {
            c.per_class = r.as_int(key, v);
        } else if (key == "blur") {
            c.blur = r.as_double(key, v);
        } else if (key == "pixel_noise") {
            c.pixel_noise = r.as_double(key, v);
        } else {
            r.unknown(key);
        }
    }
}

// ---------------------------------------------------------------------------
// Flags. Each flag is bound to a scratch RunConfig and copied over the config
// file values only when given on the command line.

class FlagSet {
   public:
    FlagSet(CLI::App *app, RunConfig &scratch) : app_(app), scratch_(scratch) {}

    template <typename T>
    FlagSet &add(const std::string &name, T RunConfig::*member, const std::string &help) {
        auto *opt = app_->add_option(name, scratch_.*member, help);
        if constexpr (!std::is_same_v<T, std::vector<std::string>> && !std::is_same_v<T, std::vector<int>>) {
            opt->default_val(scratch_.*member);
        } else {
            opt->delimiter(',');
        }
        overrides_.push_back({opt, [this, member](RunConfig &c) { c.*member = scratch_.*member; }});
        return *this;
    }

    FlagSet &side() {
        add("--side", &RunConfig::side, "Square image side in pixels");
        overrides_.back().second = [this](RunConfig &c) {
            c.side = scratch_.side;
            c.side_set = true;
        };
        return *this;
    }

    FlagSet &gamma() {
        auto *opt = app_->add_option("--gamma", gamma_, "Gamma correction exponent (0.5 brightens)");
        overrides_.push_back({opt, [this](RunConfig &c) { c.gamma = gamma_; }});
        auto *first = app_->add_flag("--gamma-first", "Apply gamma before resizing instead of after");
        overrides_.push_back({first, [](RunConfig &c) { c.gamma_first = true; }});
        return *this;
    }

    FlagSet &noise() {
        add("--shots", &RunConfig::shots, "Measurement shots per circuit (0 = exact expectation values)");
        add("--noise-p", &RunConfig::noise_p, "Depolarizing probability per gate");
        add("--readout-p", &RunConfig::readout_p, "Readout bit-flip probability");
        return *this;
    }

    FlagSet &training() {
        add("--split", &RunConfig::split, "Training fraction of each class");
        add("--epochs", &RunConfig::epochs, "Training epochs");
        add("--batch", &RunConfig::batch, "Minibatch size");
        add("--lr", &RunConfig::lr, "SGD learning rate");
        add("--dropout", &RunConfig::dropout, "Dropout rate on hidden activations");
        add("--hidden", &RunConfig::hidden, "Hidden layer widths, comma separated");
        return *this;
    }

    FlagSet &common() {
        app_->add_option("--config", config_path_, "JSON run configuration; flags override its fields");
        add("--seed", &RunConfig::seed, "Seed for every random choice");
        add("--out", &RunConfig::out, std::string("Output directory (default: $") + kOutEnv + " or " + kDefaultOut + ")");
        return *this;
    }

    /// Defaults, then the config file, then explicit flags.
    RunConfig resolve() const {
        RunConfig c;
        if (!config_path_.empty()) apply_config(c, read_json_file(config_path_), config_path_);
        for (const auto &[opt, copy] : overrides_) {
            if (opt->count() > 0) copy(c);
        }
        if (c.out.empty()) {
            const char *env = std::getenv(kOutEnv);
            c.out = env != nullptr && *env != '\0' ? env : kDefaultOut;
        }
        return c;
    }

   private:
    CLI::App *app_;
    RunConfig &scratch_;
    double gamma_ = 1.0;
    std::string config_path_;
    std::vector<std::pair<CLI::Option *, std::function<void(RunConfig &)>>> overrides_;
};

// ---------------------------------------------------------------------------
// Shared steps

PipelineKind single_method(const RunConfig &c, const char *fallback) {
    if (c.methods.size() > 1) throw ValidationError("this command takes exactly one --method");
    return parse_pipeline(c.methods.empty() ? fallback : c.methods.front());
}

Dataset load(const RunConfig &c) {
    if (c.dataset.empty()) throw ValidationError("--dataset is required");
    LoadOptions opt;
    opt.side = c.side;
    opt.gamma = c.gamma;
    opt.gamma_before_resize = c.gamma_first;
    return load_dataset(c.dataset, opt);
}

SyntheticSpec synthetic_spec(const RunConfig &c) {
    SyntheticSpec s;
    s.n_classes = c.classes;
    s.per_class = c.per_class;
    s.side = c.side;
    s.blur = c.blur;
    s.noise = c.pixel_noise;
    s.seed = c.seed;
    return s;
}

json synthetic_parameters(const SyntheticSpec &s) {
    return {{"generator", "synthetic-shapes"}, {"classes", s.n_classes}, {"per_class", s.per_class}, {"side", s.side},
            {"blur", s.blur},                  {"noise", s.noise},       {"seed", s.seed}};
}

EncodeOptions encode_options(const RunConfig &c) {
    NoiseSpec{c.noise_p, c.readout_p, c.encode_seed()}.validate();
    return {c.shots, c.noise_p, c.readout_p, c.encode_seed()};
}

PipelineConfig pipeline_config(const RunConfig &c, PipelineKind kind) {
    PipelineConfig p;
    p.kind = kind;
    p.train.epochs = c.epochs;
    p.train.batch_size = c.batch;
    p.train.learning_rate = c.lr;
    p.train.seed = c.seed;
    p.train.dropout_rate = c.dropout;
    p.train.hidden = c.hidden;
    p.encode = encode_options(c);
    p.split = {c.split, c.seed};
    return p;
}

void write_config(const RunConfig &c) { write_json_file(fs::path(c.out) / "config.json", to_json(c)); }

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * v);
    return buf;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_gen_data(const RunConfig &c) {
    const SyntheticSpec spec = synthetic_spec(c);
    const Dataset ds = generate_synthetic(spec);
    const fs::path out(c.out);
    write_dataset(out, ds);
    write_json_file(out / "manifest.json", dataset_manifest(ds, synthetic_parameters(spec)));
    std::cout << "wrote " << ds.size() << " images in " << ds.n_classes() << " classes to " << out.string()
              << " (dataset " << dataset_hash(ds) << ")\n";
    return 0;
}

int cmd_encode(const RunConfig &c) {
    const PipelineKind kind = single_method(c, "qcnn");
    if (!is_quantum(kind)) throw ValidationError("encode supports qcnn|frqi|neqr, not " + std::string(to_string(kind)));
    const Dataset ds = load(c);
    const EncodeOptions opt = encode_options(c);
    const auto enc = encode_dataset(ds, kind, opt);

    FeatureSet fs;
    fs.method = std::string(to_string(kind));
    fs.side = c.side;
    fs.feature_length = enc.rows.front().size();
    fs.shots = opt.shots;
    fs.noise_p = opt.noise_p;
    fs.readout_p = opt.readout_p;
    fs.seed = opt.seed;
    fs.gamma = c.gamma;
    fs.dataset_hash = dataset_hash(ds);
    fs.class_names = ds.class_names;
    for (const auto &s : ds.samples) fs.labels.push_back(s.label);
    fs.rows = enc.rows;
    const fs::path path = fs::path(c.out) / "features.json";
    save_features(path, fs);
    write_config(c);

    double total = 0.0;
    for (double s : enc.seconds) total += s;
    std::cout << "encoded " << ds.size() << " images with " << fs.method << ": " << fs.feature_length
              << " features each -> " << path.string() << "\n"
              << "encode time per image: mean " << format_seconds(mean_of(enc.seconds)) << ", median "
              << format_seconds(median_of(enc.seconds)) << ", total " << format_seconds(total) << "\n";
    return 0;
}

void print_summary(const BenchResult &r, const TrainReport &report) {
    std::printf("%-6s %7s %6s %5s %9s %9s %s\n", "Model", "Images", "Train", "Val", "Accuracy", "Loss", "Runtime");
    std::string runtime = format_seconds(report.runtime_seconds) + " (train+val";
    if (r.encode_seconds_per_image > 0.0) runtime += "; encode " + format_seconds(r.encode_seconds_per_image) + "/image";
    std::printf("%-6s %7zu %6zu %5zu %9s %9.4f %s)\n", r.method.c_str(), r.sample_count, r.train_count, r.val_count,
                percent(r.accuracy).c_str(), r.final_loss, runtime.c_str());
}

int cmd_train(const RunConfig &c) {
    PipelineRun run;
    ModelMetadata md;
    md.seed = c.seed;
    if (!c.features.empty()) {
        if (!c.dataset.empty()) throw ValidationError("give either --features or --dataset, not both");
        const FeatureSet fs = load_features(c.features);
        const PipelineKind kind = parse_pipeline(fs.method);
        if (!c.methods.empty() && single_method(c, "qcnn") != kind) {
            throw ValidationError("feature file holds " + fs.method + " features, not " + c.methods.front());
        }
        run = train_encoded(fs.rows, fs.labels, fs.class_names, pipeline_config(c, kind));
        run.result.dataset_id = fs.dataset_hash;
        md.method = fs.method;
        md.dataset_hash = fs.dataset_hash;
        md.side = fs.side;
        md.class_names = fs.class_names;
        md.shots = fs.shots;
        md.gamma = fs.gamma;
        md.noise_p = fs.noise_p;
        md.readout_p = fs.readout_p;
        md.seed = fs.seed;
    } else {
        const PipelineKind kind = single_method(c, "qcnn");
        const Dataset ds = load(c);
        const PipelineConfig cfg = pipeline_config(c, kind);
        run = run_pipeline(ds, cfg);
        md.method = std::string(to_string(kind));
        md.dataset_hash = run.result.dataset_id;
        md.side = c.side;
        md.class_names = ds.class_names;
        md.shots = cfg.encode.shots;
        md.gamma = c.gamma;
        md.noise_p = cfg.encode.noise_p;
        md.readout_p = cfg.encode.readout_p;
        md.seed = cfg.encode.seed;
    }
    const fs::path out(c.out);
    save_model(out / "model.json", ModelFile{run.model, md});
    write_text_file(out / "report.csv", report_to_csv(run.report));
    write_text_file(out / "confusion.csv", confusion_to_csv(run.report.confusion, md.class_names));
    write_config(c);
    print_summary(run.result, run.report);
    return 0;
}

int cmd_predict(const RunConfig &c) {
    if (c.model.empty()) throw ValidationError("--model is required");
    if (c.image.empty()) throw ValidationError("--image is required");
    const ModelFile file = load_model(c.model);
    const ModelMetadata &md = file.metadata;
    if (!c.methods.empty() && std::string(to_string(single_method(c, "qcnn"))) != md.method) {
        throw ValidationError("model was trained on " + md.method + " features, not " + c.methods.front());
    }
    if (c.side_set && c.side != md.side) {
        throw ValidationError("--side " + std::to_string(c.side) + " does not match the model's side " + std::to_string(md.side));
    }
    GrayImage img = read_netpbm(c.image);
    if (img.width != md.side || img.height != md.side) {
        throw ValidationError(c.image + " is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                              " but the model expects " + std::to_string(md.side) + "x" + std::to_string(md.side));
    }
    if (md.gamma) img = gamma_correct(img, *md.gamma);

    const PipelineKind kind = parse_pipeline(md.method);
    const auto t0 = std::chrono::steady_clock::now();
    const auto x = encode_image(img, kind, {md.shots, md.noise_p, md.readout_p, md.seed}, 0);
    const auto t1 = std::chrono::steady_clock::now();
    const auto probs = std::visit([&](const auto &m) { return predict_proba(m, x); }, file.model);
    const auto t2 = std::chrono::steady_clock::now();
    if (probs.size() != md.class_names.size()) throw ValidationError("model output does not match its class list");

    const int best = argmax(probs);
    std::cout << "class: " << md.class_names[static_cast<std::size_t>(best)] << "\nprobabilities:";
    for (std::size_t k = 0; k < probs.size(); ++k) std::cout << ' ' << md.class_names[k] << '=' << format_double(probs[k]);
    std::cout << "\nencode time: " << format_seconds(std::chrono::duration<double>(t1 - t0).count())
              << "\ninference time: " << format_seconds(std::chrono::duration<double>(t2 - t1).count()) << "\n";
    return 0;
}

int cmd_bench(const RunConfig &c) {
    std::vector<std::string> methods = c.methods;
    if (methods.empty()) methods = {"qcnn", "frqi", "neqr", "cnn", "mlp"};
    std::vector<PipelineKind> kinds;
    for (const auto &m : methods) kinds.push_back(parse_pipeline(m));

    Dataset ds;
    if (c.dataset.empty()) {
        ds = generate_synthetic(synthetic_spec(c));
        if (c.gamma) {
            for (auto &s : ds.samples) s.image = gamma_correct(s.image, *c.gamma);
        }
    } else {
        ds = load(c);
    }
    const fs::path out(c.out);
    std::vector<BenchResult> rows;
    int failures = 0;
    for (auto kind : kinds) {
        const std::string name(to_string(kind));
        try {
            const PipelineRun run = run_pipeline(ds, pipeline_config(c, kind));
            write_text_file(out / ("confusion_" + name + ".csv"), confusion_to_csv(run.report.confusion, ds.class_names));
            write_text_file(out / ("report_" + name + ".csv"), report_to_csv(run.report));
            rows.push_back(run.result);
        } catch (const Error &e) {
            BenchResult failed;
            failed.method = name;
            failed.dataset_id = dataset_hash(ds);
            failed.sample_count = ds.size();
            failed.error = e.what();
            rows.push_back(failed);
            ++failures;
        }
    }
    const std::string text = bench_to_text(rows);
    write_text_file(out / "bench.txt", text);
    write_text_file(out / "bench.csv", bench_to_csv(rows));
    write_json_file(out / "bench.json", bench_to_json(rows));
    write_config(c);
    std::cout << "dataset " << dataset_hash(ds) << " (" << ds.size() << " images, " << ds.n_classes() << " classes)\n"
              << text;
    if (failures > 0) {
        std::cerr << "error: " << failures << " of " << rows.size() << " methods failed (see bench.txt)\n";
        return 1;
    }
    return 0;
}

double psnr(const GrayImage &a, const GrayImage &b) {
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    return mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(255.0 * 255.0 / mse);
}

int cmd_reconstruct(const RunConfig &c) {
    const PipelineKind kind = single_method(c, "frqi");
    if (!is_quantum(kind)) throw ValidationError("reconstruct supports qcnn|frqi|neqr, not " + std::string(to_string(kind)));
    if (c.image.empty()) throw ValidationError("--image is required");
    GrayImage img = read_netpbm(c.image);
    if (c.gamma && c.gamma_first) img = gamma_correct(img, *c.gamma);
    if (c.side_set) img = resize_area(img, c.side, c.side);
    if (c.gamma && !c.gamma_first) img = gamma_correct(img, *c.gamma);

    const EncodeOptions opt = encode_options(c);
    GrayImage decoded;
    if (opt.shots == 0 && !opt.noisy() && kind != PipelineKind::QCNN) {
        decoded = kind == PipelineKind::FRQI ? frqi_decode(frqi_encode(img, EncodeMode::GateLevel), img.width)
                                             : neqr_decode(neqr_encode(img, EncodeMode::GateLevel), img.width);
    } else {
        const FeatureVector f{encode_image(img, kind, opt, 0), quantum_method(kind)};
        decoded = render_features(f, img.width, img.height);
    }
    const fs::path out(c.out);
    const std::string name(to_string(kind));
    write_pgm(out / "original.pgm", img);
    write_pgm(out / ("reconstructed_" + name + ".pgm"), decoded);
    write_config(c);
    std::cout << name << ": " << img.width << "x" << img.height << " -> " << decoded.width << "x" << decoded.height;
    if (decoded.width == img.width) {
        int worst = 0;
        for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(img.pixels[i] - decoded.pixels[i]));
        std::cout << ", max abs error " << worst << ", PSNR " << psnr(img, decoded) << " dB";
    }
    std::cout << "\nwrote " << (out / ("reconstructed_" + name + ".pgm")).string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hybrid quantum-classical image classification toolkit"};
    app.require_subcommand(1);
    RunConfig scratch;

    auto *gen = app.add_subcommand("gen-data", "Write a seeded synthetic shapes dataset");
    FlagSet gen_flags(gen, scratch);
    gen_flags.common().side();
    gen_flags.add("--classes", &RunConfig::classes, "Number of shape classes (2-10)")
        .add("--per-class", &RunConfig::per_class, "Images per class")
        .add("--blur", &RunConfig::blur, "Horizontal motion-blur width in pixels")
        .add("--noise", &RunConfig::pixel_noise, "Uniform pixel noise amplitude as a fraction of 255");

    auto *encode = app.add_subcommand("encode", "Encode a dataset into a feature file");
    FlagSet encode_flags(encode, scratch);
    encode_flags.common().side().gamma().noise();
    encode_flags.add("--method", &RunConfig::methods, "qcnn|frqi|neqr").add("--dataset", &RunConfig::dataset, "Dataset root");

    auto *train_cmd = app.add_subcommand("train", "Train a classifier and write model, loss curves and confusion matrix");
    FlagSet train_flags(train_cmd, scratch);
    train_flags.common().side().gamma().noise().training();
    train_flags.add("--method", &RunConfig::methods, "qcnn|frqi|neqr|cnn|mlp")
        .add("--dataset", &RunConfig::dataset, "Dataset root")
        .add("--features", &RunConfig::features, "Feature file written by 'encode'");

    auto *predict = app.add_subcommand("predict", "Classify one image with a trained model");
    FlagSet predict_flags(predict, scratch);
    predict_flags.common().side();
    predict_flags.add("--model", &RunConfig::model, "Model file written by 'train'")
        .add("--image", &RunConfig::image, "Netpbm image")
        .add("--method", &RunConfig::methods, "Expected method of the model");

    auto *bench = app.add_subcommand("bench", "Compare methods on one dataset and split");
    FlagSet bench_flags(bench, scratch);
    bench_flags.common().side().gamma().noise().training();
    bench_flags.add("--method", &RunConfig::methods, "Methods to compare (default: all)")
        .add("--dataset", &RunConfig::dataset, "Dataset root (default: synthetic shapes)")
        .add("--classes", &RunConfig::classes, "Synthetic classes when no --dataset is given")
        .add("--per-class", &RunConfig::per_class, "Synthetic images per class")
        .add("--blur", &RunConfig::blur, "Synthetic motion-blur width")
        .add("--noise", &RunConfig::pixel_noise, "Synthetic pixel noise amplitude");

    auto *recon = app.add_subcommand("reconstruct", "Encode one image and write the decoded image");
    FlagSet recon_flags(recon, scratch);
    recon_flags.common().side().gamma().noise();
    recon_flags.add("--method", &RunConfig::methods, "qcnn|frqi|neqr").add("--image", &RunConfig::image, "Netpbm image");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    const std::vector<std::pair<CLI::App *, std::pair<const FlagSet *, int (*)(const RunConfig &)>>> commands{
        {gen, {&gen_flags, cmd_gen_data}},       {encode, {&encode_flags, cmd_encode}},
        {train_cmd, {&train_flags, cmd_train}},  {predict, {&predict_flags, cmd_predict}},
        {bench, {&bench_flags, cmd_bench}},      {recon, {&recon_flags, cmd_reconstruct}}};
    try {
        for (const auto &[sub, entry] : commands) {
            if (sub->parsed()) return entry.second(entry.first->resolve());
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
