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

// Datasets: folder loading, resizing, gamma correction, stratified splits and a
// seeded synthetic shape generator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qimg/error.hpp"
#include "qimg/image.hpp"
#include "qimg/netpbm.hpp"
#include "qimg/rng.hpp"

namespace qimg {

struct Sample {
    GrayImage image;
    int label = 0;

    friend bool operator==(const Sample &, const Sample &) = default;
};

struct Dataset {
    std::vector<std::string> class_names;
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    int n_classes() const { return static_cast<int>(class_names.size()); }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(class_names.size(), 0);
        for (const auto &s : samples) ++counts.at(static_cast<std::size_t>(s.label));
        return counts;
    }

    friend bool operator==(const Dataset &, const Dataset &) = default;
};

inline std::uint8_t round_to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// ---------------------------------------------------------------------------
// Intensity transforms

/// out = round(255 * (in / 255)^gamma), clamped.
inline GrayImage gamma_correct(const GrayImage &img, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be > 0");
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v) lut[static_cast<std::size_t>(v)] = round_to_byte(255.0 * std::pow(v / 255.0, gamma));
    GrayImage out = img;
    for (auto &p : out.pixels) p = lut[p];
    return out;
}

/// Area-averaging (box) resampling; each output pixel is the overlap-weighted mean
/// of the source pixels it covers, rounded half up.
inline GrayImage resize_area(const GrayImage &img, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0) throw ValidationError("target size must be positive");
    if (img.width == out_w && img.height == out_h) return img;
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    GrayImage out(out_w, out_h);
    for (int oy = 0; oy < out_h; ++oy) {
        const double y0 = oy * sy;
        const double y1 = y0 + sy;
        for (int ox = 0; ox < out_w; ++ox) {
            const double x0 = ox * sx;
            const double x1 = x0 + sx;
            double acc = 0.0;
            for (int y = static_cast<int>(std::floor(y0)); y < std::min(img.height, static_cast<int>(std::ceil(y1))); ++y) {
                const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                if (wy <= 0.0) continue;
                for (int x = static_cast<int>(std::floor(x0)); x < std::min(img.width, static_cast<int>(std::ceil(x1))); ++x) {
                    const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                    if (wx > 0.0) acc += wx * wy * img.at(x, y);
                }
            }
            out.at(ox, oy) = round_to_byte(acc / (sx * sy));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Folder loading

struct LoadOptions {
    int side = 16;
    std::optional<double> gamma;       ///< applied when set
    bool gamma_before_resize = false;  ///< default: resize first, then gamma
};

inline GrayImage preprocess(GrayImage img, const LoadOptions &opt) {
    if (opt.gamma && opt.gamma_before_resize) img = gamma_correct(img, *opt.gamma);
    img = resize_area(img, opt.side, opt.side);
    if (opt.gamma && !opt.gamma_before_resize) img = gamma_correct(img, *opt.gamma);
    return img;
}

/// Loads `root/<class>/<image>`; classes in lexicographic order, files sorted by path.
/// Hidden files and files directly under root are ignored.
inline Dataset load_dataset(const std::filesystem::path &root, const LoadOptions &opt) {
    namespace fs = std::filesystem;
    if (opt.side < 1) throw ValidationError("target side must be positive");
    if (!fs::is_directory(root)) throw DatasetError(root.string() + ": not a directory");
    std::vector<fs::path> class_dirs;
    for (const auto &entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && entry.path().filename().string().front() != '.') class_dirs.push_back(entry.path());
    }
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.empty()) throw DatasetError(root.string() + ": no class subdirectories");

    Dataset ds;
    for (const auto &dir : class_dirs) {
        std::vector<fs::path> files;
        for (const auto &entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().filename().string().front() != '.') files.push_back(entry.path());
        }
        if (files.empty()) throw DatasetError(dir.string() + ": class directory contains no images");
        std::sort(files.begin(), files.end());
        const int label = static_cast<int>(ds.class_names.size());
        ds.class_names.push_back(dir.filename().string());
        for (const auto &f : files) ds.samples.push_back({preprocess(read_netpbm(f), opt), label});
    }
    return ds;
}

inline Dataset load_dataset(const std::filesystem::path &root, int side) {
    LoadOptions opt;
    opt.side = side;
    return load_dataset(root, opt);
}

/// Writes `root/<class>/<index>.pgm` for every sample.
inline void write_dataset(const std::filesystem::path &root, const Dataset &ds) {
    namespace fs = std::filesystem;
    std::vector<std::size_t> next(ds.class_names.size(), 0);
    for (const auto &name : ds.class_names) fs::create_directories(root / name);
    for (const auto &s : ds.samples) {
        char file[32];
        std::snprintf(file, sizeof(file), "%05zu.pgm", next[static_cast<std::size_t>(s.label)]++);
        write_pgm(root / ds.class_names[static_cast<std::size_t>(s.label)] / file, s.image);
    }
}

/// FNV-1a over class names, labels and pixels, as 16 hex digits.
inline std::string dataset_hash(const Dataset &ds) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint8_t b) {
        h ^= b;
        h *= 0x100000001b3ULL;
    };
    auto feed_u32 = [&feed](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) feed(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    for (const auto &name : ds.class_names) {
        for (char c : name) feed(static_cast<std::uint8_t>(c));
        feed(0);
    }
    for (const auto &s : ds.samples) {
        feed_u32(static_cast<std::uint32_t>(s.label));
        feed_u32(static_cast<std::uint32_t>(s.image.width));
        feed_u32(static_cast<std::uint32_t>(s.image.height));
        for (auto p : s.image.pixels) feed(p);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
};

/// Stratified split: each class contributes round(fraction * n) samples to train
/// (at least 1, at most n - 1) after a seeded per-class shuffle.
inline SplitIndices split_indices(const std::vector<int> &labels, const std::vector<std::string> &class_names,
                                  const SplitSpec &spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) throw ValidationError("train fraction must lie in (0, 1)");
    std::vector<std::vector<std::size_t>> per_class(class_names.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= per_class.size()) throw DatasetError("sample label out of range");
        per_class[static_cast<std::size_t>(label)].push_back(i);
    }
    SplitIndices out;
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        auto &idx = per_class[c];
        if (idx.size() < 2) {
            throw DatasetError("class '" + class_names[c] + "' has " + std::to_string(idx.size()) +
                               " sample(s); splitting needs at least 2");
        }
        Rng rng = Rng::derive(spec.seed, c);
        shuffle(idx.begin(), idx.end(), rng);
        const auto n = idx.size();
        auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n) + 0.5));
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.val.insert(out.val.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    return out;
}

inline SplitIndices split_indices(const Dataset &ds, const SplitSpec &spec) {
    std::vector<int> labels;
    labels.reserve(ds.size());
    for (const auto &s : ds.samples) labels.push_back(s.label);
    return split_indices(labels, ds.class_names, spec);
}

inline Dataset subset(const Dataset &ds, const std::vector<std::size_t> &indices) {
    Dataset out;
    out.class_names = ds.class_names;
    out.samples.reserve(indices.size());
    for (auto i : indices) out.samples.push_back(ds.samples.at(i));
    return out;
}

inline std::pair<Dataset, Dataset> split(const Dataset &ds, const SplitSpec &spec) {
    const auto idx = split_indices(ds, spec);
    return {subset(ds, idx.train), subset(ds, idx.val)};
}

// ---------------------------------------------------------------------------
// Synthetic shapes

enum class Shape { VBar, Cross, Disk, Ring, Wedge, HBar, Square, Diagonal, XCross, Block };

inline constexpr int kShapeCount = 10;

inline const char *shape_name(Shape s) {
    static constexpr const char *names[kShapeCount] = {"vbar",   "cross",   "disk",     "ring",   "wedge",
                                                       "hbar",   "square",  "diagonal", "xcross", "block"};
    return names[static_cast<int>(s)];
}

/// Placement of a shape: center (cx, cy), half extent `radius`, stroke half-width `thickness`.
struct ShapeParams {
    int cx = 0;
    int cy = 0;
    int radius = 1;
    int thickness = 1;
};

/// Centered placement with radius side/4 and thickness max(1, side/16).
inline ShapeParams canonical_params(int side) { return {side / 2, side / 2, side / 4, std::max(1, side / 16)}; }

/// Whether pixel (x, y) belongs to the shape. Wedge is the right triangle anchored at
/// the top-left corner of the shape's bounding box.
inline bool shape_contains(Shape shape, const ShapeParams &p, int x, int y) {
    const int dx = x - p.cx;
    const int dy = y - p.cy;
    const int r = p.radius;
    const int t = p.thickness;
    const int adx = std::abs(dx);
    const int ady = std::abs(dy);
    const bool in_box = adx <= r && ady <= r;
    const int d2 = dx * dx + dy * dy;
    switch (shape) {
        case Shape::VBar: return adx <= t && ady <= r;
        case Shape::HBar: return ady <= t && adx <= r;
        case Shape::Cross: return (adx <= t && ady <= r) || (ady <= t && adx <= r);
        case Shape::Disk: return d2 <= r * r;
        case Shape::Ring: {
            const int inner = std::max(0, r - 2 * t);
            return d2 <= r * r && d2 > inner * inner;
        }
        case Shape::Wedge: return dx + r >= 0 && dy + r >= 0 && (dx + r) + (dy + r) <= 2 * r;
        case Shape::Square: return in_box && std::max(adx, ady) > r - t;
        case Shape::Diagonal: return in_box && std::abs(dx - dy) <= t;
        case Shape::XCross: return in_box && (std::abs(dx - dy) <= t || std::abs(dx + dy) <= t);
        case Shape::Block: return std::max(adx, ady) <= r / 2;
    }
    return false;
}

/// Foreground 255 on background 0.
inline GrayImage render_shape(Shape shape, const ShapeParams &p, int side) {
    GrayImage img(side, side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            if (shape_contains(shape, p, x, y)) img.at(x, y) = 255;
        }
    }
    return img;
}

/// Horizontal centered box filter of `width` pixels with edge clamping (motion-blur proxy).
/// Widths <= 1 leave the image unchanged.
inline GrayImage horizontal_box_blur(const GrayImage &img, int width) {
    if (width <= 1) return img;
    const int left = (width - 1) / 2;
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            int sum = 0;
            for (int k = -left; k < width - left; ++k) sum += img.at(std::clamp(x + k, 0, img.width - 1), y);
            out.at(x, y) = round_to_byte(static_cast<double>(sum) / width);
        }
    }
    return out;
}

struct SyntheticSpec {
    int n_classes = 4;
    int per_class = 200;
    int side = 16;
    double blur = 0.0;   ///< motion-blur width in pixels (rounded)
    double noise = 0.0;  ///< uniform noise amplitude as a fraction of 255
    std::uint64_t seed = 0;
};

/// Renders `per_class` images of each of the first `n_classes` shapes. Sample 0 of every
/// class is the canonical placement; the rest use a seeded random radius and a center
/// within side/8 pixels of the middle.
/// Class names carry a two-digit prefix so lexicographic order equals label order.
inline Dataset generate_synthetic(const SyntheticSpec &spec) {
    if (spec.n_classes < 2 || spec.n_classes > kShapeCount) {
        throw ValidationError("synthetic datasets support 2.." + std::to_string(kShapeCount) + " classes");
    }
    if (spec.per_class < 1) throw ValidationError("per-class count must be >= 1");
    if (spec.side < 8 || !is_power_of_two(spec.side)) throw ValidationError("synthetic side must be a power of two >= 8");
    if (!(spec.blur >= 0.0) || !(spec.noise >= 0.0)) throw ValidationError("blur and noise must be >= 0");

    Dataset ds;
    const int side = spec.side;
    const int thickness = std::max(1, side / 16);
    const int r_min = std::max(2, side / 5);
    const int r_max = std::max(r_min, side / 3);
    const int shift = side / 8;  // center offset range, keeps every shape inside the frame
    const int blur_width = static_cast<int>(std::floor(spec.blur + 0.5));
    const double amplitude = spec.noise * 255.0;
    for (int c = 0; c < spec.n_classes; ++c) {
        char name[32];
        std::snprintf(name, sizeof(name), "%02d_%s", c, shape_name(static_cast<Shape>(c)));
        ds.class_names.emplace_back(name);
    }
    for (int c = 0; c < spec.n_classes; ++c) {
        Rng rng = Rng::derive(spec.seed, static_cast<std::uint64_t>(c));
        for (int i = 0; i < spec.per_class; ++i) {
            ShapeParams p = canonical_params(side);
            if (i > 0) {
                p.radius = r_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(r_max - r_min + 1)));
                const auto span = static_cast<std::uint64_t>(2 * shift + 1);
                p.cx = side / 2 - shift + static_cast<int>(rng.below(span));
                p.cy = side / 2 - shift + static_cast<int>(rng.below(span));
            }
            p.thickness = thickness;
            GrayImage img = horizontal_box_blur(render_shape(static_cast<Shape>(c), p, side), blur_width);
            if (amplitude > 0.0) {
                for (auto &px : img.pixels) px = round_to_byte(px + rng.uniform(-amplitude, amplitude));
            }
            ds.samples.push_back({std::move(img), c});
        }
    }
    return ds;
}

/// Provenance record written next to generated or preprocessed datasets.
inline nlohmann::json dataset_manifest(const Dataset &ds, const nlohmann::json &parameters) {
    nlohmann::json m;
    m["format_version"] = 1;
    m["class_names"] = ds.class_names;
    m["counts"] = ds.class_counts();
    m["dataset_hash"] = dataset_hash(ds);
    m["parameters"] = parameters;
    return m;
}

}  // namespace qimg
