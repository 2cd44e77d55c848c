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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qimg/error.hpp"

namespace qimg {

/// 8-bit grayscale raster, row-major (y major, x minor).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w <= 0 || h <= 0) throw ValidationError("image dimensions must be positive");
        pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
    }
    GrayImage(int w, int h, std::vector<std::uint8_t> data) : width(w), height(h), pixels(std::move(data)) {
        if (w <= 0 || h <= 0) throw ValidationError("image dimensions must be positive");
        if (pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
            throw ValidationError("pixel count " + std::to_string(pixels.size()) + " does not match " +
                                  std::to_string(w) + "x" + std::to_string(h));
        }
    }

    std::size_t size() const { return pixels.size(); }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t &at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const GrayImage &, const GrayImage &) = default;
};

inline bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

/// log2 of a power of two; -1 otherwise.
inline int exact_log2(long long v) {
    if (!is_power_of_two(v)) return -1;
    int n = 0;
    while ((1LL << n) < v) ++n;
    return n;
}

/// Returns log2(side) of a square power-of-two image, throwing ValidationError otherwise.
inline int square_pow2_exponent(const GrayImage &img, const char *who) {
    if (img.width != img.height) {
        throw ValidationError(std::string(who) + ": image must be square, got " + std::to_string(img.width) + "x" +
                              std::to_string(img.height));
    }
    const int n = exact_log2(img.width);
    if (n < 1) throw ValidationError(std::string(who) + ": side " + std::to_string(img.width) + " is not 2^n, n>=1");
    return n;
}

}  // namespace qimg
