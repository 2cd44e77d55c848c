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

// Reading and writing Netpbm rasters (P2/P3/P5/P6). Color inputs are reduced to
// gray by the unweighted channel mean.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "qimg/error.hpp"
#include "qimg/image.hpp"

namespace qimg {

namespace detail {

class PnmCursor {
   public:
    PnmCursor(const std::vector<unsigned char> &bytes, const std::string &path) : bytes_(bytes), path_(path) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("expected a number");
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_++] - '0');
            if (v > 1'000'000'000) fail("number too large");
        }
        return v;
    }

    /// Consumes the single whitespace byte that separates a binary header from its raster.
    void end_header() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("malformed header");
        ++pos_;
    }

    unsigned read_binary(int bytes_per_sample) {
        if (pos_ + static_cast<std::size_t>(bytes_per_sample) > bytes_.size()) fail("truncated raster");
        unsigned v = bytes_[pos_++];
        if (bytes_per_sample == 2) v = (v << 8) | bytes_[pos_++];
        return v;
    }

    [[noreturn]] void fail(const std::string &why) const { throw IoError(path_ + ": " + why); }

   private:
    const std::vector<unsigned char> &bytes_;
    const std::string &path_;
    std::size_t pos_ = 2;
};

}  // namespace detail

inline GrayImage read_netpbm(const std::filesystem::path &path) {
    const std::string name = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(name + ": cannot open file");
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 2 || bytes[0] != 'P') throw IoError(name + ": not a Netpbm image");
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
        throw IoError(name + ": unsupported Netpbm variant P" + std::string(1, kind));
    }
    detail::PnmCursor cur(bytes, name);
    const long w = cur.read_int();
    const long h = cur.read_int();
    const long maxval = cur.read_int();
    if (w <= 0 || h <= 0 || w > 1 << 15 || h > 1 << 15) cur.fail("bad dimensions");
    if (maxval <= 0 || maxval > 65535) cur.fail("bad maxval");
    const bool ascii = kind == '2' || kind == '3';
    const int channels = (kind == '3' || kind == '6') ? 3 : 1;
    const int sample_bytes = maxval > 255 ? 2 : 1;
    if (!ascii) cur.end_header();

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < img.size(); ++i) {
        unsigned long sum = 0;
        for (int c = 0; c < channels; ++c) {
            const unsigned long v = ascii ? static_cast<unsigned long>(cur.read_int()) : cur.read_binary(sample_bytes);
            if (v > static_cast<unsigned long>(maxval)) cur.fail("sample exceeds maxval");
            sum += v;
        }
        // Rescale to 0..255 and round half up, in integers.
        const unsigned long den = static_cast<unsigned long>(channels) * static_cast<unsigned long>(maxval);
        img.pixels[i] = static_cast<std::uint8_t>((2 * sum * 255 + den) / (2 * den));
    }
    return img;
}

/// Writes a binary (P5) graymap, creating missing parent directories.
inline void write_pgm(const std::filesystem::path &path, const GrayImage &img) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char *>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace qimg
