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

// Test-only helpers: a dense-matrix circuit oracle that never touches the
// simulator's kernels, plus random generators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "qimg/image.hpp"
#include "qimg/rng.hpp"
#include "qimg/statevector.hpp"

namespace qimg::testing {

using C = std::complex<double>;
using CMat = std::vector<std::vector<C>>;

inline CMat identity(std::size_t n) {
    CMat m(n, std::vector<C>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline CMat kron(const CMat &a, const CMat &b) {
    const std::size_t ra = a.size(), rb = b.size();
    CMat out(ra * rb, std::vector<C>(ra * rb, 0.0));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ra; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < rb; ++l) out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
    return out;
}

inline CMat matmul(const CMat &a, const CMat &b) {
    const std::size_t n = a.size();
    CMat out(n, std::vector<C>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline std::vector<C> matvec(const CMat &m, const std::vector<C> &v) {
    std::vector<C> out(v.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

/// 2x2 matrices written out from their textbook definitions.
inline CMat oracle_2x2(GateKind kind, double t) {
    const C i{0.0, 1.0};
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    switch (kind) {
        case GateKind::RX: return {{c, -i * s}, {-i * s, c}};
        case GateKind::RY:
        case GateKind::CRY:
        case GateKind::MCRY: return {{c, -s}, {s, c}};
        case GateKind::RZ:
        case GateKind::CRZ: return {{std::exp(-i * (t / 2)), 0.0}, {0.0, std::exp(i * (t / 2))}};
        case GateKind::H: return {{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, {1 / std::sqrt(2.0), -1 / std::sqrt(2.0)}};
        default: return {{0.0, 1.0}, {1.0, 0.0}};
    }
}

/// Full 2^n x 2^n matrix of a gate: I + (prod_c |1><1|_c) (x) (U - I)_target.
/// Qubit 0 is the rightmost Kronecker factor.
inline CMat oracle_gate_matrix(const Gate &g, int n) {
    const CMat u = oracle_2x2(g.kind, g.angle);
    const CMat p1 = {{0.0, 0.0}, {0.0, 1.0}};
    CMat u_minus_i = u;
    u_minus_i[0][0] -= 1.0;
    u_minus_i[1][1] -= 1.0;
    CMat term = {{1.0}};
    for (int q = n - 1; q >= 0; --q) {
        const bool is_control = std::find(g.controls.begin(), g.controls.end(), q) != g.controls.end();
        const CMat &f = q == g.targets[0] ? u_minus_i : (is_control ? p1 : identity(2));
        term = kron(term, f);
    }
    CMat full = identity(std::size_t{1} << n);
    for (std::size_t r = 0; r < full.size(); ++r)
        for (std::size_t c = 0; c < full.size(); ++c) full[r][c] += term[r][c];
    return full;
}

inline std::vector<C> oracle_run(const std::vector<Gate> &gates, int n) {
    std::vector<C> v(std::size_t{1} << n, 0.0);
    v[0] = 1.0;
    for (const auto &g : gates) v = matvec(oracle_gate_matrix(g, n), v);
    return v;
}

/// A random valid gate of any kind for an n-qubit register.
inline Gate random_gate(int n, Rng &rng) {
    std::vector<int> qubits(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) qubits[static_cast<std::size_t>(q)] = q;
    shuffle(qubits.begin(), qubits.end(), rng);
    const double angle = rng.uniform(-2 * std::numbers::pi, 2 * std::numbers::pi);
    const int kinds = n >= 2 ? 10 : 5;
    const auto kind = static_cast<GateKind>(rng.below(static_cast<std::uint64_t>(kinds)));
    Gate g{kind, {qubits[0]}, {}, is_rotation(kind) ? angle : 0.0};
    if (kind == GateKind::CRZ || kind == GateKind::CRY || kind == GateKind::CX) g.controls = {qubits[1]};
    if (kind == GateKind::MCX || kind == GateKind::MCRY) {
        const auto count = rng.below(static_cast<std::uint64_t>(n));  // 0..n-1 controls
        g.controls.assign(qubits.begin() + 1, qubits.begin() + 1 + static_cast<std::ptrdiff_t>(count));
    }
    return g;
}

inline GrayImage random_image(int w, int h, Rng &rng) {
    GrayImage img(w, h);
    for (auto &p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
   public:
    explicit TempDir(const std::string &tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("qimg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const { return path_; }

   private:
    std::filesystem::path path_;
};

}  // namespace qimg::testing
