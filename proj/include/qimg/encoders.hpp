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

// Quantum image encoders.
//
// Three schemes turn a GrayImage into quantum states and measured features:
//
//   QCNN  2x2 patches -> 4-qubit circuit (RX angle encoding, CRZ ring, CRY pooling
//         onto q3) -> <Z> on q3. One feature per patch.
//   FRQI  one color qubit (MSB) + 2n position qubits: (cos t_i|0> + sin t_i|1>)|i> / 2^n.
//   NEQR  8 intensity qubits (MSB side) + 2n position qubits: |f(Y,X)>|YX> / 2^n.
//
// Position index i = Y * side + X, held in the low 2n qubits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qimg/error.hpp"
#include "qimg/image.hpp"
#include "qimg/statevector.hpp"

namespace qimg {

enum class Method { QCNN, FRQI, NEQR };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::QCNN: return "qcnn";
        case Method::FRQI: return "frqi";
        case Method::NEQR: return "neqr";
    }
    return "?";
}

inline Method parse_method(std::string_view name) {
    if (name == "qcnn") return Method::QCNN;
    if (name == "frqi") return Method::FRQI;
    if (name == "neqr") return Method::NEQR;
    throw ValidationError("unknown encoding method '" + std::string(name) + "'");
}

enum class EncodeMode { GateLevel, DirectAmplitude };

/// Color angle in [0, pi/2].
struct PixelAngle {
    double theta = 0.0;
};

/// Measured classical features plus the encoder that produced them.
struct FeatureVector {
    std::vector<double> values;
    Method method = Method::QCNN;
};

inline constexpr int kIntensityQubits = 8;

/// Linear map 0..255 -> 0..pi/2.
inline PixelAngle pixel_to_angle(int p) {
    if (p < 0 || p > 255) throw ValidationError("pixel value " + std::to_string(p) + " outside [0, 255]");
    return {static_cast<double>(p) / 255.0 * (std::numbers::pi / 2.0)};
}

// ---------------------------------------------------------------------------
// QCNN patch circuit

/// Angle of each CRZ in the entangling ring q0->q1->q2->q3->q0.
inline constexpr double kQcnnRingAngle = std::numbers::pi / 2.0;
/// Angle of each CRY pooling gate q0,q1,q2 -> q3 (deferred-measurement pooling).
inline constexpr double kQcnnPoolAngle = std::numbers::pi / 2.0;
inline constexpr int kQcnnQubits = 4;
inline constexpr int kQcnnReadoutQubit = 3;

inline QuantumCircuit qcnn_patch_circuit(std::span<const int> patch) {
    if (patch.size() != 4) throw ValidationError("QCNN patch needs exactly 4 pixels, got " + std::to_string(patch.size()));
    QuantumCircuit circuit(kQcnnQubits);
    for (int q = 0; q < 4; ++q) circuit.add(Gate::rx(q, pixel_to_angle(patch[q]).theta));
    for (int q = 0; q < 4; ++q) circuit.add(Gate::crz(q, (q + 1) % 4, kQcnnRingAngle));
    for (int q = 0; q < 3; ++q) circuit.add(Gate::cry(q, kQcnnReadoutQubit, kQcnnPoolAngle));
    return circuit;
}

/// <Z> of the pooled qubit after the patch circuit; in [-1, 1].
inline double qcnn_encode_patch(std::span<const int> patch) {
    return expectation_z(qcnn_patch_circuit(patch).run(), kQcnnReadoutQubit);
}

/// Pixels of patch (px, py) in qubit order: top-left, top-right, bottom-left, bottom-right.
inline std::array<int, 4> qcnn_patch_pixels(const GrayImage &img, int px, int py) {
    const int x = 2 * px;
    const int y = 2 * py;
    return {img.at(x, y), img.at(x + 1, y), img.at(x, y + 1), img.at(x + 1, y + 1)};
}

inline void check_qcnn_shape(const GrayImage &img) {
    if (img.width <= 0 || img.height <= 0 || img.width % 2 != 0 || img.height % 2 != 0) {
        throw ValidationError("QCNN encoding needs even image dimensions, got " + std::to_string(img.width) + "x" +
                              std::to_string(img.height));
    }
}

/// One feature per non-overlapping 2x2 patch, patches in row-major order.
inline FeatureVector qcnn_encode_image(const GrayImage &img) {
    check_qcnn_shape(img);
    FeatureVector out{{}, Method::QCNN};
    out.values.reserve(img.size() / 4);
    for (int py = 0; py < img.height / 2; ++py) {
        for (int px = 0; px < img.width / 2; ++px) out.values.push_back(qcnn_encode_patch(qcnn_patch_pixels(img, px, py)));
    }
    return out;
}

/// Renders a width x height grid of QCNN features as an image, f -> round((f+1)/2*255).
inline GrayImage qcnn_render(std::span<const double> features, int width, int height) {
    GrayImage out(width, height);
    if (features.size() != out.size()) throw ValidationError("feature count does not match render size");
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double v = std::floor((features[i] + 1.0) / 2.0 * 255.0 + 0.5);
        out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shared helpers for position-register encoders

namespace detail {

/// Emits X gates so that the position qubits read all-ones exactly when they hold `index`.
/// `flipped` tracks which position qubits are currently inverted.
inline void retarget_position(QuantumCircuit &circuit, std::uint64_t index, int position_qubits,
                              std::uint64_t &flipped) {
    const std::uint64_t mask = (std::uint64_t{1} << position_qubits) - 1;
    const std::uint64_t wanted = ~index & mask;
    const std::uint64_t change = wanted ^ flipped;
    for (int q = 0; q < position_qubits; ++q) {
        if (change & (std::uint64_t{1} << q)) circuit.add(Gate::x(q));
    }
    flipped = wanted;
}

inline std::vector<int> range_qubits(int first, int count) {
    std::vector<int> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = first + i;
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FRQI

inline int frqi_qubits(int side_exponent) { return 2 * side_exponent + 1; }

/// Hadamards on the position register, then one position-controlled RY(2 theta_i) per pixel.
inline QuantumCircuit frqi_circuit(const GrayImage &img) {
    const int n = square_pow2_exponent(img, "frqi_encode");
    const int pos_qubits = 2 * n;
    QuantumCircuit circuit(frqi_qubits(n));
    for (int q = 0; q < pos_qubits; ++q) circuit.add(Gate::h(q));
    const auto controls = detail::range_qubits(0, pos_qubits);
    std::uint64_t flipped = 0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        detail::retarget_position(circuit, i, pos_qubits, flipped);
        circuit.add(Gate::mcry(controls, pos_qubits, 2.0 * pixel_to_angle(img.pixels[i]).theta));
    }
    detail::retarget_position(circuit, (std::uint64_t{1} << pos_qubits) - 1, pos_qubits, flipped);
    return circuit;
}

inline StateVector frqi_encode(const GrayImage &img, EncodeMode mode = EncodeMode::DirectAmplitude) {
    const int n = square_pow2_exponent(img, "frqi_encode");
    if (mode == EncodeMode::GateLevel) return frqi_circuit(img).run();
    const std::size_t positions = img.size();
    const double scale = 1.0 / static_cast<double>(1 << n);
    std::vector<Amplitude> amps(2 * positions);
    for (std::size_t i = 0; i < positions; ++i) {
        const double theta = pixel_to_angle(img.pixels[i]).theta;
        amps[i] = scale * std::cos(theta);
        amps[positions + i] = scale * std::sin(theta);
    }
    return StateVector(frqi_qubits(n), std::move(amps));
}

inline int checked_side_exponent(int side, const char *who) {
    const int n = exact_log2(side);
    if (n < 1) throw ValidationError(std::string(who) + ": side " + std::to_string(side) + " is not 2^n, n>=1");
    return n;
}

/// Recovers theta_i from P(color, position) and rounds back to 8 bits.
inline GrayImage frqi_decode(const StateVector &state, int side) {
    const int n = checked_side_exponent(side, "frqi_decode");
    if (state.n_qubits() != frqi_qubits(n)) {
        throw ValidationError("frqi_decode: state has " + std::to_string(state.n_qubits()) + " qubits, side " +
                              std::to_string(side) + " needs " + std::to_string(frqi_qubits(n)));
    }
    GrayImage out(side, side);
    const std::size_t positions = out.size();
    for (std::size_t i = 0; i < positions; ++i) {
        const double p0 = std::norm(state[i]);
        const double p1 = std::norm(state[positions + i]);
        const double theta = std::atan2(std::sqrt(p1), std::sqrt(p0));
        const double v = std::floor(theta / (std::numbers::pi / 2.0) * 255.0 + 0.5);
        out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return out;
}

// ---------------------------------------------------------------------------
// NEQR

inline int neqr_qubits(int side_exponent) { return 2 * side_exponent + kIntensityQubits; }

/// Hadamards on the position register, then per pixel one position-controlled X per set intensity bit.
inline QuantumCircuit neqr_circuit(const GrayImage &img) {
    const int n = square_pow2_exponent(img, "neqr_encode");
    const int pos_qubits = 2 * n;
    QuantumCircuit circuit(neqr_qubits(n));
    for (int q = 0; q < pos_qubits; ++q) circuit.add(Gate::h(q));
    const auto controls = detail::range_qubits(0, pos_qubits);
    std::uint64_t flipped = 0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const int f = img.pixels[i];
        if (f == 0) continue;
        detail::retarget_position(circuit, i, pos_qubits, flipped);
        for (int b = 0; b < kIntensityQubits; ++b) {
            if (f & (1 << b)) circuit.add(Gate::mcx(controls, pos_qubits + b));
        }
    }
    detail::retarget_position(circuit, (std::uint64_t{1} << pos_qubits) - 1, pos_qubits, flipped);
    return circuit;
}

inline StateVector neqr_encode(const GrayImage &img, EncodeMode mode = EncodeMode::DirectAmplitude) {
    const int n = square_pow2_exponent(img, "neqr_encode");
    const int qubits = neqr_qubits(n);
    if (qubits > kMaxQubits) {
        throw CapacityError("neqr_encode: side " + std::to_string(img.width) + " needs " + std::to_string(qubits) +
                            " qubits (max " + std::to_string(kMaxQubits) + ")");
    }
    if (mode == EncodeMode::GateLevel) return neqr_circuit(img).run();
    const std::size_t positions = img.size();
    std::vector<Amplitude> amps(positions << kIntensityQubits);
    const double amp = 1.0 / static_cast<double>(1 << n);
    for (std::size_t i = 0; i < positions; ++i) amps[(static_cast<std::size_t>(img.pixels[i]) * positions) + i] = amp;
    return StateVector(qubits, std::move(amps));
}

/// Exact retrieval: each position must carry exactly one intensity pattern.
inline GrayImage neqr_decode(const StateVector &state, int side) {
    const int n = checked_side_exponent(side, "neqr_decode");
    if (state.n_qubits() != neqr_qubits(n)) {
        throw ValidationError("neqr_decode: state has " + std::to_string(state.n_qubits()) + " qubits, side " +
                              std::to_string(side) + " needs " + std::to_string(neqr_qubits(n)));
    }
    constexpr double kPresent = 1e-9;
    GrayImage out(side, side);
    const std::size_t positions = out.size();
    for (std::size_t i = 0; i < positions; ++i) {
        int found = -1;
        for (int f = 0; f < 256; ++f) {
            if (std::norm(state[static_cast<std::size_t>(f) * positions + i]) <= kPresent) continue;
            if (found >= 0) {
                throw MalformedStateError("neqr_decode: position " + std::to_string(i) +
                                          " carries more than one intensity pattern");
            }
            found = f;
        }
        if (found < 0) throw MalformedStateError("neqr_decode: position " + std::to_string(i) + " has zero probability");
        out.pixels[i] = static_cast<std::uint8_t>(found);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Measurement -> features

inline std::size_t feature_length(Method method, int width, int height) {
    const auto pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    return method == Method::QCNN ? pixels / 4 : pixels;
}

/// Accumulates measured basis outcomes and turns them into a FeatureVector.
///
/// QCNN records one job per patch with 4-bit outcomes; FRQI/NEQR record job 0 with
/// full-register outcomes. Positions that never occur yield a zero feature.
class FeatureTally {
   public:
    FeatureTally(Method method, std::size_t feature_count) : method_(method), sums_(feature_count), hits_(feature_count) {}

    void record(std::size_t job, std::uint64_t outcome) {
        const std::size_t positions = sums_.size();
        switch (method_) {
            case Method::QCNN:
                sums_[job] += (outcome >> kQcnnReadoutQubit) & 1 ? -1.0 : 1.0;
                hits_[job] += 1;
                break;
            case Method::FRQI: {
                const std::size_t pos = outcome % positions;
                sums_[pos] += static_cast<double>(outcome / positions);
                hits_[pos] += 1;
                break;
            }
            case Method::NEQR: {
                const std::size_t pos = outcome % positions;
                sums_[pos] += static_cast<double>(outcome / positions) / 255.0;
                hits_[pos] += 1;
                break;
            }
        }
    }

    FeatureVector finish() const {
        FeatureVector out{std::vector<double>(sums_.size(), 0.0), method_};
        for (std::size_t i = 0; i < sums_.size(); ++i) {
            if (hits_[i] > 0) out.values[i] = sums_[i] / static_cast<double>(hits_[i]);
        }
        return out;
    }

   private:
    Method method_;
    std::vector<double> sums_;
    std::vector<std::uint64_t> hits_;
};

/// Measured features for one image.
///
/// shots == 0: exact values (QCNN <Z>, FRQI P(color=1 | position), NEQR intensity/255).
/// shots > 0: estimates from `shots` seeded measurements (per patch for QCNN).
inline FeatureVector extract_features(const GrayImage &img, Method method, std::uint64_t shots = 0,
                                      std::uint64_t seed = 0) {
    switch (method) {
        case Method::QCNN: {
            if (shots == 0) return qcnn_encode_image(img);
            check_qcnn_shape(img);
            const std::size_t count = feature_length(method, img.width, img.height);
            FeatureTally tally(method, count);
            std::size_t job = 0;
            for (int py = 0; py < img.height / 2; ++py) {
                for (int px = 0; px < img.width / 2; ++px, ++job) {
                    const auto probs = probabilities(qcnn_patch_circuit(qcnn_patch_pixels(img, px, py)).run());
                    BasisSampler sampler(probs);
                    Rng rng = Rng::derive(seed, job);
                    for (std::uint64_t s = 0; s < shots; ++s) tally.record(job, sampler.draw(rng));
                }
            }
            return tally.finish();
        }
        case Method::FRQI: {
            const StateVector state = frqi_encode(img);
            const std::size_t positions = img.size();
            if (shots == 0) {
                FeatureVector out{std::vector<double>(positions), method};
                for (std::size_t i = 0; i < positions; ++i) {
                    const double p0 = std::norm(state[i]);
                    const double p1 = std::norm(state[positions + i]);
                    out.values[i] = p0 + p1 > 0.0 ? p1 / (p0 + p1) : 0.0;
                }
                return out;
            }
            FeatureTally tally(method, positions);
            for (const auto &[outcome, n] : sample_counts(state, shots, seed)) {
                for (std::uint64_t k = 0; k < n; ++k) tally.record(0, outcome);
            }
            return tally.finish();
        }
        case Method::NEQR: {
            const StateVector state = neqr_encode(img);
            if (shots == 0) {
                const GrayImage decoded = neqr_decode(state, img.width);
                FeatureVector out{std::vector<double>(decoded.size()), method};
                for (std::size_t i = 0; i < decoded.size(); ++i) out.values[i] = decoded.pixels[i] / 255.0;
                return out;
            }
            FeatureTally tally(method, img.size());
            for (const auto &[outcome, n] : sample_counts(state, shots, seed)) {
                for (std::uint64_t k = 0; k < n; ++k) tally.record(0, outcome);
            }
            return tally.finish();
        }
    }
    throw ValidationError("unknown method");
}

/// Image view of a feature vector. QCNN features give a (width/2) x (height/2) map;
/// FRQI inverts P(1) = sin^2(theta); NEQR scales the mean intensity back to 0..255.
inline GrayImage render_features(const FeatureVector &f, int width, int height) {
    if (f.method == Method::QCNN) return qcnn_render(f.values, width / 2, height / 2);
    GrayImage out(width, height);
    if (f.values.size() != out.size()) throw ValidationError("feature count does not match the image size");
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = std::clamp(f.values[i], 0.0, 1.0);
        const double unit = f.method == Method::FRQI ? std::asin(std::sqrt(v)) / (std::numbers::pi / 2.0) : v;
        out.pixels[i] = static_cast<std::uint8_t>(std::floor(255.0 * unit + 0.5));
    }
    return out;
}

}  // namespace qimg
