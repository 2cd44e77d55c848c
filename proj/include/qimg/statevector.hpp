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

// Dense statevector simulator.
//
// Conventions:
//   * qubit 0 is the least-significant bit of the amplitude index;
//   * RX(t) = exp(-i t X / 2), RY(t) = exp(-i t Y / 2), RZ(t) = exp(-i t Z / 2);
//   * controlled and multi-controlled gates act when every control bit is 1 and
//     are applied directly on the amplitudes (no decomposition).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qimg/error.hpp"
#include "qimg/rng.hpp"

namespace qimg {

using Amplitude = std::complex<double>;

/// Largest register the simulator accepts. 2^24 amplitudes of complex<double> is 256 MiB.
inline constexpr int kMaxQubits = 24;

/// Row-major 2x2 complex matrix {m00, m01, m10, m11}.
using Mat2 = std::array<Amplitude, 4>;

enum class GateKind { RX, RY, RZ, H, X, CRZ, CRY, CX, MCX, MCRY };

inline std::string_view to_string(GateKind kind) {
    switch (kind) {
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::CRZ: return "CRZ";
        case GateKind::CRY: return "CRY";
        case GateKind::CX: return "CX";
        case GateKind::MCX: return "MCX";
        case GateKind::MCRY: return "MCRY";
    }
    return "?";
}

inline bool is_rotation(GateKind kind) {
    switch (kind) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::CRZ:
        case GateKind::CRY:
        case GateKind::MCRY: return true;
        default: return false;
    }
}

/// One gate of a circuit. Every kind has a single target qubit.
struct Gate {
    GateKind kind = GateKind::X;
    std::vector<int> targets;
    std::vector<int> controls;
    double angle = 0.0;

    static Gate rx(int q, double theta) { return {GateKind::RX, {q}, {}, theta}; }
    static Gate ry(int q, double theta) { return {GateKind::RY, {q}, {}, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, {q}, {}, theta}; }
    static Gate h(int q) { return {GateKind::H, {q}, {}, 0.0}; }
    static Gate x(int q) { return {GateKind::X, {q}, {}, 0.0}; }
    static Gate crz(int control, int target, double theta) { return {GateKind::CRZ, {target}, {control}, theta}; }
    static Gate cry(int control, int target, double theta) { return {GateKind::CRY, {target}, {control}, theta}; }
    static Gate cx(int control, int target) { return {GateKind::CX, {target}, {control}, 0.0}; }
    static Gate mcx(std::vector<int> controls, int target) { return {GateKind::MCX, {target}, std::move(controls), 0.0}; }
    static Gate mcry(std::vector<int> controls, int target, double theta) {
        return {GateKind::MCRY, {target}, std::move(controls), theta};
    }

    int target() const { return targets.front(); }

    friend bool operator==(const Gate &, const Gate &) = default;
};

/// The 2x2 matrix a gate applies to its target (inside the control subspace).
inline Mat2 target_matrix(GateKind kind, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const Amplitude i{0.0, 1.0};
    switch (kind) {
        case GateKind::RX: return {c, -i * s, -i * s, c};
        case GateKind::RY:
        case GateKind::CRY:
        case GateKind::MCRY: return {c, -s, s, c};
        case GateKind::RZ:
        case GateKind::CRZ: return {std::polar(1.0, -angle / 2.0), 0.0, 0.0, std::polar(1.0, angle / 2.0)};
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            return {r, r, r, -r};
        }
        case GateKind::X:
        case GateKind::CX:
        case GateKind::MCX: return {0.0, 1.0, 1.0, 0.0};
    }
    throw ValidationError("unknown gate kind");
}

inline Mat2 target_matrix(const Gate &gate) { return target_matrix(gate.kind, gate.angle); }

/// Inverse gate: rotations negate their angle, the rest are involutions.
inline Gate adjoint(Gate gate) {
    if (is_rotation(gate.kind)) gate.angle = -gate.angle;
    return gate;
}

/// Throws ValidationError unless `gate` is well formed for an n-qubit register.
inline void validate(const Gate &gate, int n_qubits) {
    const auto name = std::string(to_string(gate.kind));
    if (gate.targets.size() != 1) throw ValidationError(name + ": expected exactly one target qubit");
    std::size_t want_controls = 0;
    bool fixed_controls = true;
    switch (gate.kind) {
        case GateKind::CRZ:
        case GateKind::CRY:
        case GateKind::CX: want_controls = 1; break;
        case GateKind::MCX:
        case GateKind::MCRY: fixed_controls = false; break;
        default: break;
    }
    if (fixed_controls && gate.controls.size() != want_controls) {
        throw ValidationError(name + ": expected " + std::to_string(want_controls) + " control qubit(s)");
    }
    if (!std::isfinite(gate.angle)) throw ValidationError(name + ": non-finite angle");
    std::vector<int> all = gate.controls;
    all.push_back(gate.target());
    for (int q : all) {
        if (q < 0 || q >= n_qubits) {
            throw ValidationError(name + ": qubit index " + std::to_string(q) + " out of range for " +
                                  std::to_string(n_qubits) + " qubits");
        }
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
        throw ValidationError(name + ": targets and controls must be distinct qubits");
    }
}

class StateVector {
   public:
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits) : n_qubits_(checked_qubits(n_qubits)), amps_(std::size_t{1} << n_qubits) {
        amps_[0] = 1.0;
    }

    /// Takes ownership of explicit amplitudes; the length must be 2^n and the norm 1 (within 1e-8).
    StateVector(int n_qubits, std::vector<Amplitude> amplitudes)
        : n_qubits_(checked_qubits(n_qubits)), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << n_qubits_)) {
            throw ValidationError("amplitude vector length " + std::to_string(amps_.size()) + " is not 2^" +
                                  std::to_string(n_qubits_));
        }
        if (std::abs(norm_squared() - 1.0) > 1e-8) throw ValidationError("amplitudes are not normalized");
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t dimension() const { return amps_.size(); }

    std::span<const Amplitude> amplitudes() const { return amps_; }
    std::span<Amplitude> amplitudes() { return amps_; }
    const Amplitude &operator[](std::size_t i) const { return amps_[i]; }
    Amplitude &operator[](std::size_t i) { return amps_[i]; }

    double norm_squared() const {
        double total = 0.0;
        for (const auto &a : amps_) total += std::norm(a);
        return total;
    }

    /// Applies `m` to `target` on the subspace where every control is 1. Indices are not validated.
    void apply_matrix(const Mat2 &m, int target, std::span<const int> controls = {}) {
        std::array<int, kMaxQubits> fixed{};
        std::size_t n_fixed = 0;
        std::uint64_t control_mask = 0;
        for (int c : controls) {
            fixed[n_fixed++] = c;
            control_mask |= std::uint64_t{1} << c;
        }
        fixed[n_fixed++] = target;
        std::sort(fixed.begin(), fixed.begin() + static_cast<std::ptrdiff_t>(n_fixed));
        const std::uint64_t target_bit = std::uint64_t{1} << target;
        const std::uint64_t free_count = std::uint64_t{1} << (n_qubits_ - static_cast<int>(n_fixed));
        for (std::uint64_t k = 0; k < free_count; ++k) {
            // Spread k over the free bit positions, leaving zeros at the fixed ones.
            std::uint64_t base = k;
            for (std::size_t j = 0; j < n_fixed; ++j) {
                const int p = fixed[j];
                const std::uint64_t low = base & ((std::uint64_t{1} << p) - 1);
                base = ((base >> p) << (p + 1)) | low;
            }
            base |= control_mask;
            Amplitude &a0 = amps_[base];
            Amplitude &a1 = amps_[base | target_bit];
            const Amplitude v0 = a0;
            const Amplitude v1 = a1;
            a0 = m[0] * v0 + m[1] * v1;
            a1 = m[2] * v0 + m[3] * v1;
        }
    }

    /// Applies a validated gate in place.
    void apply(const Gate &gate) {
        validate(gate, n_qubits_);
        apply_matrix(target_matrix(gate), gate.target(), gate.controls);
    }

    friend bool operator==(const StateVector &, const StateVector &) = default;

   private:
    static int checked_qubits(int n) {
        if (n < 1 || n > kMaxQubits) {
            throw CapacityError("qubit count " + std::to_string(n) + " outside supported range [1, " +
                                std::to_string(kMaxQubits) + "]");
        }
        return n;
    }

    int n_qubits_;
    std::vector<Amplitude> amps_;
};

inline StateVector new_zero_state(int n_qubits) { return StateVector(n_qubits); }

inline StateVector apply_gate(StateVector state, const Gate &gate) {
    state.apply(gate);
    return state;
}

/// Ordered gate list over a fixed register width.
struct QuantumCircuit {
    int n_qubits = 1;
    std::vector<Gate> gates;

    QuantumCircuit() = default;
    explicit QuantumCircuit(int n) : n_qubits(n) {
        if (n < 1 || n > kMaxQubits) throw CapacityError("circuit width " + std::to_string(n) + " unsupported");
    }

    QuantumCircuit &add(Gate gate) {
        validate(gate, n_qubits);
        gates.push_back(std::move(gate));
        return *this;
    }

    void apply_to(StateVector &state) const {
        if (state.n_qubits() != n_qubits) throw ValidationError("circuit width does not match state");
        for (const auto &g : gates) state.apply_matrix(target_matrix(g), g.target(), g.controls);
    }

    /// Runs the circuit on |0...0>.
    StateVector run() const {
        StateVector state(n_qubits);
        apply_to(state);
        return state;
    }

    /// Number of gates with more than one control. These are simulated natively, not decomposed.
    std::size_t multi_controlled_count() const {
        return static_cast<std::size_t>(
            std::count_if(gates.begin(), gates.end(), [](const Gate &g) { return g.controls.size() > 1; }));
    }
};

inline void check_qubit(const StateVector &state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits()) {
        throw ValidationError("qubit index " + std::to_string(qubit) + " out of range for " +
                              std::to_string(state.n_qubits()) + " qubits");
    }
}

inline std::vector<double> probabilities(const StateVector &state) {
    std::vector<double> out(state.dimension());
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(amps[i]);
    return out;
}

/// <psi| Z_qubit |psi>.
inline double expectation_z(const StateVector &state, int qubit) {
    check_qubit(state, qubit);
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    const auto amps = state.amplitudes();
    double total = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        total += (i & bit) ? -p : p;
    }
    return total;
}

/// Draws basis indices from a (possibly slightly unnormalized) probability table.
class BasisSampler {
   public:
    explicit BasisSampler(std::span<const double> probs) : cumulative_(probs.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            cumulative_[i] = acc;
        }
    }

    std::uint64_t draw(Rng &rng) const {
        const double u = rng.uniform() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        return static_cast<std::uint64_t>(it - cumulative_.begin());
    }

   private:
    std::vector<double> cumulative_;
};

/// Measures every qubit `shots` times. Identical seeds give identical counts.
inline std::map<std::uint64_t, std::uint64_t> sample_counts(const StateVector &state, std::uint64_t shots,
                                                             std::uint64_t seed) {
    if (shots == 0) throw ValidationError("shots must be >= 1");
    const auto probs = probabilities(state);
    BasisSampler sampler(probs);
    Rng rng(seed);
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) ++counts[sampler.draw(rng)];
    return counts;
}

}  // namespace qimg
