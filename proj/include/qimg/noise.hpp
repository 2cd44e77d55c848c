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

// Stochastic-trajectory noise: depolarizing errors after every gate and
// classical readout flips, sampled shot by shot.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "qimg/encoders.hpp"
#include "qimg/error.hpp"
#include "qimg/rng.hpp"
#include "qimg/statevector.hpp"

namespace qimg {

struct NoiseSpec {
    double depolarizing_prob = 0.0;  ///< per gate, on its target qubit
    double readout_flip_prob = 0.0;  ///< per measured bit
    std::uint64_t seed = 0;

    void validate() const {
        if (!(depolarizing_prob >= 0.0 && depolarizing_prob <= 1.0)) {
            throw ValidationError("depolarizing probability must lie in [0, 1]");
        }
        if (!(readout_flip_prob >= 0.0 && readout_flip_prob <= 1.0)) {
            throw ValidationError("readout flip probability must lie in [0, 1]");
        }
    }

    bool noiseless() const { return depolarizing_prob == 0.0 && readout_flip_prob == 0.0; }
};

enum class Pauli { I, X, Y, Z };

inline Mat2 pauli_matrix(Pauli p) {
    const Amplitude i{0.0, 1.0};
    switch (p) {
        case Pauli::I: return {1.0, 0.0, 0.0, 1.0};
        case Pauli::X: return {0.0, 1.0, 1.0, 0.0};
        case Pauli::Y: return {0.0, -i, i, 0.0};
        case Pauli::Z: return {1.0, 0.0, 0.0, -1.0};
    }
    return {1.0, 0.0, 0.0, 1.0};
}

inline void apply_pauli(StateVector &state, int qubit, Pauli p) {
    if (p == Pauli::I) return;
    state.apply_matrix(pauli_matrix(p), qubit);
}

inline void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("probability " + std::to_string(p) + " outside [0, 1]");
}

/// One depolarizing trajectory step: with probability p a uniformly chosen X, Y or Z hits `qubit`.
/// Returns the Pauli that was applied (I when none).
inline Pauli apply_depolarizing(StateVector &state, int qubit, double p, Rng &rng) {
    check_probability(p);
    check_qubit(state, qubit);
    if (p == 0.0 || !rng.bernoulli(p)) return Pauli::I;
    const auto which = static_cast<Pauli>(1 + rng.below(3));
    apply_pauli(state, qubit, which);
    return which;
}

/// Samples full-register outcomes of a circuit under per-gate depolarizing noise.
///
/// Each call to sample() is one trajectory and one shot. Trajectories without any
/// error reuse the noiseless distribution; the others restart from the nearest
/// cached prefix state before the first error.
class TrajectorySampler {
   public:
    static constexpr std::size_t kCheckpointBudgetBytes = std::size_t{64} << 20;

    TrajectorySampler(const QuantumCircuit &circuit, double depolarizing_prob,
                      std::size_t checkpoint_budget_bytes = kCheckpointBudgetBytes)
        : circuit_(circuit), p_(depolarizing_prob), clean_(probabilities(circuit.run())) {
        check_probability(p_);
        const std::size_t state_bytes = (std::size_t{1} << circuit.n_qubits) * sizeof(Amplitude);
        const std::size_t gates = circuit.gates.size();
        const std::size_t max_checkpoints = std::max<std::size_t>(1, checkpoint_budget_bytes / state_bytes);
        stride_ = std::max<std::size_t>(1, (gates + max_checkpoints - 1) / max_checkpoints);
        if (p_ > 0.0) {
            StateVector state(circuit.n_qubits);
            for (std::size_t g = 0; g < gates; ++g) {
                if (g % stride_ == 0) checkpoints_.push_back(state);
                apply_raw(state, circuit.gates[g]);
            }
            if (checkpoints_.empty()) checkpoints_.push_back(state);
        }
    }

    /// Gates between cached prefix states.
    std::size_t checkpoint_stride() const { return stride_; }

    std::uint64_t sample(Rng &rng) {
        errors_.clear();
        if (p_ > 0.0) {
            for (std::size_t g = 0; g < circuit_.gates.size(); ++g) {
                if (rng.bernoulli(p_)) errors_.push_back({g, static_cast<Pauli>(1 + rng.below(3))});
            }
        }
        if (errors_.empty()) return clean_.draw(rng);

        const std::size_t first = errors_.front().gate;
        const std::size_t start = (first / stride_) * stride_;
        StateVector state = checkpoints_[first / stride_];
        auto next_error = errors_.begin();
        for (std::size_t g = start; g < circuit_.gates.size(); ++g) {
            const Gate &gate = circuit_.gates[g];
            apply_raw(state, gate);
            for (; next_error != errors_.end() && next_error->gate == g; ++next_error) {
                apply_pauli(state, gate.target(), next_error->pauli);
            }
        }
        const double u = rng.uniform();
        double acc = 0.0;
        const auto amps = state.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            acc += std::norm(amps[i]);
            if (u < acc) return i;
        }
        return amps.size() - 1;
    }

   private:
    struct ErrorEvent {
        std::size_t gate;
        Pauli pauli;
    };

    static void apply_raw(StateVector &state, const Gate &gate) {
        state.apply_matrix(target_matrix(gate), gate.target(), gate.controls);
    }

    QuantumCircuit circuit_;
    double p_;
    BasisSampler clean_;
    std::size_t stride_ = 1;
    std::vector<StateVector> checkpoints_;
    std::vector<ErrorEvent> errors_;
};

/// Flips each bit in `measured_mask` independently with probability `p`.
inline std::uint64_t apply_readout_flips(std::uint64_t outcome, std::uint64_t measured_mask, double p, Rng &rng) {
    if (p == 0.0) return outcome;
    for (int b = 0; b < 64 && (measured_mask >> b) != 0; ++b) {
        const std::uint64_t bit = std::uint64_t{1} << b;
        if ((measured_mask & bit) && rng.bernoulli(p)) outcome ^= bit;
    }
    return outcome;
}

/// Sampled features with depolarizing noise after every gate of the gate-level
/// circuit and readout flips on each measured bit. Always shot based.
inline FeatureVector noisy_extract_features(const GrayImage &img, Method method, const NoiseSpec &spec,
                                            std::uint64_t shots) {
    spec.validate();
    if (shots == 0) throw ValidationError("noisy feature extraction needs shots >= 1");
    switch (method) {
        case Method::QCNN: {
            check_qcnn_shape(img);
            FeatureTally tally(method, feature_length(method, img.width, img.height));
            const std::uint64_t measured = std::uint64_t{1} << kQcnnReadoutQubit;
            std::size_t job = 0;
            for (int py = 0; py < img.height / 2; ++py) {
                for (int px = 0; px < img.width / 2; ++px, ++job) {
                    const QuantumCircuit circuit = qcnn_patch_circuit(qcnn_patch_pixels(img, px, py));
                    TrajectorySampler sampler(circuit, spec.depolarizing_prob);
                    Rng rng = Rng::derive(spec.seed, job);
                    for (std::uint64_t s = 0; s < shots; ++s) {
                        const auto outcome = sampler.sample(rng);
                        tally.record(job, apply_readout_flips(outcome, measured, spec.readout_flip_prob, rng));
                    }
                }
            }
            return tally.finish();
        }
        case Method::FRQI:
        case Method::NEQR: {
            const QuantumCircuit circuit = method == Method::FRQI ? frqi_circuit(img) : neqr_circuit(img);
            if (circuit.n_qubits > kMaxQubits) throw CapacityError("register too wide for noisy simulation");
            TrajectorySampler sampler(circuit, spec.depolarizing_prob);
            const std::uint64_t measured = (std::uint64_t{1} << circuit.n_qubits) - 1;
            FeatureTally tally(method, img.size());
            Rng rng = Rng::derive(spec.seed, 0);
            for (std::uint64_t s = 0; s < shots; ++s) {
                const auto outcome = sampler.sample(rng);
                tally.record(0, apply_readout_flips(outcome, measured, spec.readout_flip_prob, rng));
            }
            return tally.finish();
        }
    }
    throw ValidationError("unknown method");
}

}  // namespace qimg
