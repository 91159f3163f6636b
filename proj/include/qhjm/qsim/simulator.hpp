// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qhjm/qsim/circuit.hpp"

namespace qhjm::qsim {

/// Two-qubit depolarizing noise applied on statevector trajectories.
struct NoiseModel {
    double two_qubit_depolarizing_p = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ShotHistogram {
    std::string basis;
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;

    [[nodiscard]] double frequency(const std::string& bits) const;
    /// Label with the largest count; ties go to the lexicographically smallest.
    [[nodiscard]] std::string modal() const;
};

void apply_gate(StateVector& s, const GateOp& g);
void apply_single(StateVector& s, int qubit, const Eigen::Matrix2cd& u);

/// Noiseless: the ordered gate product applied to `input`.
/// Noisy: one trajectory seeded by noise->seed, on the noise-expanded circuit.
StateVector run_circuit(const Circuit& c, const StateVector& input,
                        const std::optional<NoiseModel>& noise = std::nullopt);

/// One stochastic trajectory. `native` should already be expanded (see
/// expand_for_noise); after every entangling gate, with probability p each
/// touched qubit receives an independent uniform draw from {I, X, Y, Z}.
StateVector run_trajectory(const Circuit& native, const StateVector& input, double p, Rng& rng);

/// Rewrites controlled unitaries, controlled phases and swaps into
/// single-qubit gates and CNOTs so that every entangling gate is counted.
Circuit expand_for_noise(const Circuit& c);

struct Projection {
    StateVector state;   // remaining qubits, order preserved
    double probability;  // weight of the matched register outcome
};

inline constexpr double kMinProjectionProbability = 1e-12;

/// Post-selects `reg` on `bits`. Throws DegenerateProjectionError when the
/// outcome probability is below kMinProjectionProbability.
Projection project_register(const StateVector& s, const Register& reg, const std::string& bits);

/// Outcome probabilities of `reg` (index = register value).
std::vector<double> register_probabilities(const StateVector& s, const Register& reg);

/// Per-qubit measurement basis: the basis states are B|0>, B|1>; B^dagger is
/// applied before a computational-basis readout. nullopt means z.
using BasisRotation = std::vector<std::optional<Eigen::Matrix2cd>>;

Eigen::Matrix2cd x_basis();
Eigen::Matrix2cd y_basis();

/// Draws `shots` readouts of `reg` from the (basis-rotated) state. The
/// generator is seeded from `seed` alone.
ShotHistogram sample_shots(const StateVector& s, const Register& reg, const BasisRotation& basis,
                           std::uint64_t shots, std::uint64_t seed, std::string basis_label = "z");

/// Draws `count` samples from a discrete distribution by CDF inversion.
std::vector<std::uint64_t> sample_indices(const std::vector<double>& probs, std::uint64_t count, Rng& rng);

/// Mean of |amplitude|^2 over `trajectories` noisy runs; trajectory t uses
/// stream t of `seed`.
std::vector<double> average_distribution(const Circuit& native, const StateVector& input, double p,
                                         std::uint64_t trajectories, std::uint64_t seed);

double total_variation(const std::vector<double>& a, const std::vector<double>& b);
double tv_to_uniform(const std::vector<double>& probs);
std::vector<double> histogram_distribution(const ShotHistogram& h, int width);

}  // namespace qhjm::qsim
