// SPDX-License-Identifier: Apache-2.0
// Internal: post-selected readout of the eigenvector register.
#pragma once

#include <optional>
#include <string>

#include "qhjm/qpca.hpp"

namespace qhjm::qpca::detail {

/// Seed tags keep the random streams of different pipeline stages apart.
enum class Stage : std::uint64_t { Iterate = 1, Phases = 2, Refine = 3, Calibrate = 4, Ambiguity = 5 };

std::uint64_t stage_seed(std::uint64_t master, Stage stage, std::uint64_t index);

/// The qPCA circuit with its noise-expanded form ready for trajectories.
class Engine {
public:
    Engine(const DensityMatrix& rho, int n_bits, double evolution_time, std::optional<qsim::NoiseModel> noise);

    [[nodiscard]] const qsim::Circuit& circuit() const noexcept { return circuit_; }
    [[nodiscard]] const qsim::Register& eigenvalue() const noexcept { return eigenvalue_; }
    [[nodiscard]] const qsim::Register& eigenvector() const noexcept { return eigenvector_; }
    [[nodiscard]] int n_bits() const noexcept { return eigenvalue_.width; }
    [[nodiscard]] int m_qubits() const noexcept { return eigenvector_.width; }
    [[nodiscard]] bool noisy() const noexcept { return noise_.has_value(); }
    [[nodiscard]] std::size_t native_entangling_count() const { return expanded_.entangling_count(); }

    /// |0...0> (x) b.
    [[nodiscard]] qsim::StateVector input(const ComplexVector& b) const;

    struct Readout {
        qsim::ShotHistogram histogram;  // eigenvector-register labels, accepted shots only
        std::uint64_t accepted = 0;
        double probability = 0.0;  // exact when noiseless, acceptance rate otherwise
    };

    /// Eigenvalue register read in z and post-selected on `target`; the
    /// eigenvector register read in `basis`. Noisy runs draw one shot per
    /// trajectory. Throws DegenerateProjectionError if nothing is accepted.
    [[nodiscard]] Readout projected_readout(const ComplexVector& b, const std::string& target,
                                            const qsim::BasisRotation& basis, std::uint64_t shots,
                                            std::uint64_t seed, const std::string& label) const;

    /// Final state from |0...0> (x) b: exact when noiseless, one trajectory otherwise.
    [[nodiscard]] qsim::StateVector final_state(const ComplexVector& b, Rng& rng) const;

private:
    qsim::Circuit circuit_;
    qsim::Circuit expanded_;
    qsim::Register eigenvalue_;
    qsim::Register eigenvector_;
    std::optional<qsim::NoiseModel> noise_;
};

/// Frequencies of all 2^width labels of a histogram.
std::vector<double> frequencies(const qsim::ShotHistogram& h, int width);

}  // namespace qhjm::qpca::detail
