// SPDX-License-Identifier: Apache-2.0
//
// Phase-estimation principal component analysis of a density matrix:
// filter the eigenvector register through an n-bit eigenvalue register,
// iterate measured magnitudes to a fixed point, recover relative phases from
// rotated-basis readouts and refine the eigenvalue by phase estimation.
#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qhjm/linalg.hpp"
#include "qhjm/qsim/circuit.hpp"
#include "qhjm/qsim/simulator.hpp"

namespace qhjm::qpca {

using linalg::ComplexVector;
using linalg::DensityMatrix;

struct QpcaConfig {
    int n_bits = 2;
    double evolution_time = 2.0 * std::numbers::pi;
    int max_iterations = 10;
    std::uint64_t shots = 8192;
    /// Stop when fidelity(b_k, b_{k-1}) >= 1 - convergence_tol.
    double convergence_tol = 0.01;
    std::optional<std::string> target_bitstring;
    std::optional<qsim::NoiseModel> noise;
    std::uint64_t seed = 0;
    /// Eigenvalue-register width for the refinement step; 0 reuses n_bits.
    int refine_bits = 0;

    void validate() const;
    [[nodiscard]] int effective_refine_bits() const noexcept { return refine_bits > 0 ? refine_bits : n_bits; }
};

/// r-basis used alongside x and y during phase recovery.
struct RBasisAngles {
    double alpha = 1.00;
    double beta = 0.80;
    double gamma = 0.16;
};
Eigen::Matrix2cd r_basis(const RBasisAngles& a = {});

/// Hadamards on the eigenvalue register (qubits 0..n-1), controlled
/// e^{i t rho 2^k} from qubit k onto the eigenvector register for
/// k = n-1 ... 0, then the inverse QFT. Registers "eigenvalue" and
/// "eigenvector" are attached.
qsim::Circuit build_qpca_circuit(const DensityMatrix& rho, int n_bits, double evolution_time);
qsim::Circuit build_qpca_circuit(const DensityMatrix& rho, const QpcaConfig& cfg);

/// n-bit string whose value sum y_k 2^-k is circularly closest to lambda.
std::string nearest_bitstring(double lambda, int n_bits);

/// Register value 0.y1y2...yn.
double bitstring_value(const std::string& bits);

/// Eigenvalue implied by a register value: value * 2 pi / t. A zero reading
/// is taken as the wrapped top of the range when 2 pi / t <= 1, since a
/// trace-one spectrum lies in [0, 1].
double decode_eigenvalue(double value, double evolution_time);

struct IterationRecord {
    int index = 0;  // 1-based
    ComplexVector input;
    std::vector<double> magnitudes;
    std::vector<double> magnitude_sigma;
    double projection_probability = 0.0;
    std::uint64_t accepted_shots = 0;
    /// fidelity(b_k, b_{k-1}) with b_k the magnitudes measured here.
    double fidelity_to_previous = 0.0;
    std::optional<double> oracle_fidelity;
    qsim::ShotHistogram histogram;
};

struct IterationTrace {
    std::string target;
    std::vector<IterationRecord> iterations;
    bool converged = false;

    [[nodiscard]] ComplexVector final_state() const;
};

/// Fixed-point iteration from b0. Uses cfg.target_bitstring, which must be set.
/// Throws DegenerateProjectionError when the target outcome never occurs.
IterationTrace qpca_iterate(const DensityMatrix& rho, const ComplexVector& b0, const QpcaConfig& cfg);

struct PhaseEstimate {
    /// Unit vector; first coefficient with nonzero measured weight real >= 0.
    ComplexVector vector;
    /// Same state with the global phase chosen so the phases of the nonzero
    /// coefficients average to zero.
    ComplexVector split_phase;
    std::vector<double> uncertainty;  // per coefficient, absolute
    std::vector<double> phase_sigma;  // radians, relative to the reference coefficient
    /// Some phase is uncertain by more than kPhaseResolutionLimit or unreachable.
    bool phase_resolution_flag = false;
    /// Largest disagreement between the r-basis reading and the x/y estimate.
    double consistency_residual = 0.0;
    double projection_probability = 0.0;
    std::vector<qsim::ShotHistogram> histograms;
};

inline constexpr double kPhaseResolutionLimit = 0.5;

/// Re-runs the projected circuit from `b` and reads the eigenvector register
/// in z, then in x, y and r on one qubit at a time with the rest in z.
PhaseEstimate recover_phases(const DensityMatrix& rho, const ComplexVector& b, const QpcaConfig& cfg,
                             const RBasisAngles& r = {});

struct QpeRefinement {
    std::string bitstring;
    double value = 0.0;       // 0.b1b2...bn
    double eigenvalue = 0.0;  // decode_eigenvalue(value, t)
    double modal_probability = 0.0;
    /// Fidelity between the input and the eigenvector register post-selected
    /// on the modal outcome (trajectory-averaged under noise).
    double fidelity = 0.0;
    std::vector<double> distribution;  // eigenvalue register
    double tv_to_uniform = 0.0;
    std::size_t entangling_count = 0;
    qsim::ShotHistogram histogram;
};

QpeRefinement qpe_refine(const DensityMatrix& rho, const ComplexVector& u, int n_bits, const QpcaConfig& cfg);

struct AmbiguityReport {
    std::uint64_t seed_b = 0;
    std::uint64_t seed_c = 0;
    ComplexVector start_b, start_c;
    ComplexVector final_b, final_c;
    /// 1 - fidelity between a start's magnitudes and its first filtered magnitudes.
    double shift_b = 0.0;
    double shift_c = 0.0;
    double cross_fidelity = 0.0;
    bool single_component = false;  // K = 1
    std::string recommendation;
};

inline constexpr double kAmbiguityFidelity = 0.98;

AmbiguityReport check_ambiguity(const DensityMatrix& rho, const QpcaConfig& cfg, std::uint64_t seed_b,
                                std::uint64_t seed_c);

/// Modal nonzero eigenvalue-register outcome over shots that each start from
/// a fresh Haar-random state, among outcomes whose decoded eigenvalue is
/// within half a bin of 1/N or above. All zeros if nothing qualifies.
std::string calibrate_target(const DensityMatrix& rho, const QpcaConfig& cfg);

struct OracleComparison {
    double eigenvalue = 0.0;
    ComplexVector eigenvector;
    double fidelity = 0.0;
    std::string nearest_bitstring;
};

struct RunOptions {
    std::optional<ComplexVector> b0;  // default: uniform superposition
    bool check_ambiguity = true;
    bool with_oracle = true;
};

struct QpcaResult {
    std::string target;
    bool target_calibrated = false;
    IterationTrace trace;
    PhaseEstimate eigenvector;
    QpeRefinement refinement;
    std::optional<AmbiguityReport> ambiguity;
    std::optional<OracleComparison> oracle;
    std::size_t circuit_entangling_count = 0;
};

QpcaResult run_qpca(const DensityMatrix& rho, const QpcaConfig& cfg, const RunOptions& opts = {});

}  // namespace qhjm::qpca
