// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "qhjm/qsim/circuit.hpp"

namespace qhjm::qsim {

struct Synthesis {
    /// Circuit on 1 + n_targets qubits; qubit 0 is the control, qubits
    /// 1..n_targets the targets (first target most significant). Contains
    /// only SingleQubitUnitary and Cnot gates.
    Circuit circuit;
    std::size_t entangling_count = 0;
};

/// Gate-level realization of the controlled version of U (dimension
/// 2^n_targets), exact including U's global phase.
///
/// One target: Z-Y-Z Euler angles and the A.X.B.X.C construction (two CNOTs)
/// plus a phase gate on the control. Several targets: cosine-sine split of U
/// on its leading target into two multiplexed blocks around a multiplexed
/// Ry; each block is demultiplexed into (smaller unitary, multiplexed Rz,
/// smaller unitary) and the smaller unitaries recurse. Multiplexed rotations
/// use the Gray-code layout with 2^controls CNOTs.
///
/// Throws ValidationError if U is not unitary or has the wrong dimension.
Synthesis decompose_controlled_unitary(const ComplexMatrix& u, int n_targets);

/// Z-Y-Z Euler decomposition: U = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta).
struct ZyzAngles {
    double alpha;
    double beta;
    double gamma;
    double delta;
};
ZyzAngles zyz_decompose(const Eigen::Matrix2cd& u);

/// Cosine-sine decomposition of an even-dimension unitary:
/// U = diag(L0, L1) * [[C, -S], [S, C]] * diag(R0, R1), C = diag(cos theta),
/// S = diag(sin theta), theta in [0, pi/2].
struct CosineSine {
    ComplexMatrix l0, l1, r0, r1;
    std::vector<double> theta;
};
CosineSine cosine_sine(const ComplexMatrix& u);

/// A0 (+) A1 = (I (x) V) (D (+) D^dagger) (I (x) W) with D diagonal unitary.
struct Demultiplexed {
    ComplexMatrix v, w;
    Eigen::VectorXcd d;
};
Demultiplexed demultiplex(const ComplexMatrix& a0, const ComplexMatrix& a1);

enum class RotationAxis { Y, Z };

/// Uniformly controlled rotation on `target`: for controls in state j (first
/// control most significant) applies R_axis(angles[j]). Appends to `out`.
void append_multiplexed_rotation(Circuit& out, RotationAxis axis, const std::vector<int>& controls, int target,
                                 const std::vector<double>& angles);

}  // namespace qhjm::qsim
