// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qhjm/qsim/state.hpp"

namespace qhjm::qsim {

struct Hadamard {
    int qubit;
};

struct SingleQubitUnitary {
    int qubit;
    Eigen::Matrix2cd u;
    std::string label;
};

/// Applies u to `targets` (first target most significant) when `control` is 1.
struct ControlledUnitary {
    int control;
    std::vector<int> targets;
    ComplexMatrix u;
    std::string label;
};

/// Controlled R_k = diag(1, e^{2 pi i / 2^k}); adjoint flips the sign.
struct ControlledPhase {
    int control;
    int target;
    int k;
    bool adjoint;
};

struct Cnot {
    int control;
    int target;
};

struct Swap {
    int a;
    int b;
};

using GateOp = std::variant<Hadamard, SingleQubitUnitary, ControlledUnitary, ControlledPhase, Cnot, Swap>;

std::vector<int> qubits_of(const GateOp& g);
std::string kind_of(const GateOp& g);
/// Touches two or more qubits.
bool is_entangling(const GateOp& g);
/// Matrix acting on qubits_of(g), first listed qubit most significant.
ComplexMatrix matrix_of(const GateOp& g);
GateOp adjoint_of(const GateOp& g);

Eigen::Matrix2cd hadamard_matrix();
Eigen::Matrix2cd rz_matrix(double theta);
Eigen::Matrix2cd ry_matrix(double theta);
Eigen::Matrix2cd phase_matrix(double phi);  // diag(1, e^{i phi})
Eigen::Matrix2cd pauli_matrix(int which);   // 0=I, 1=X, 2=Y, 3=Z

/// Ordered gate list over n qubits with named registers.
class Circuit {
public:
    explicit Circuit(int n_qubits);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const std::vector<GateOp>& gates() const noexcept { return gates_; }
    [[nodiscard]] const std::map<std::string, Register>& registers() const noexcept { return registers_; }
    [[nodiscard]] const Register& reg(const std::string& name) const;

    /// Validates qubit indices and unitary payloads.
    Circuit& add(GateOp g);
    /// Registers must be disjoint and in range.
    Circuit& add_register(const std::string& name, Register r);
    /// Appends `fragment` with its qubit q mapped to q + offset.
    Circuit& append(const Circuit& fragment, int offset = 0);

    [[nodiscard]] Circuit adjoint() const;
    [[nodiscard]] std::size_t entangling_count() const;
    [[nodiscard]] std::size_t size() const noexcept { return gates_.size(); }

    /// One line per gate: `GATE kind q0,q1,... [matrix]`.
    [[nodiscard]] std::string dump() const;

private:
    int n_qubits_;
    std::vector<GateOp> gates_;
    std::map<std::string, Register> registers_;
};

GateOp remap(const GateOp& g, int offset);

/// Inverse QFT on `width` qubits, qubit 0 ending in the most significant bit.
/// Expects qubit j to carry phase 2^j * phi (qubit 0 holds phi itself); no
/// swaps are needed in that layout.
Circuit inverse_qft(int width);

/// Unitary of the whole circuit (dimension 2^n). For tests and synthesis checks.
ComplexMatrix circuit_unitary(const Circuit& c);

}  // namespace qhjm::qsim
