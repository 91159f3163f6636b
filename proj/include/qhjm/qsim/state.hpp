// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "qhjm/linalg.hpp"
#include "qhjm/random.hpp"

namespace qhjm::qsim {

using linalg::ComplexMatrix;
using linalg::ComplexVector;
using linalg::cplx;

inline constexpr double kNormTol = 1e-10;

/// Contiguous qubit range [first, first + width).
struct Register {
    int first = 0;
    int width = 0;

    [[nodiscard]] int end() const noexcept { return first + width; }
    [[nodiscard]] bool contains(int q) const noexcept { return q >= first && q < end(); }
    friend bool operator==(const Register&, const Register&) = default;
};

/// Normalized amplitude vector over n qubits. Qubit 0 is the most
/// significant bit of the basis index.
class StateVector {
public:
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits);
    /// Takes amplitudes of length 2^n; norm must be 1 within kNormTol.
    explicit StateVector(ComplexVector amplitudes);

    /// Rescales to unit norm; throws ValidationError on a zero vector.
    static StateVector normalized(ComplexVector amplitudes);
    static StateVector basis(int n_qubits, std::uint64_t index);
    static StateVector uniform(int n_qubits);
    /// Haar-random pure state.
    static StateVector haar_random(int n_qubits, Rng& rng);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return amps_.size(); }
    [[nodiscard]] const ComplexVector& amplitudes() const noexcept { return amps_; }
    /// Mutable access for the executor; callers keep the norm invariant.
    [[nodiscard]] ComplexVector& amplitudes_mut() noexcept { return amps_; }
    [[nodiscard]] cplx operator[](Eigen::Index i) const { return amps_(i); }
    [[nodiscard]] double norm() const { return amps_.norm(); }

    /// this (x) other, with this occupying the leading qubits.
    [[nodiscard]] StateVector tensor(const StateVector& other) const;

private:
    int n_qubits_;
    ComplexVector amps_;
};

double fidelity(const StateVector& a, const StateVector& b);

/// Bit q (0 = most significant) of a basis index over n qubits.
constexpr int bit_of(std::uint64_t index, int q, int n) noexcept {
    return static_cast<int>((index >> (n - 1 - q)) & 1U);
}

/// Bitstring label for the bits of `index` that fall in `reg`.
std::string register_label(std::uint64_t index, const Register& reg, int n_qubits);
/// Value of the register bits of `index`, first register qubit most significant.
std::uint64_t register_value(std::uint64_t index, const Register& reg, int n_qubits);
std::string to_bitstring(std::uint64_t value, int width);
/// Throws ValidationError unless s is a non-empty string of '0'/'1'.
std::uint64_t parse_bitstring(const std::string& s);

}  // namespace qhjm::qsim
