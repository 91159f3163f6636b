// SPDX-License-Identifier: Apache-2.0
#include "qhjm/qsim/state.hpp"

#include <cmath>
#include <sstream>

#include "qhjm/error.hpp"

namespace qhjm::qsim {

namespace {

int qubits_for_dim(Eigen::Index dim) {
    if (dim < 2) throw ValidationError("StateVector: need at least one qubit");
    int n = 0;
    Eigen::Index d = dim;
    while (d > 1) {
        if (d % 2 != 0) {
            std::ostringstream os;
            os << "StateVector: length " << dim << " is not a power of two";
            throw ValidationError(os.str());
        }
        d /= 2;
        ++n;
    }
    return n;
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 24) throw ValidationError("StateVector: qubit count out of range");
    amps_ = ComplexVector::Zero(Eigen::Index{1} << n_qubits);
    amps_(0) = 1.0;
}

StateVector::StateVector(ComplexVector amplitudes)
    : n_qubits_(qubits_for_dim(amplitudes.size())), amps_(std::move(amplitudes)) {
    if (!amps_.allFinite()) throw ValidationError("StateVector: non-finite amplitude");
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > kNormTol) {
        std::ostringstream os;
        os << "StateVector: norm " << norm << " is not 1";
        throw ValidationError(os.str());
    }
}

StateVector StateVector::normalized(ComplexVector amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("StateVector: cannot normalize");
    return StateVector(ComplexVector(amplitudes / norm));
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
    StateVector s(n_qubits);
    if (index >= static_cast<std::uint64_t>(s.dim())) throw ValidationError("StateVector: basis index out of range");
    s.amps_(0) = 0.0;
    s.amps_(static_cast<Eigen::Index>(index)) = 1.0;
    return s;
}

StateVector StateVector::uniform(int n_qubits) {
    StateVector s(n_qubits);
    s.amps_.setConstant(1.0 / std::sqrt(static_cast<double>(s.dim())));
    return s;
}

StateVector StateVector::haar_random(int n_qubits, Rng& rng) {
    std::normal_distribution<double> normal;
    ComplexVector v(Eigen::Index{1} << n_qubits);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(k) = cplx(re, im);
    }
    return normalized(std::move(v));
}

StateVector StateVector::tensor(const StateVector& other) const {
    ComplexVector out(dim() * other.dim());
    for (Eigen::Index i = 0; i < dim(); ++i)
        out.segment(i * other.dim(), other.dim()) = amps_(i) * other.amps_;
    return StateVector::normalized(std::move(out));
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw ValidationError("fidelity: dimension mismatch");
    return linalg::fidelity(a.amplitudes(), b.amplitudes());
}

std::uint64_t register_value(std::uint64_t index, const Register& reg, int n_qubits) {
    std::uint64_t v = 0;
    for (int q = reg.first; q < reg.end(); ++q)
        v = (v << 1U) | static_cast<std::uint64_t>(bit_of(index, q, n_qubits));
    return v;
}

std::string register_label(std::uint64_t index, const Register& reg, int n_qubits) {
    return to_bitstring(register_value(index, reg, n_qubits), reg.width);
}

std::string to_bitstring(std::uint64_t value, int width) {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int k = 0; k < width; ++k)
        if ((value >> (width - 1 - k)) & 1U) s[static_cast<std::size_t>(k)] = '1';
    return s;
}

std::uint64_t parse_bitstring(const std::string& s) {
    if (s.empty() || s.size() > 63) throw ValidationError("bitstring: bad length");
    std::uint64_t v = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw ValidationError("bitstring: '" + s + "' has non-binary characters");
        v = (v << 1U) | static_cast<std::uint64_t>(c == '1');
    }
    return v;
}

}  // namespace qhjm::qsim
