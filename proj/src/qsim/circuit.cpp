// SPDX-License-Identifier: Apache-2.0
#include "qhjm/qsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "qhjm/error.hpp"
#include "qhjm/qsim/simulator.hpp"

namespace qhjm::qsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kUnitaryTol = 1e-10;

}  // namespace

Eigen::Matrix2cd hadamard_matrix() {
    const double s = 1.0 / std::numbers::sqrt2;
    Eigen::Matrix2cd h;
    h << s, s, s, -s;
    return h;
}

Eigen::Matrix2cd rz_matrix(double theta) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::exp(cplx(0.0, -theta / 2.0));
    m(1, 1) = std::exp(cplx(0.0, theta / 2.0));
    return m;
}

Eigen::Matrix2cd ry_matrix(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    Eigen::Matrix2cd m;
    m << c, -s, s, c;
    return m;
}

Eigen::Matrix2cd phase_matrix(double phi) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    m(1, 1) = std::exp(cplx(0.0, phi));
    return m;
}

Eigen::Matrix2cd pauli_matrix(int which) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    switch (which) {
        case 0: m = Eigen::Matrix2cd::Identity(); break;
        case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 2: m(0, 1) = cplx(0.0, -1.0); m(1, 0) = cplx(0.0, 1.0); break;
        case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        default: throw ValidationError("pauli_matrix: index out of range");
    }
    return m;
}

std::vector<int> qubits_of(const GateOp& g) {
    return std::visit(overloaded{
                          [](const Hadamard& h) { return std::vector<int>{h.qubit}; },
                          [](const SingleQubitUnitary& u) { return std::vector<int>{u.qubit}; },
                          [](const ControlledUnitary& cu) {
                              std::vector<int> q{cu.control};
                              q.insert(q.end(), cu.targets.begin(), cu.targets.end());
                              return q;
                          },
                          [](const ControlledPhase& cp) { return std::vector<int>{cp.control, cp.target}; },
                          [](const Cnot& c) { return std::vector<int>{c.control, c.target}; },
                          [](const Swap& s) { return std::vector<int>{s.a, s.b}; },
                      },
                      g);
}

std::string kind_of(const GateOp& g) {
    return std::visit(overloaded{
                          [](const Hadamard&) -> std::string { return "h"; },
                          [](const SingleQubitUnitary&) -> std::string { return "u1q"; },
                          [](const ControlledUnitary&) -> std::string { return "cu"; },
                          [](const ControlledPhase& cp) -> std::string {
                              return (cp.adjoint ? "crdg" : "cr") + std::to_string(cp.k);
                          },
                          [](const Cnot&) -> std::string { return "cx"; },
                          [](const Swap&) -> std::string { return "swap"; },
                      },
                      g);
}

bool is_entangling(const GateOp& g) { return qubits_of(g).size() >= 2; }

namespace {

double controlled_phase_angle(const ControlledPhase& cp) {
    const double a = 2.0 * std::numbers::pi / std::ldexp(1.0, cp.k);
    return cp.adjoint ? -a : a;
}

}  // namespace

ComplexMatrix matrix_of(const GateOp& g) {
    return std::visit(overloaded{
                          [](const Hadamard&) -> ComplexMatrix { return hadamard_matrix(); },
                          [](const SingleQubitUnitary& u) -> ComplexMatrix { return u.u; },
                          [](const ControlledUnitary& cu) -> ComplexMatrix {
                              const Eigen::Index d = cu.u.rows();
                              ComplexMatrix m = ComplexMatrix::Identity(2 * d, 2 * d);
                              m.bottomRightCorner(d, d) = cu.u;
                              return m;
                          },
                          [](const ControlledPhase& cp) -> ComplexMatrix {
                              ComplexMatrix m = ComplexMatrix::Identity(4, 4);
                              m(3, 3) = std::exp(cplx(0.0, controlled_phase_angle(cp)));
                              return m;
                          },
                          [](const Cnot&) -> ComplexMatrix {
                              ComplexMatrix m = ComplexMatrix::Zero(4, 4);
                              m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
                              return m;
                          },
                          [](const Swap&) -> ComplexMatrix {
                              ComplexMatrix m = ComplexMatrix::Zero(4, 4);
                              m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
                              return m;
                          },
                      },
                      g);
}

GateOp adjoint_of(const GateOp& g) {
    return std::visit(overloaded{
                          [](const Hadamard& h) -> GateOp { return h; },
                          [](const SingleQubitUnitary& u) -> GateOp {
                              return SingleQubitUnitary{u.qubit, u.u.adjoint(), u.label.empty() ? "" : u.label + "^dg"};
                          },
                          [](const ControlledUnitary& cu) -> GateOp {
                              return ControlledUnitary{cu.control, cu.targets, cu.u.adjoint(),
                                                       cu.label.empty() ? "" : cu.label + "^dg"};
                          },
                          [](const ControlledPhase& cp) -> GateOp {
                              return ControlledPhase{cp.control, cp.target, cp.k, !cp.adjoint};
                          },
                          [](const Cnot& c) -> GateOp { return c; },
                          [](const Swap& s) -> GateOp { return s; },
                      },
                      g);
}

GateOp remap(const GateOp& g, int offset) {
    return std::visit(overloaded{
                          [&](Hadamard h) -> GateOp { h.qubit += offset; return h; },
                          [&](SingleQubitUnitary u) -> GateOp { u.qubit += offset; return u; },
                          [&](ControlledUnitary cu) -> GateOp {
                              cu.control += offset;
                              for (int& t : cu.targets) t += offset;
                              return cu;
                          },
                          [&](ControlledPhase cp) -> GateOp {
                              cp.control += offset;
                              cp.target += offset;
                              return cp;
                          },
                          [&](Cnot c) -> GateOp {
                              c.control += offset;
                              c.target += offset;
                              return c;
                          },
                          [&](Swap s) -> GateOp {
                              s.a += offset;
                              s.b += offset;
                              return s;
                          },
                      },
                      g);
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 24) throw ValidationError("Circuit: qubit count out of range");
}

const Register& Circuit::reg(const std::string& name) const {
    const auto it = registers_.find(name);
    if (it == registers_.end()) throw ValidationError("Circuit: no register named '" + name + "'");
    return it->second;
}

Circuit& Circuit::add(GateOp g) {
    const auto qs = qubits_of(g);
    std::set<int> seen;
    for (int q : qs) {
        if (q < 0 || q >= n_qubits_) {
            std::ostringstream os;
            os << "Circuit: qubit " << q << " out of range for " << n_qubits_ << " qubits";
            throw ValidationError(os.str());
        }
        if (!seen.insert(q).second) throw ValidationError("Circuit: repeated qubit in " + kind_of(g));
    }
    if (const auto* cu = std::get_if<ControlledUnitary>(&g)) {
        if (cu->targets.empty()) throw ValidationError("Circuit: controlled unitary without targets");
        if (cu->u.rows() != (Eigen::Index{1} << cu->targets.size()))
            throw ValidationError("Circuit: controlled unitary size does not match target count");
        if (!linalg::is_unitary(cu->u, kUnitaryTol)) throw ValidationError("Circuit: controlled payload not unitary");
    } else if (const auto* u = std::get_if<SingleQubitUnitary>(&g)) {
        if (!linalg::is_unitary(u->u, kUnitaryTol)) throw ValidationError("Circuit: single-qubit payload not unitary");
    } else if (const auto* cp = std::get_if<ControlledPhase>(&g)) {
        if (cp->k < 1) throw ValidationError("Circuit: phase rotation needs k >= 1");
    }
    gates_.push_back(std::move(g));
    return *this;
}

Circuit& Circuit::add_register(const std::string& name, Register r) {
    if (r.width < 1 || r.first < 0 || r.end() > n_qubits_) throw ValidationError("Circuit: register '" + name + "' out of range");
    for (const auto& [other_name, other] : registers_) {
        if (other_name == name) throw ValidationError("Circuit: duplicate register '" + name + "'");
        if (r.first < other.end() && other.first < r.end())
            throw ValidationError("Circuit: register '" + name + "' overlaps '" + other_name + "'");
    }
    registers_.emplace(name, r);
    return *this;
}

Circuit& Circuit::append(const Circuit& fragment, int offset) {
    if (offset < 0 || offset + fragment.n_qubits() > n_qubits_) throw ValidationError("Circuit: fragment does not fit");
    for (const auto& g : fragment.gates()) add(remap(g, offset));
    return *this;
}

Circuit Circuit::adjoint() const {
    Circuit out(n_qubits_);
    out.registers_ = registers_;
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(adjoint_of(*it));
    return out;
}

std::size_t Circuit::entangling_count() const {
    return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), [](const GateOp& g) { return is_entangling(g); }));
}

std::string Circuit::dump() const {
    std::ostringstream os;
    os << std::setprecision(10);
    for (const auto& g : gates_) {
        os << "GATE " << kind_of(g) << ' ';
        const auto qs = qubits_of(g);
        for (std::size_t k = 0; k < qs.size(); ++k) os << (k ? "," : "") << qs[k];
        if (std::holds_alternative<SingleQubitUnitary>(g) || std::holds_alternative<ControlledUnitary>(g)) {
            const ComplexMatrix m = std::holds_alternative<SingleQubitUnitary>(g)
                                        ? ComplexMatrix(std::get<SingleQubitUnitary>(g).u)
                                        : std::get<ControlledUnitary>(g).u;
            os << " [";
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                if (i) os << "; ";
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    if (j) os << ' ';
                    os << m(i, j).real() << (m(i, j).imag() < 0 ? "-" : "+") << std::abs(m(i, j).imag()) << 'i';
                }
            }
            os << ']';
        }
        os << '\n';
    }
    return os.str();
}

Circuit inverse_qft(int width) {
    if (width < 1) throw ValidationError("inverse_qft: width must be >= 1");
    Circuit c(width);
    for (int j = width - 1; j >= 0; --j) {
        for (int m = width - 1; m > j; --m) c.add(ControlledPhase{m, j, m - j + 1, true});
        c.add(Hadamard{j});
    }
    return c;
}

ComplexMatrix circuit_unitary(const Circuit& c) {
    const Eigen::Index dim = Eigen::Index{1} << c.n_qubits();
    ComplexMatrix u(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        StateVector s = StateVector::basis(c.n_qubits(), static_cast<std::uint64_t>(col));
        for (const auto& g : c.gates()) apply_gate(s, g);
        u.col(col) = s.amplitudes();
    }
    return u;
}

}  // namespace qhjm::qsim
