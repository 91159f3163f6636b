// SPDX-License-Identifier: Apache-2.0
#include "qhjm/qsim/synthesis.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qhjm/error.hpp"

namespace qhjm::qsim {

namespace {

constexpr double kPayloadTol = 1e-10;
constexpr double kTinyAngle = 1e-12;
constexpr double kNullColumn = 1e-9;

bool near_identity(const Eigen::Matrix2cd& u) {
    return (u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14;
}

void add_single(Circuit& out, int qubit, const Eigen::Matrix2cd& u, const char* label) {
    if (!near_identity(u)) out.add(SingleQubitUnitary{qubit, u, label});
}

// Controlled-U for 2x2 U: C, CX, B, CX, A on the target and a phase on the control.
void append_controlled_single(Circuit& out, int control, int target, const Eigen::Matrix2cd& u) {
    const auto [alpha, beta, gamma, delta] = zyz_decompose(u);
    const Eigen::Matrix2cd a = rz_matrix(beta) * ry_matrix(gamma / 2.0);
    const Eigen::Matrix2cd b = ry_matrix(-gamma / 2.0) * rz_matrix(-(delta + beta) / 2.0);
    const Eigen::Matrix2cd c = rz_matrix((delta - beta) / 2.0);
    add_single(out, target, c, "C");
    out.add(Cnot{control, target});
    add_single(out, target, b, "B");
    out.add(Cnot{control, target});
    add_single(out, target, a, "A");
    add_single(out, control, phase_matrix(alpha), "P");
}

// Controlled-U with U acting on `targets` (first most significant).
void append_controlled(Circuit& out, int control, const std::vector<int>& targets, const ComplexMatrix& u) {
    if (targets.size() == 1) {
        append_controlled_single(out, control, targets[0], u);
        return;
    }
    const int lead = targets[0];
    const std::vector<int> rest(targets.begin() + 1, targets.end());
    std::vector<int> mux_controls{control};
    mux_controls.insert(mux_controls.end(), rest.begin(), rest.end());
    const std::size_t half = std::size_t{1} << rest.size();

    const auto emit_block = [&](const ComplexMatrix& a0, const ComplexMatrix& a1) {
        const auto dm = demultiplex(a0, a1);
        append_controlled(out, control, rest, dm.w);
        std::vector<double> angles(2 * half, 0.0);
        for (std::size_t j = 0; j < half; ++j) angles[half + j] = -2.0 * std::arg(dm.d(static_cast<Eigen::Index>(j)));
        append_multiplexed_rotation(out, RotationAxis::Z, mux_controls, lead, angles);
        append_controlled(out, control, rest, dm.v);
    };

    const auto cs = cosine_sine(u);
    emit_block(cs.r0, cs.r1);
    std::vector<double> angles(2 * half, 0.0);
    for (std::size_t j = 0; j < half; ++j) angles[half + j] = 2.0 * cs.theta[j];
    append_multiplexed_rotation(out, RotationAxis::Y, mux_controls, lead, angles);
    emit_block(cs.l0, cs.l1);
}

}  // namespace

ZyzAngles zyz_decompose(const Eigen::Matrix2cd& u) {
    const double alpha = std::arg(u.determinant()) / 2.0;
    const Eigen::Matrix2cd v = std::exp(cplx(0.0, -alpha)) * u;
    const double gamma = 2.0 * std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
    const double sum = std::abs(v(1, 1)) > 1e-14 ? 2.0 * std::arg(v(1, 1)) : 0.0;   // beta + delta
    const double diff = std::abs(v(1, 0)) > 1e-14 ? 2.0 * std::arg(v(1, 0)) : 0.0;  // beta - delta
    return {alpha, (sum + diff) / 2.0, gamma, (sum - diff) / 2.0};
}

CosineSine cosine_sine(const ComplexMatrix& u) {
    if (u.rows() != u.cols() || u.rows() % 2 != 0) throw ValidationError("cosine_sine: need an even square matrix");
    const Eigen::Index n = u.rows() / 2;
    const ComplexMatrix u00 = u.topLeftCorner(n, n), u01 = u.topRightCorner(n, n);
    const ComplexMatrix u10 = u.bottomLeftCorner(n, n), u11 = u.bottomRightCorner(n, n);

    Eigen::JacobiSVD<ComplexMatrix> svd(u00, Eigen::ComputeFullU | Eigen::ComputeFullV);
    CosineSine cs;
    cs.l0 = svd.matrixU();
    cs.r0 = svd.matrixV().adjoint();
    Eigen::VectorXd c = svd.singularValues().cwiseMin(1.0);

    // U10 R0^H = L1 S: orthogonal columns with norms sin(theta).
    const ComplexMatrix m = u10 * cs.r0.adjoint();
    cs.l1 = ComplexMatrix::Zero(n, n);
    cs.theta.resize(static_cast<std::size_t>(n));
    std::vector<bool> filled(static_cast<std::size_t>(n), false);
    Eigen::VectorXd s(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double norm = m.col(j).norm();
        s(j) = norm;
        cs.theta[static_cast<std::size_t>(j)] = std::atan2(norm, c(j));
        if (norm > kNullColumn) {
            cs.l1.col(j) = m.col(j) / norm;
            filled[static_cast<std::size_t>(j)] = true;
        }
    }
    // Complete L1 to a unitary where sin(theta) vanishes.
    Eigen::Index probe = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (filled[static_cast<std::size_t>(j)]) continue;
        for (; probe < n; ++probe) {
            linalg::ComplexVector e = linalg::ComplexVector::Unit(n, probe);
            for (Eigen::Index k = 0; k < n; ++k)
                if (filled[static_cast<std::size_t>(k)]) e -= cs.l1.col(k) * cs.l1.col(k).dot(e);
            const double norm = e.norm();
            if (norm > 1e-6) {
                cs.l1.col(j) = e / norm;
                filled[static_cast<std::size_t>(j)] = true;
                ++probe;
                break;
            }
        }
        if (!filled[static_cast<std::size_t>(j)]) throw NumericalError("cosine_sine: could not complete L1");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double th = cs.theta[static_cast<std::size_t>(j)];
        c(j) = std::cos(th);
        s(j) = std::sin(th);
    }

    // Row j of R1 from U11 = L1 C R1 when cos dominates, else from U01 = -L0 S R1.
    const ComplexMatrix from_c = cs.l1.adjoint() * u11;
    const ComplexMatrix from_s = -(cs.l0.adjoint() * u01);
    cs.r1.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        cs.r1.row(j) = c(j) >= s(j) ? ComplexMatrix(from_c.row(j) / c(j)) : ComplexMatrix(from_s.row(j) / s(j));
    return cs;
}

Demultiplexed demultiplex(const ComplexMatrix& a0, const ComplexMatrix& a1) {
    const ComplexMatrix x = a0 * a1.adjoint();
    Eigen::ComplexSchur<ComplexMatrix> schur(x);
    if (schur.info() != Eigen::Success) throw NumericalError("demultiplex: Schur decomposition failed");
    Demultiplexed out;
    out.v = schur.matrixU();
    out.d = schur.matrixT().diagonal().array().sqrt();
    // Normal input: T is diagonal, so |d| = 1 up to rounding.
    out.d = out.d.array() / out.d.array().abs();
    out.w = out.d.asDiagonal() * out.v.adjoint() * a1;
    return out;
}

void append_multiplexed_rotation(Circuit& out, RotationAxis axis, const std::vector<int>& controls, int target,
                                 const std::vector<double>& angles) {
    const std::size_t k = controls.size();
    const std::size_t count = std::size_t{1} << k;
    if (angles.size() != count) throw ValidationError("multiplexed rotation: need 2^controls angles");
    bool trivial = true;
    for (double a : angles) trivial = trivial && std::abs(a) < kTinyAngle;
    if (trivial) return;

    const auto rot = [&](double a) { return axis == RotationAxis::Y ? ry_matrix(a) : rz_matrix(a); };
    if (k == 0) {
        add_single(out, target, rot(angles[0]), axis == RotationAxis::Y ? "Ry" : "Rz");
        return;
    }
    const auto gray = [](std::size_t i) { return i ^ (i >> 1U); };
    for (std::size_t i = 0; i < count; ++i) {
        double alpha = 0.0;
        for (std::size_t j = 0; j < count; ++j)
            alpha += (std::popcount(j & gray(i)) % 2 == 0 ? 1.0 : -1.0) * angles[j];
        alpha /= static_cast<double>(count);
        add_single(out, target, rot(alpha), axis == RotationAxis::Y ? "Ry" : "Rz");
        const std::size_t changed = gray(i) ^ gray((i + 1) % count);
        const auto bit = static_cast<std::size_t>(std::countr_zero(changed));
        out.add(Cnot{controls[k - 1 - bit], target});
    }
}

Synthesis decompose_controlled_unitary(const ComplexMatrix& u, int n_targets) {
    if (n_targets < 1 || n_targets > 8) throw ValidationError("decompose_controlled_unitary: target count out of range");
    if (u.rows() != (Eigen::Index{1} << n_targets) || u.cols() != u.rows()) {
        std::ostringstream os;
        os << "decompose_controlled_unitary: " << u.rows() << "x" << u.cols() << " matrix for " << n_targets << " targets";
        throw ValidationError(os.str());
    }
    if (!u.allFinite() || !linalg::is_unitary(u, kPayloadTol))
        throw ValidationError("decompose_controlled_unitary: input is not unitary");

    Synthesis out{Circuit(n_targets + 1), 0};
    std::vector<int> targets(static_cast<std::size_t>(n_targets));
    for (int t = 0; t < n_targets; ++t) targets[static_cast<std::size_t>(t)] = t + 1;
    append_controlled(out.circuit, 0, targets, u);
    out.entangling_count = out.circuit.entangling_count();
    return out;
}

}  // namespace qhjm::qsim
