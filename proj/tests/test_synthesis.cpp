// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <numbers>
#include <random>

#include "qhjm/error.hpp"
#include "qhjm/fixtures.hpp"
#include "qhjm/qsim/synthesis.hpp"
#include "support/oracles.hpp"

using namespace qhjm;
using namespace qhjm::qsim;

namespace {

// Block-diagonal I (+) U on 1 + n qubits with the control most significant.
ComplexMatrix controlled(const ComplexMatrix& u) {
    const auto d = u.rows();
    ComplexMatrix full = ComplexMatrix::Identity(2 * d, 2 * d);
    full.bottomRightCorner(d, d) = u;
    return full;
}

double reconstruction_error(const ComplexMatrix& u, int n_targets) {
    const auto syn = decompose_controlled_unitary(u, n_targets);
    return (circuit_unitary(syn.circuit) - controlled(u)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("ZYZ angles reproduce the input including its phase") {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Matrix2cd u = oracle::random_unitary(2, gen);
        const auto [a, b, g, d] = zyz_decompose(u);
        const Eigen::Matrix2cd rec = std::exp(cplx(0.0, a)) * rz_matrix(b) * ry_matrix(g) * rz_matrix(d);
        CHECK((rec - u).cwiseAbs().maxCoeff() < 1e-12);
    }
    // Diagonal and anti-diagonal edge cases.
    const Eigen::Matrix2cd x = pauli_matrix(1), z = pauli_matrix(3);
    for (const Eigen::Matrix2cd& u : {x, z}) {
        const auto [a, b, g, d] = zyz_decompose(u);
        const Eigen::Matrix2cd rec = std::exp(cplx(0.0, a)) * rz_matrix(b) * ry_matrix(g) * rz_matrix(d);
        CHECK((rec - u).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("cosine-sine and demultiplex factorizations reconstruct their inputs") {
    std::mt19937_64 gen(2);
    for (int dim : {2, 4, 8}) {
        const ComplexMatrix u = oracle::random_unitary(dim, gen);
        const auto cs = cosine_sine(u);
        const auto h = dim / 2;
        ComplexMatrix l = ComplexMatrix::Zero(dim, dim), r = l, m = l;
        l.topLeftCorner(h, h) = cs.l0;
        l.bottomRightCorner(h, h) = cs.l1;
        r.topLeftCorner(h, h) = cs.r0;
        r.bottomRightCorner(h, h) = cs.r1;
        for (int j = 0; j < h; ++j) {
            const double c = std::cos(cs.theta[static_cast<std::size_t>(j)]);
            const double s = std::sin(cs.theta[static_cast<std::size_t>(j)]);
            m(j, j) = c;
            m(h + j, h + j) = c;
            m(j, h + j) = -s;
            m(h + j, j) = s;
        }
        CHECK((l * m * r - u).cwiseAbs().maxCoeff() < 1e-10);

        const ComplexMatrix a0 = oracle::random_unitary(h, gen), a1 = oracle::random_unitary(h, gen);
        const auto dm = demultiplex(a0, a1);
        const ComplexMatrix d = dm.d.asDiagonal();
        CHECK((dm.v * d * dm.w - a0).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((dm.v * d.adjoint() * dm.w - a1).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("cosine-sine handles block-diagonal and block-antidiagonal inputs") {
    std::mt19937_64 gen(8);
    ComplexMatrix blockdiag = ComplexMatrix::Zero(4, 4);
    blockdiag.topLeftCorner(2, 2) = oracle::random_unitary(2, gen);
    blockdiag.bottomRightCorner(2, 2) = oracle::random_unitary(2, gen);
    ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
    swap.topRightCorner(2, 2) = oracle::random_unitary(2, gen);
    swap.bottomLeftCorner(2, 2) = oracle::random_unitary(2, gen);
    CHECK(reconstruction_error(blockdiag, 2) < 1e-8);
    CHECK(reconstruction_error(swap, 2) < 1e-8);
    CHECK(reconstruction_error(ComplexMatrix::Identity(4, 4), 2) < 1e-12);
}

TEST_CASE("controlled-U synthesis reconstructs random unitaries") {
    std::mt19937_64 gen(20240601);
    for (int trial = 0; trial < 20; ++trial) {
        CHECK(reconstruction_error(oracle::random_unitary(2, gen), 1) < 1e-8);
        CHECK(reconstruction_error(oracle::random_unitary(4, gen), 2) < 1e-8);
    }
    CHECK(reconstruction_error(oracle::random_unitary(8, gen), 3) < 1e-8);
}

TEST_CASE("controlled single-qubit gates use two CNOTs; controlled phase is exact") {
    std::mt19937_64 gen(5);
    CHECK(decompose_controlled_unitary(oracle::random_unitary(2, gen), 1).entangling_count == 2);
    for (int k = 1; k <= 4; ++k) {
        const Eigen::Matrix2cd p = phase_matrix(-2.0 * std::numbers::pi / std::ldexp(1.0, k));
        const auto syn = decompose_controlled_unitary(p, 1);
        CHECK(syn.entangling_count <= 2);
        CHECK((circuit_unitary(syn.circuit) - controlled(p)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("rho4 controlled stages are not trivially compressible") {
    const auto rho = fixtures::rho4();
    for (int k = 0; k < 2; ++k) {
        const ComplexMatrix u = linalg::expm_unitary(rho.hermitian(), 2.0 * std::numbers::pi * std::ldexp(1.0, k));
        const auto syn = decompose_controlled_unitary(u, 2);
        CHECK(syn.entangling_count >= 18);
        CHECK((circuit_unitary(syn.circuit) - controlled(u)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("synthesis input validation") {
    CHECK_THROWS_AS(decompose_controlled_unitary(ComplexMatrix::Identity(3, 3), 2), ValidationError);
    CHECK_THROWS_AS(decompose_controlled_unitary(2.0 * ComplexMatrix::Identity(2, 2), 1), ValidationError);
    CHECK_THROWS_AS(decompose_controlled_unitary(ComplexMatrix::Identity(2, 2), 0), ValidationError);
}
