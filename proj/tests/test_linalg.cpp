// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <numbers>
#include <random>

#include "qhjm/error.hpp"
#include "qhjm/fixtures.hpp"
#include "qhjm/linalg.hpp"
#include "support/oracles.hpp"

using namespace qhjm;
using namespace qhjm::linalg;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("eigh: rho2 spectrum matches the published decomposition") {
    const auto spec = eigh(fixtures::rho2().hermitian());
    CHECK(std::abs(spec.eigenvalues(0) - 0.8576) < 1e-4);
    CHECK(std::abs(spec.eigenvalues(1) - 0.1424) < 1e-4);
    CHECK(std::abs(spec.eigenvectors(0, 0) - cplx(0.8347)) < 1e-4);
    CHECK(std::abs(spec.eigenvectors(1, 0) - cplx(0.5508)) < 1e-4);
    CHECK(spec.degenerate_gaps.empty());
}

TEST_CASE("eigh: rho4 spectrum including the padding zero") {
    const auto spec = eigh(fixtures::rho4().hermitian());
    const double expected[] = {0.800, 0.169, 0.031, 0.000};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(spec.eigenvalues(k) - expected[k]) < 1e-3);
    const double u4[] = {0.669, 0.516, 0.536, 0.000};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(spec.eigenvectors(k, 0) - cplx(u4[k])) < 1e-3);
    // Zero eigenvalue is exact: the padding row and column vanish.
    CHECK(std::abs(spec.eigenvalues(3)) < 1e-15);
}

TEST_CASE("eigh: identity/2 is degenerate and flagged") {
    const auto spec = eigh(HermitianMatrix(RealMatrix(0.5 * RealMatrix::Identity(2, 2))));
    CHECK(spec.eigenvalues(0) == doctest::Approx(0.5));
    CHECK(spec.eigenvalues(1) == doctest::Approx(0.5));
    REQUIRE(spec.degenerate_gaps.size() == 1);
    CHECK(std::abs(spec.eigenvectors.col(0).dot(spec.eigenvectors.col(1))) < 1e-12);
}

TEST_CASE("eigh: rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.5, 0.4, 1.0;
    CHECK_THROWS_AS(HermitianMatrix{m}, ValidationError);
    ComplexMatrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(HermitianMatrix{rect}, ValidationError);
    ComplexMatrix nan = ComplexMatrix::Identity(2, 2);
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(HermitianMatrix{nan}, ValidationError);
}

TEST_CASE("eigh: property sweep on random Hermitian matrices against Eigen's solver") {
    std::mt19937_64 rng(20240517);
    for (int trial = 0; trial < 60; ++trial) {
        const int dim = 2 + trial % 7;
        const ComplexMatrix a = oracle::random_hermitian(dim, rng);
        const auto spec = eigh(HermitianMatrix(a));

        const double rec = (spec.reconstruct() - a).norm();
        CHECK(rec <= 1e-10 * a.norm());
        for (int i = 0; i < dim; ++i) {
            CHECK(std::abs(spec.eigenvectors.col(i).norm() - 1.0) < 1e-12);
            for (int j = i + 1; j < dim; ++j)
                CHECK(std::abs(spec.eigenvectors.col(i).dot(spec.eigenvectors.col(j))) < 1e-10);
        }
        for (int i = 0; i + 1 < dim; ++i) CHECK(spec.eigenvalues(i) >= spec.eigenvalues(i + 1));

        const auto ref = oracle::eig_desc(a);
        CHECK((spec.eigenvalues - ref.values).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + a.norm()));

        // Phase convention: largest component real and nonnegative.
        for (int i = 0; i < dim; ++i) {
            Eigen::Index piv = 0;
            spec.eigenvectors.col(i).cwiseAbs().maxCoeff(&piv);
            CHECK(std::abs(spec.eigenvectors(piv, i).imag()) < 1e-12);
            CHECK(spec.eigenvectors(piv, i).real() >= 0.0);
        }
    }
}

TEST_CASE("normalize_to_density: paper fixtures and scaling") {
    const auto rho2 = normalize_to_density(HermitianMatrix(fixtures::sigma2()));
    CHECK(std::abs(rho2.matrix()(0, 0).real() - 0.6407) < 1e-4);
    CHECK(std::abs(rho2.matrix()(0, 1).real() - 0.3288) < 1e-4);
    CHECK(std::abs(rho2.matrix()(1, 1).real() - 0.3593) < 1e-4);

    const auto rho4 = normalize_to_density(HermitianMatrix(fixtures::sigma4()));
    CHECK(std::abs(rho4.matrix()(0, 0).real() - 0.4489) < 1e-4);
    CHECK(std::abs(rho4.matrix().trace().real() - 1.0) < 1e-12);

    const auto half = normalize_to_density(HermitianMatrix(RealMatrix(2.0 * RealMatrix::Identity(2, 2))));
    CHECK((half.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("normalize_to_density: rejects bad inputs") {
    CHECK_THROWS_AS(normalize_to_density(HermitianMatrix(RealMatrix(RealMatrix::Zero(2, 2)))), ValidationError);
    CHECK_THROWS_AS(normalize_to_density(HermitianMatrix(RealMatrix(-RealMatrix::Identity(2, 2)))), ValidationError);
    RealMatrix indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(normalize_to_density(HermitianMatrix(indefinite)), ValidationError);
}

TEST_CASE("normalize_to_density preserves the leading eigenvector") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 2 + trial % 4;
        ComplexMatrix g = oracle::random_hermitian(dim, rng);
        const ComplexMatrix c = g * g.adjoint();
        const auto a = eigh(HermitianMatrix(c));
        const auto b = eigh(normalize_to_density(HermitianMatrix(c)).hermitian());
        CHECK(fidelity(a.vector(0), b.vector(0)) > 1.0 - 1e-10);
    }
}

TEST_CASE("expm_unitary: published U for rho2 and rho4") {
    const ComplexMatrix u2 = expm_unitary(fixtures::rho2().hermitian(), kTwoPi);
    ComplexMatrix expected(2, 2);
    expected << cplx(0.6260, -0.3068), cplx(0.0, -0.7170), cplx(0.0, -0.7170), cplx(0.6260, 0.3068);
    CHECK((u2 - expected).cwiseAbs().maxCoeff() < 1e-3);
    CHECK(is_unitary(u2, 1e-10));

    const ComplexMatrix u4 = expm_unitary(fixtures::rho4().hermitian(), kTwoPi);
    CHECK(std::abs(u4(0, 0) - cplx(0.415, 0.048)) < 1e-3);
    CHECK(std::abs(u4(1, 2) - cplx(-0.285, -0.181)) < 1e-3);
    CHECK(std::abs(u4(3, 3) - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("expm_unitary: identity at t = 0, group law, inverse, Pade agreement") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 2 + trial % 5;
        const HermitianMatrix h(oracle::random_hermitian(dim, rng));
        const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
        CHECK((expm_unitary(h, 0.0) - id).cwiseAbs().maxCoeff() < 1e-12);
        const double t1 = 0.3 + 0.1 * trial, t2 = -1.7 + 0.05 * trial;
        CHECK((expm_unitary(h, t1) * expm_unitary(h, -t1) - id).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((expm_unitary(h, t1 + t2) - expm_unitary(h, t1) * expm_unitary(h, t2)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((expm_unitary(h, t1) - oracle::expm_i(h.matrix(), t1)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("zero_pad_pow2 and fix_phase helpers") {
    const ComplexMatrix padded = zero_pad_pow2(fixtures::sigma3().cast<cplx>());
    CHECK(padded.rows() == 4);
    CHECK(padded.row(3).norm() == 0.0);
    CHECK(zero_pad_pow2(ComplexMatrix::Identity(4, 4)).rows() == 4);

    ComplexVector v(3);
    v << cplx(0, 0), cplx(0, 2), cplx(1, 0);
    const ComplexVector f = fix_phase_first_nonzero(v);
    CHECK(f(1) == cplx(2.0, 0.0));
    CHECK(std::abs(f(2) - cplx(0, -1)) < 1e-15);
}
