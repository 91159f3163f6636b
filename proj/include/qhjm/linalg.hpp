// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qhjm::linalg {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kDegeneracyGap = 1e-10;
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiOffNormTol = 1e-14;

/// Square complex matrix with finite entries.
void require_square_finite(const ComplexMatrix& m, const char* what);

/// A complex matrix that equals its conjugate transpose to within
/// kHermitianTol per entry. Stored exactly Hermitian (symmetrized).
class HermitianMatrix {
public:
    explicit HermitianMatrix(const ComplexMatrix& m);
    explicit HermitianMatrix(const RealMatrix& m);

    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return m_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return m_.rows(); }
    [[nodiscard]] double trace() const noexcept { return m_.diagonal().real().sum(); }

private:
    ComplexMatrix m_;
};

struct SpectralDecomposition {
    RealVector eigenvalues;      // descending
    ComplexMatrix eigenvectors;  // column i pairs with eigenvalues(i)
    /// Indices i where eigenvalues(i) - eigenvalues(i+1) < kDegeneracyGap.
    std::vector<Eigen::Index> degenerate_gaps;
    int sweeps = 0;

    [[nodiscard]] ComplexMatrix reconstruct() const;
    [[nodiscard]] ComplexVector vector(Eigen::Index i) const { return eigenvectors.col(i); }
};

/// Cyclic complex Jacobi eigensolver. Eigenvalues descending; each
/// eigenvector's largest-magnitude component is real and nonnegative.
/// Throws NumericalError if the off-diagonal norm does not fall below
/// kJacobiOffNormTol * ||A||_F within kJacobiMaxSweeps sweeps.
SpectralDecomposition eigh(const HermitianMatrix& a);

/// Trace-one positive semidefinite Hermitian matrix.
class DensityMatrix {
public:
    /// Validates trace and PSD; does not rescale.
    explicit DensityMatrix(const HermitianMatrix& h);

    [[nodiscard]] const HermitianMatrix& hermitian() const noexcept { return h_; }
    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return h_.matrix(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return h_.dim(); }

private:
    HermitianMatrix h_;
};

/// C / tr(C). Rejects non-positive trace and eigenvalues of C/tr(C)
/// below -kPsdTol.
DensityMatrix normalize_to_density(const HermitianMatrix& c);

/// e^{i t H} assembled from the spectral decomposition of H.
ComplexMatrix expm_unitary(const HermitianMatrix& h, double t);

/// Pads with zero rows/columns up to the next power of two.
ComplexMatrix zero_pad_pow2(const ComplexMatrix& m);

bool is_unitary(const ComplexMatrix& u, double tol = 1e-10);

/// |<a|b>|^2 / (|a|^2 |b|^2).
double fidelity(const ComplexVector& a, const ComplexVector& b);

/// Multiplies by a global phase so the first entry with magnitude above
/// tol becomes real and nonnegative.
ComplexVector fix_phase_first_nonzero(const ComplexVector& v, double tol = 1e-12);

}  // namespace qhjm::linalg
