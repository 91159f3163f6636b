// SPDX-License-Identifier: Apache-2.0
#include "qhjm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qhjm/error.hpp"

namespace qhjm::linalg {

void require_square_finite(const ComplexMatrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
        throw ValidationError(os.str());
    }
    if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
    require_square_finite(m, "HermitianMatrix");
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kHermitianTol) {
        std::ostringstream os;
        os << "HermitianMatrix: max |A - A^H| entry is " << dev;
        throw ValidationError(os.str());
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix::HermitianMatrix(const RealMatrix& m)
    : HermitianMatrix(ComplexMatrix(m.cast<cplx>())) {}

ComplexMatrix SpectralDecomposition::reconstruct() const {
    return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Zeroes a(p,q) with the unitary R = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
// acting on columns p,q: A <- R^H A R, V <- V R.
void rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
    const cplx apq = a(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) return;
    const cplx phase = apq / mag;  // e^{i phi}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double tau = (aqq - app) / (2.0 * mag);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const cplx r_pp = c, r_pq = s;
    const cplx r_qp = -s * std::conj(phase), r_qq = c * std::conj(phase);

    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx akp = a(k, p), akq = a(k, q);
        a(k, p) = akp * r_pp + akq * r_qp;
        a(k, q) = akp * r_pq + akq * r_qq;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx apk = a(p, k), aqk = a(q, k);
        a(p, k) = std::conj(r_pp) * apk + std::conj(r_qp) * aqk;
        a(q, k) = std::conj(r_pq) * apk + std::conj(r_qq) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx vkp = v(k, p), vkq = v(k, q);
        v(k, p) = vkp * r_pp + vkq * r_qp;
        v(k, q) = vkp * r_pq + vkq * r_qq;
    }
}

}  // namespace

SpectralDecomposition eigh(const HermitianMatrix& h) {
    ComplexMatrix a = h.matrix();
    const Eigen::Index n = a.rows();
    ComplexMatrix v = ComplexMatrix::Identity(n, n);

    const double scale = a.norm();
    const double threshold = kJacobiOffNormTol * (scale > 0.0 ? scale : 1.0);

    int sweep = 0;
    while (off_diagonal_norm(a) > threshold) {
        if (sweep == kJacobiMaxSweeps) {
            std::ostringstream os;
            os << "eigh: off-diagonal norm " << off_diagonal_norm(a) << " after " << sweep
               << " sweeps";
            throw NumericalError(os.str());
        }
        for (Eigen::Index p = 0; p < n - 1; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
        ++sweep;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        return a(i, i).real() > a(j, j).real();
    });

    SpectralDecomposition out;
    out.sweeps = sweep;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = a(src, src).real();
        ComplexVector col = v.col(src);
        col.normalize();

        // Largest-magnitude component real nonnegative; ties go to the lowest index.
        const double max_mag = col.cwiseAbs().maxCoeff();
        Eigen::Index pivot = 0;
        while (std::abs(col(pivot)) < max_mag - 1e-12) ++pivot;
        col *= std::conj(col(pivot)) / std::abs(col(pivot));
        col(pivot) = std::abs(col(pivot));
        out.eigenvectors.col(k) = col;
    }
    for (Eigen::Index k = 0; k + 1 < n; ++k)
        if (out.eigenvalues(k) - out.eigenvalues(k + 1) < kDegeneracyGap)
            out.degenerate_gaps.push_back(k);
    return out;
}

DensityMatrix::DensityMatrix(const HermitianMatrix& h) : h_(h) {
    const double tr = h_.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream os;
        os << "DensityMatrix: trace " << tr << " differs from 1";
        throw ValidationError(os.str());
    }
    const auto spec = eigh(h_);
    if (spec.eigenvalues.minCoeff() < -kPsdTol) {
        std::ostringstream os;
        os << "DensityMatrix: negative eigenvalue " << spec.eigenvalues.minCoeff();
        throw ValidationError(os.str());
    }
}

DensityMatrix normalize_to_density(const HermitianMatrix& c) {
    const double tr = c.trace();
    if (!(tr > 0.0)) {
        std::ostringstream os;
        os << "normalize_to_density: trace " << tr << " is not positive";
        throw ValidationError(os.str());
    }
    ComplexMatrix scaled = c.matrix() / tr;
    // Pin the trace to exactly one; rounding in the division can leave ~1e-16.
    const double drift = scaled.diagonal().real().sum() - 1.0;
    scaled(0, 0) -= drift;
    return DensityMatrix(HermitianMatrix(scaled));
}

ComplexMatrix expm_unitary(const HermitianMatrix& h, double t) {
    const auto spec = eigh(h);
    ComplexVector phases(spec.eigenvalues.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k)
        phases(k) = std::exp(cplx(0.0, t * spec.eigenvalues(k)));
    return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

ComplexMatrix zero_pad_pow2(const ComplexMatrix& m) {
    Eigen::Index n = 1;
    while (n < m.rows()) n *= 2;
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    out.topLeftCorner(m.rows(), m.cols()) = m;
    return out;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <=
           tol;
}

double fidelity(const ComplexVector& a, const ComplexVector& b) {
    const double na = a.squaredNorm(), nb = b.squaredNorm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::norm(a.dot(b)) / (na * nb);
}

ComplexVector fix_phase_first_nonzero(const ComplexVector& v, double tol) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double mag = std::abs(v(k));
        if (mag > tol) {
            ComplexVector out = v * (std::conj(v(k)) / mag);
            out(k) = std::abs(out(k));
            return out;
        }
    }
    return v;
}

}  // namespace qhjm::linalg
