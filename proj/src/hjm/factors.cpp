// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>

#include "qhjm/error.hpp"
#include "qhjm/hjm.hpp"

namespace qhjm::hjm {

namespace {

constexpr double kPsdTol = 1e-12;

double psd_tolerance(const RealMatrix& c) { return kPsdTol * std::max(1.0, c.norm()); }

void flip_to_nonnegative_sum(Eigen::Ref<Eigen::VectorXd> v) {
    if (v.sum() < 0.0) v = -v;
}

}  // namespace

void CovarianceMatrix::validate() const {
    const auto m = static_cast<Eigen::Index>(grid.size());
    if (c.rows() != m || c.cols() != m)
        throw ValidationError("covariance: matrix shape does not match the maturity grid");
    if (!c.allFinite()) throw ValidationError("covariance: non-finite entry");
    const double tol = psd_tolerance(c);
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > tol) throw ValidationError("covariance: not symmetric");
    if (c.diagonal().minCoeff() < -tol) throw ValidationError("covariance: negative variance");
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(c, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw ValidationError("covariance: not positive semidefinite");
}

CovarianceMatrix estimate_covariance(const std::vector<ForwardCurve>& history, double annualization) {
    if (!(annualization > 0.0) || !std::isfinite(annualization))
        throw ValidationError("estimate_covariance: annualization must be positive");
    if (history.size() < 3)
        throw ValidationError("estimate_covariance: need at least 3 observations (2 changes), got " +
                              std::to_string(history.size()));
    for (const auto& h : history) h.validate();
    const auto& mats = history.front().maturities;
    for (const auto& h : history)
        if (h.maturities != mats) throw ValidationError("estimate_covariance: observations use different grids");

    const auto m = static_cast<Eigen::Index>(mats.size());
    const auto n = static_cast<Eigen::Index>(history.size() - 1);
    RealMatrix d(n, m);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < m; ++j)
            d(k, j) = history[static_cast<std::size_t>(k + 1)].rates[static_cast<std::size_t>(j)] -
                      history[static_cast<std::size_t>(k)].rates[static_cast<std::size_t>(j)];
    d.rowwise() -= d.colwise().mean();
    RealMatrix c = annualization * (d.transpose() * d) / static_cast<double>(n - 1);
    c = 0.5 * (c + c.transpose());
    CovarianceMatrix out{MaturityGrid(mats), c};
    out.validate();
    return out;
}

double VolatilityFactorSet::sigma(int i, double tau) const {
    if (i < 0 || i >= count()) throw ValidationError("factor index out of range");
    const auto& xs = grid.tenors();
    std::vector<double> ys(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) ys[j] = factors(i, static_cast<Eigen::Index>(j));
    return interpolate(xs, ys, tau);
}

RealMatrix VolatilityFactorSet::reconstruct() const { return factors.transpose() * factors; }

VolatilityFactorSet make_factors(const MaturityGrid& grid, RealMatrix rows) {
    if (grid.size() == 0) throw ValidationError("factors: empty grid");
    if (rows.cols() != static_cast<Eigen::Index>(grid.size()))
        throw ValidationError("factors: row length does not match the maturity grid");
    if (!rows.allFinite()) throw ValidationError("factors: non-finite entry");
    VolatilityFactorSet f;
    f.grid = grid;
    f.factors = std::move(rows);
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(f.reconstruct(), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues().reverse();
    f.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    f.explained_variance = 1.0;
    f.provenance = "specified";
    return f;
}

VolatilityFactorSet extract_factors(const CovarianceMatrix& cov, int r) {
    cov.validate();
    const auto m = static_cast<int>(cov.grid.size());
    if (r < 1 || r > m)
        throw ValidationError("extract_factors: r must lie in [1, " + std::to_string(m) + "], got " + std::to_string(r));

    const auto spec = linalg::eigh(linalg::HermitianMatrix(cov.c));
    const double tol = psd_tolerance(cov.c);
    std::vector<double> lambda(static_cast<std::size_t>(m));
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        const double l = spec.eigenvalues(i);
        if (l < -tol) throw ValidationError("extract_factors: negative eigenvalue " + std::to_string(l));
        lambda[static_cast<std::size_t>(i)] = std::max(l, 0.0);
        total += lambda[static_cast<std::size_t>(i)];
    }

    VolatilityFactorSet f;
    f.grid = cov.grid;
    f.factors.resize(r, m);
    double kept = 0.0;
    for (int i = 0; i < r; ++i) {
        Eigen::VectorXd v = spec.eigenvectors.col(i).real();
        v.normalize();
        flip_to_nonnegative_sum(v);
        f.factors.row(i) = std::sqrt(lambda[static_cast<std::size_t>(i)]) * v.transpose();
        kept += lambda[static_cast<std::size_t>(i)];
    }
    f.eigenvalues = lambda;
    f.explained_variance = total > 0.0 ? kept / total : 1.0;
    f.provenance = "classical";
    return f;
}

QuantumFactorResult quantum_extract_factors(const CovarianceMatrix& cov, int r, const qpca::QpcaConfig& cfg) {
    cov.validate();
    if (r != 1) throw ValidationError("quantum_extract_factors: only the leading factor (r = 1) is supported");
    const auto m = static_cast<Eigen::Index>(cov.grid.size());
    const double tr = cov.c.trace();
    if (!(tr > 0.0)) throw ValidationError("quantum_extract_factors: covariance trace must be positive");

    const linalg::ComplexMatrix padded = linalg::zero_pad_pow2(cov.c.cast<linalg::cplx>());
    const auto rho = linalg::normalize_to_density(linalg::HermitianMatrix(padded));

    QuantumFactorResult out;
    out.run = qpca::run_qpca(rho, cfg);
    if (out.run.ambiguity && !out.run.ambiguity->single_component)
        throw AmbiguityError("quantum_extract_factors: random starts disagree (K > 1); " +
                             out.run.ambiguity->recommendation);

    const double lambda = out.run.refinement.eigenvalue * tr;
    const linalg::ComplexVector u = out.run.eigenvector.vector.head(m);
    // Rotate by the global phase that makes the vector as real as possible.
    const linalg::cplx s = u.cwiseProduct(u).sum();
    const linalg::cplx phase = std::abs(s) > 0.0 ? std::polar(1.0, -0.5 * std::arg(s)) : linalg::cplx(1.0);
    Eigen::VectorXd v = (phase * u).real();
    const double norm = v.norm();
    if (!(norm > 0.0)) throw NumericalError("quantum_extract_factors: recovered vector vanishes on the original grid");
    v /= norm;
    flip_to_nonnegative_sum(v);

    auto& f = out.factors;
    f.grid = cov.grid;
    f.factors = std::sqrt(lambda) * v.transpose();
    f.eigenvalues = {lambda};
    f.explained_variance = lambda / tr;
    f.provenance = "quantum";
    f.uncertainty.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j)
        f.uncertainty[static_cast<std::size_t>(j)] =
            std::sqrt(lambda) * out.run.eigenvector.uncertainty[static_cast<std::size_t>(j)] / norm;
    return out;
}

double drift(const VolatilityFactorSet& factors, double tau) {
    if (!std::isfinite(tau) || tau < 0.0) throw ValidationError("drift: tau must be nonnegative");
    if (factors.count() == 0) return 0.0;
    if (tau > factors.grid.back() * (1.0 + 1e-12))
        throw ValidationError("drift: tau " + std::to_string(tau) + " beyond the last tenor " +
                              std::to_string(factors.grid.back()));
    const auto& xs = factors.grid.tenors();
    std::vector<double> ys(xs.size());
    double a = 0.0;
    for (int i = 0; i < factors.count(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) ys[j] = factors.factors(i, static_cast<Eigen::Index>(j));
        a += interpolate(xs, ys, tau) * integrate(xs, ys, 0.0, tau);
    }
    return a;
}

}  // namespace qhjm::hjm
