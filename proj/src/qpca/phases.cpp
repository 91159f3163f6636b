// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <numbers>

#include "qhjm/error.hpp"
#include "readout.hpp"

namespace qhjm::qpca {

using linalg::cplx;

namespace {

// Interference term z = conj(a_i) a_j for basis states i, j differing only in
// one qubit, fitted from x, y and r readouts of that qubit.
struct Edge {
    std::size_t i = 0, j = 0;
    cplx z;
    double phase_sigma = 0.0;
    double residual = 0.0;
};

// P(qubit reads 0) - P(qubit reads 1) restricted to the pair (i, j), with its
// binomial standard error.
struct PairContrast {
    double value = 0.0;
    double sigma = 0.0;
};

PairContrast contrast(const std::vector<double>& freq, std::size_t i, std::size_t j, std::uint64_t n) {
    const double d = freq[i] - freq[j];
    const double s = freq[i] + freq[j];
    return {d, std::sqrt(std::max(s - d * d, 0.0) / static_cast<double>(n))};
}

// Least squares for (Re z, Im z) from Re z = X/2, Im z = Y/2 and
// cos(beta) Re z + sin(beta) Im z = R, all rows weighted equally.
Edge fit_edge(std::size_t i, std::size_t j, const PairContrast& x, const PairContrast& y, double r_value, double r_sigma,
              double beta) {
    const double c = std::cos(beta), s = std::sin(beta);
    Eigen::Matrix<double, 3, 2> a;
    a << 1.0, 0.0, 0.0, 1.0, c, s;
    const Eigen::Vector3d rhs(x.value / 2.0, y.value / 2.0, r_value);
    const Eigen::Matrix2d normal = a.transpose() * a;
    const Eigen::Matrix2d inv = normal.inverse();
    const Eigen::Vector2d sol = inv * (a.transpose() * rhs);
    const Eigen::Vector3d var(x.sigma * x.sigma / 4.0, y.sigma * y.sigma / 4.0, r_sigma * r_sigma);
    const Eigen::Matrix2d cov = inv * a.transpose() * var.asDiagonal() * a * inv;

    Edge e;
    e.i = i;
    e.j = j;
    e.z = cplx(sol(0), sol(1));
    const double mag2 = std::norm(e.z);
    if (mag2 > 0.0) {
        const Eigen::Vector2d grad(-sol(1) / mag2, sol(0) / mag2);
        e.phase_sigma = std::sqrt(std::max(grad.dot(cov * grad), 0.0));
    } else {
        e.phase_sigma = std::numbers::pi;
    }
    // Disagreement between the r reading and the x/y estimate alone.
    e.residual = std::abs(c * x.value / 2.0 + s * y.value / 2.0 - r_value);
    return e;
}

}  // namespace

PhaseEstimate recover_phases(const DensityMatrix& rho, const ComplexVector& b, const QpcaConfig& cfg,
                             const RBasisAngles& r) {
    cfg.validate();
    if (!cfg.target_bitstring) throw ValidationError("recover_phases: target bitstring is not set");
    const detail::Engine engine(rho, cfg.n_bits, cfg.evolution_time, cfg.noise);
    const int m = engine.m_qubits();
    const std::size_t dim = std::size_t{1} << m;
    const std::string& target = *cfg.target_bitstring;
    const auto seed = [&](std::uint64_t k) { return detail::stage_seed(cfg.seed, detail::Stage::Phases, k); };

    PhaseEstimate out;
    const auto z = engine.projected_readout(b, target, {}, cfg.shots, seed(0), "z");
    out.histograms.push_back(z.histogram);
    out.projection_probability = z.probability;
    const auto fz = detail::frequencies(z.histogram, m);

    const Eigen::Matrix2cd rb = r_basis(r);
    const double two_alpha = 2.0 * r.alpha;
    std::vector<Edge> edges;
    for (int q = 0; q < m; ++q) {
        const auto read = [&](const Eigen::Matrix2cd& basis, const std::string& name, std::uint64_t k) {
            qsim::BasisRotation rot(static_cast<std::size_t>(m));
            rot[static_cast<std::size_t>(q)] = basis;
            auto ro = engine.projected_readout(b, target, rot, cfg.shots, seed(k), name + std::to_string(q));
            out.histograms.push_back(ro.histogram);
            return ro;
        };
        const auto rx = read(qsim::x_basis(), "x", 3 * static_cast<std::uint64_t>(q) + 1);
        const auto ry = read(qsim::y_basis(), "y", 3 * static_cast<std::uint64_t>(q) + 2);
        const auto rr = read(rb, "r", 3 * static_cast<std::uint64_t>(q) + 3);
        const auto fx = detail::frequencies(rx.histogram, m);
        const auto fy = detail::frequencies(ry.histogram, m);
        const auto fr = detail::frequencies(rr.histogram, m);

        const std::size_t mask = std::size_t{1} << (m - 1 - q);
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & mask) continue;
            const std::size_t j = i | mask;
            const auto cx = contrast(fx, i, j, rx.accepted);
            const auto cy = contrast(fy, i, j, ry.accepted);
            const auto cr = contrast(fr, i, j, rr.accepted);
            // P0 - P1 = cos(2a)(|a_i|^2 - |a_j|^2) + 2 sin(2a) Re(e^{-i beta} z)
            const double r_value = (cr.value - std::cos(two_alpha) * (fz[i] - fz[j])) / (2.0 * std::sin(two_alpha));
            const double r_sigma = cr.sigma / (2.0 * std::abs(std::sin(two_alpha)));
            edges.push_back(fit_edge(i, j, cx, cy, r_value, r_sigma, r.beta));
        }
    }

    // Phases propagate along a maximum-weight spanning tree of the
    // hypercube over the observed basis states, rooted at the first one.
    std::vector<double> phase(dim, 0.0), sigma(dim, 0.0);
    std::vector<bool> seen(dim, false), present(dim, false);
    std::size_t root = dim;
    for (std::size_t i = 0; i < dim; ++i) {
        present[i] = fz[i] > 0.0;
        if (present[i] && root == dim) root = i;
    }
    if (root == dim) throw DegenerateProjectionError("recover_phases: no weight in the eigenvector register");
    seen[root] = true;
    for (;;) {
        const Edge* best = nullptr;
        double best_w = 0.0;
        bool forward = true;
        for (const auto& e : edges) {
            if (!present[e.i] || !present[e.j] || seen[e.i] == seen[e.j]) continue;
            const double w = fz[e.i] * fz[e.j];
            if (w > best_w) {
                best = &e;
                best_w = w;
                forward = seen[e.i];
            }
        }
        if (!best) break;
        if (forward) {
            phase[best->j] = phase[best->i] + std::arg(best->z);
            sigma[best->j] = std::hypot(sigma[best->i], best->phase_sigma);
            seen[best->j] = true;
        } else {
            phase[best->i] = phase[best->j] - std::arg(best->z);
            sigma[best->i] = std::hypot(sigma[best->j], best->phase_sigma);
            seen[best->i] = true;
        }
    }

    out.vector = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    out.uncertainty.assign(dim, 0.0);
    out.phase_sigma.assign(dim, 0.0);
    double mean_phase = 0.0;
    int nonzero = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double mag = std::sqrt(fz[i]);
        const double mag_sigma = 0.5 * std::sqrt((1.0 - fz[i]) / static_cast<double>(z.accepted));
        if (!present[i]) {
            out.uncertainty[i] = mag_sigma;
            continue;
        }
        if (!seen[i]) {
            out.phase_resolution_flag = true;
            sigma[i] = std::numbers::pi;
        }
        out.vector(static_cast<Eigen::Index>(i)) = std::polar(mag, phase[i]);
        out.phase_sigma[i] = sigma[i];
        out.uncertainty[i] = std::hypot(mag_sigma, mag * sigma[i]);
        if (sigma[i] > kPhaseResolutionLimit) out.phase_resolution_flag = true;
        mean_phase += phase[i];
        ++nonzero;
    }
    for (const auto& e : edges)
        if (present[e.i] && present[e.j]) out.consistency_residual = std::max(out.consistency_residual, e.residual);
    out.vector /= out.vector.norm();
    out.split_phase = out.vector * std::exp(cplx(0.0, -mean_phase / nonzero));
    return out;
}

}  // namespace qhjm::qpca
