// SPDX-License-Identifier: Apache-2.0
//
// Heath-Jarrow-Morton forward-rate engine with time-to-maturity volatility
// factors: covariance estimation, PCA factor extraction, the no-arbitrage
// drift, Euler-Maruyama evolution on a fixed maturity lattice and
// zero-coupon bond pricing.
#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "qhjm/linalg.hpp"
#include "qhjm/qpca.hpp"

namespace qhjm::hjm {

using linalg::RealMatrix;

/// Strictly increasing positive times to maturity, in years.
class MaturityGrid {
public:
    MaturityGrid() = default;
    explicit MaturityGrid(std::vector<double> tenors);

    [[nodiscard]] const std::vector<double>& tenors() const noexcept { return tenors_; }
    [[nodiscard]] std::size_t size() const noexcept { return tenors_.size(); }
    [[nodiscard]] double front() const { return tenors_.front(); }
    [[nodiscard]] double back() const { return tenors_.back(); }
    friend bool operator==(const MaturityGrid&, const MaturityGrid&) = default;

private:
    std::vector<double> tenors_;
};

/// Piecewise-linear interpolation of (xs, ys), constant outside [xs.front(), xs.back()].
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x);

/// Exact integral over [a, b] of the interpolant above.
double integrate(const std::vector<double>& xs, const std::vector<double>& ys, double a, double b);

/// Forward curve observed at `time`: rates f(time, T_j) at absolute maturities
/// T_j (per annum, decimal). The rate is piecewise linear between maturities
/// and flat beyond either end.
struct ForwardCurve {
    double time = 0.0;
    std::vector<double> maturities;
    std::vector<double> rates;

    void validate() const;
    [[nodiscard]] double rate(double maturity) const;
};

/// Curve with rate f at the grid tenors, observed at time 0.
ForwardCurve flat_curve(double f, const std::vector<double>& maturities);

/// P(t, T) = exp(-integral_t^T f(t, s) ds). Requires t <= T <= last maturity.
double bond_price(const ForwardCurve& curve, double maturity);

struct CovarianceMatrix {
    MaturityGrid grid;
    RealMatrix c;

    void validate() const;
};

inline constexpr double kDefaultAnnualization = 252.0;

/// Unbiased sample covariance of successive changes across observations,
/// times `annualization`. Needs at least 3 observations on one grid.
CovarianceMatrix estimate_covariance(const std::vector<ForwardCurve>& history,
                                     double annualization = kDefaultAnnualization);

struct VolatilityFactorSet {
    MaturityGrid grid;
    /// Row i holds sigma_i at the grid tenors.
    RealMatrix factors;
    /// Eigenvalues of the source covariance, descending; the first rows() are retained.
    std::vector<double> eigenvalues;
    double explained_variance = 1.0;
    std::string provenance = "classical";
    /// Per-tenor uncertainty of the leading factor (quantum estimates only).
    std::vector<double> uncertainty;

    [[nodiscard]] int count() const noexcept { return static_cast<int>(factors.rows()); }
    /// sigma_i(tau), piecewise linear in tau and constant below the first tenor.
    [[nodiscard]] double sigma(int i, double tau) const;
    /// sum_i sigma_i(tau_j) sigma_i(tau_k).
    [[nodiscard]] RealMatrix reconstruct() const;
};

/// Factor set with arbitrary rows (flat or synthetic factors).
VolatilityFactorSet make_factors(const MaturityGrid& grid, RealMatrix rows);

/// Top-r eigenpairs of C: row i = sqrt(lambda_i) v_i, signed so the row sums
/// to a nonnegative value.
VolatilityFactorSet extract_factors(const CovarianceMatrix& cov, int r);

/// Leading factor estimated by the phase-estimation pipeline on C / tr(C),
/// zero-padded to a power-of-two dimension. Throws AmbiguityError when the
/// two random starts disagree.
struct QuantumFactorResult {
    VolatilityFactorSet factors;
    qpca::QpcaResult run;
};
QuantumFactorResult quantum_extract_factors(const CovarianceMatrix& cov, int r, const qpca::QpcaConfig& cfg);

/// alpha(tau) = sum_i sigma_i(tau) integral_0^tau sigma_i(s) ds.
double drift(const VolatilityFactorSet& factors, double tau);

struct HjmConfig {
    double dt = 1.0 / 252.0;
    double horizon = 1.0;
    std::uint64_t n_paths = 1000;
    /// Factors to retain when they are extracted for this run.
    int n_factors = 1;
    std::uint64_t seed = 0;
    ForwardCurve initial;
    /// Times at which curve snapshots are handed to the path visitor.
    std::vector<double> checkpoints;

    void validate() const;
    /// Number of steps: horizon / dt rounded to the nearest integer (at least 1).
    [[nodiscard]] std::size_t steps() const;
    /// Step actually used, horizon / steps().
    [[nodiscard]] double step() const;
};

/// Everything one path produced. The lattice holds maturities T_j = j * step
/// for j = 0..steps; once T_j has passed its rate stays at f(T_j, T_j).
struct PathResult {
    std::vector<double> times;
    std::vector<std::vector<double>> curves;  // [step][j]
    std::vector<double> short_rate;
    std::vector<double> money_market;  // B(t), B(0) = 1
};

/// Streaming view of one path: short rate and log B per step, plus lattice
/// curves at the configured checkpoints.
struct PathView {
    std::uint64_t path = 0;
    const std::vector<double>& short_rate;
    const std::vector<double>& log_money_market;
    const std::vector<std::vector<double>>& snapshots;
};

using PathVisitor = std::function<void(const PathView&)>;

/// Simulates cfg.n_paths paths; path p draws from stream p of cfg.seed.
void evolve(const HjmConfig& cfg, const VolatilityFactorSet& factors, const PathVisitor& visit);

/// Stores every path. Intended for small path counts.
std::vector<PathResult> evolve(const HjmConfig& cfg, const VolatilityFactorSet& factors);

struct MartingaleRow {
    double maturity = 0.0;
    double mc_estimate = 0.0;
    double std_error = 0.0;
    double bond_price = 0.0;
    double abs_error = 0.0;
    bool within_3se = false;
};

/// Monte Carlo E[exp(-integral_0^T r)] against P(0, T) from the initial curve.
std::vector<MartingaleRow> martingale_check(const HjmConfig& cfg, const VolatilityFactorSet& factors,
                                            const std::vector<double>& maturities);

struct CurveStats {
    double time = 0.0;
    std::vector<double> tenors;
    std::vector<double> mean;
    std::vector<double> stdev;
};

/// Mean and standard deviation of f(t, t + tau) over paths at each
/// checkpoint, for the tenors that stay on the lattice.
std::vector<CurveStats> curve_statistics(const HjmConfig& cfg, const VolatilityFactorSet& factors,
                                         const std::vector<double>& tenors);

/// Rate history from CSV: header `date,tenor_<n><unit>,...` with unit d, w, m
/// or y (a bare number means years); one row per date, rates in decimal.
/// Each curve holds the tenors as maturities and is stamped with time
/// row / annualization.
struct RateHistory {
    MaturityGrid grid;
    std::vector<std::string> dates;
    std::vector<ForwardCurve> curves;
};

RateHistory read_history_csv(std::istream& in, double annualization = kDefaultAnnualization);
RateHistory read_history_csv_file(const std::string& path, double annualization = kDefaultAnnualization);

/// Tenor in years from a header label such as "tenor_3m" or "tenor_0.5".
double parse_tenor_label(const std::string& label);

}  // namespace qhjm::hjm
