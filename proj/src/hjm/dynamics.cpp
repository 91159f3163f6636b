// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "qhjm/error.hpp"
#include "qhjm/hjm.hpp"
#include "qhjm/random.hpp"

namespace qhjm::hjm {

namespace {

constexpr std::size_t kMaxSteps = 1'000'000;

/// Drift and loadings tabulated at tau = d * h for d = 0..steps; they only
/// depend on the distance between maturity and time on the lattice.
struct Tables {
    std::vector<double> alpha;
    std::vector<std::vector<double>> sigma;  // [factor][d]
};

Tables tabulate(const VolatilityFactorSet& factors, std::size_t steps, double h) {
    Tables t;
    t.alpha.resize(steps + 1);
    t.sigma.assign(static_cast<std::size_t>(factors.count()), std::vector<double>(steps + 1));
    for (std::size_t d = 0; d <= steps; ++d) {
        const double tau = static_cast<double>(d) * h;
        t.alpha[d] = drift(factors, tau);
        for (int i = 0; i < factors.count(); ++i) t.sigma[static_cast<std::size_t>(i)][d] = factors.sigma(i, tau);
    }
    return t;
}

std::vector<std::size_t> checkpoint_steps(const HjmConfig& cfg) {
    std::vector<std::size_t> out;
    const double h = cfg.step();
    for (double c : cfg.checkpoints) out.push_back(static_cast<std::size_t>(std::llround(c / h)));
    return out;
}

void check_coverage(const HjmConfig& cfg, const VolatilityFactorSet& factors) {
    cfg.validate();
    if (cfg.initial.time != 0.0) throw ValidationError("evolve: the initial curve must be observed at time 0");
    if (factors.count() > 0 && cfg.horizon > factors.grid.back() * (1.0 + 1e-12))
        throw ValidationError("evolve: factor grid ends at " + std::to_string(factors.grid.back()) +
                              " years, before the horizon " + std::to_string(cfg.horizon));
}

}  // namespace

void HjmConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("hjm: dt must be positive");
    if (!std::isfinite(horizon) || horizon < dt) throw ValidationError("hjm: horizon must be at least dt");
    if (n_paths < 1) throw ValidationError("hjm: n_paths must be at least 1");
    if (n_factors < 0) throw ValidationError("hjm: n_factors must be nonnegative");
    if (horizon / dt > static_cast<double>(kMaxSteps)) throw ValidationError("hjm: too many time steps");
    initial.validate();
    if (initial.maturities.back() < horizon * (1.0 - 1e-12))
        throw ValidationError("hjm: initial curve ends before the horizon");
    for (double c : checkpoints)
        if (!std::isfinite(c) || c < 0.0 || c > horizon * (1.0 + 1e-12))
            throw ValidationError("hjm: checkpoint outside [0, horizon]");
}

std::size_t HjmConfig::steps() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / dt)));
}

double HjmConfig::step() const { return horizon / static_cast<double>(steps()); }

void evolve(const HjmConfig& cfg, const VolatilityFactorSet& factors, const PathVisitor& visit) {
    check_coverage(cfg, factors);
    const std::size_t n = cfg.steps();
    const double h = cfg.step();
    const double sqrt_h = std::sqrt(h);
    const Tables tab = tabulate(factors, n, h);
    const auto snaps_at = checkpoint_steps(cfg);
    const auto nf = static_cast<std::size_t>(factors.count());

    std::vector<double> f0(n + 1);
    for (std::size_t j = 0; j <= n; ++j) f0[j] = cfg.initial.rate(static_cast<double>(j) * h);

    std::vector<double> f(n + 1), rate(n + 1), log_b(n + 1), z(nf);
    std::vector<std::vector<double>> snapshots(snaps_at.size());
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) {
        Rng rng = make_stream(cfg.seed, p);
        std::normal_distribution<double> normal;
        f = f0;
        rate[0] = f[0];
        log_b[0] = 0.0;
        for (std::size_t s = 0; s < snaps_at.size(); ++s)
            if (snaps_at[s] == 0) snapshots[s] = f;
        for (std::size_t k = 0; k < n; ++k) {
            for (auto& zi : z) zi = normal(rng);
            // Maturity T_k expires at t_k; every later one moves by
            // alpha(T_j - t_k) dt + sum_i sigma_i(T_j - t_k) sqrt(dt) Z_i.
            for (std::size_t j = k + 1; j <= n; ++j) {
                const std::size_t d = j - k;
                double x = 0.0;
                for (std::size_t i = 0; i < nf; ++i) x += tab.sigma[i][d] * z[i];
                f[j] += tab.alpha[d] * h + sqrt_h * x;
            }
            rate[k + 1] = f[k + 1];
            log_b[k + 1] = log_b[k] + 0.5 * h * (rate[k] + rate[k + 1]);
            for (std::size_t s = 0; s < snaps_at.size(); ++s)
                if (snaps_at[s] == k + 1) snapshots[s] = f;
        }
        visit(PathView{p, rate, log_b, snapshots});
    }
}

std::vector<PathResult> evolve(const HjmConfig& cfg, const VolatilityFactorSet& factors) {
    cfg.validate();
    const std::size_t n = cfg.steps();
    HjmConfig all = cfg;
    all.checkpoints.clear();
    for (std::size_t k = 0; k <= n; ++k) all.checkpoints.push_back(static_cast<double>(k) * cfg.step());
    std::vector<PathResult> out;
    out.reserve(static_cast<std::size_t>(cfg.n_paths));
    evolve(all, factors, [&](const PathView& v) {
        PathResult r;
        r.times = all.checkpoints;
        r.curves = v.snapshots;
        r.short_rate = v.short_rate;
        r.money_market.resize(v.log_money_market.size());
        for (std::size_t k = 0; k < r.money_market.size(); ++k) r.money_market[k] = std::exp(v.log_money_market[k]);
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<MartingaleRow> martingale_check(const HjmConfig& cfg, const VolatilityFactorSet& factors,
                                            const std::vector<double>& maturities) {
    cfg.validate();
    const double h = cfg.step();
    const std::size_t n = cfg.steps();
    for (double t : maturities)
        if (!std::isfinite(t) || t <= 0.0 || t > cfg.horizon * (1.0 + 1e-12))
            throw ValidationError("martingale_check: maturity outside (0, horizon]");

    // log B is piecewise linear between lattice times.
    const auto log_b_at = [&](const std::vector<double>& lb, double t) {
        const double x = std::min(t / h, static_cast<double>(n));
        const auto lo = std::min(static_cast<std::size_t>(x), n - 1);
        const double w = x - static_cast<double>(lo);
        return lb[lo] + w * (lb[lo + 1] - lb[lo]);
    };

    std::vector<double> sum(maturities.size(), 0.0), sum_sq(maturities.size(), 0.0);
    evolve(cfg, factors, [&](const PathView& v) {
        for (std::size_t i = 0; i < maturities.size(); ++i) {
            const double d = std::exp(-log_b_at(v.log_money_market, maturities[i]));
            sum[i] += d;
            sum_sq[i] += d * d;
        }
    });

    const auto np = static_cast<double>(cfg.n_paths);
    std::vector<MartingaleRow> rows;
    for (std::size_t i = 0; i < maturities.size(); ++i) {
        MartingaleRow r;
        r.maturity = maturities[i];
        r.mc_estimate = sum[i] / np;
        const double var = np > 1 ? std::max(0.0, (sum_sq[i] - np * r.mc_estimate * r.mc_estimate) / (np - 1)) : 0.0;
        r.std_error = std::sqrt(var / np);
        r.bond_price = bond_price(cfg.initial, maturities[i]);
        r.abs_error = std::abs(r.mc_estimate - r.bond_price);
        // The absolute floor covers deterministic runs, where the standard error is zero.
        r.within_3se = r.abs_error <= 3.0 * r.std_error + 1e-12;
        rows.push_back(r);
    }
    return rows;
}

std::vector<CurveStats> curve_statistics(const HjmConfig& cfg, const VolatilityFactorSet& factors,
                                         const std::vector<double>& tenors) {
    cfg.validate();
    for (double tau : tenors)
        if (!std::isfinite(tau) || tau < 0.0) throw ValidationError("curve_statistics: negative tenor");
    const double h = cfg.step();
    const std::size_t n = cfg.steps();
    const auto snaps_at = checkpoint_steps(cfg);

    std::vector<CurveStats> out(snaps_at.size());
    std::vector<std::vector<double>> sum(snaps_at.size()), sum_sq(snaps_at.size());
    for (std::size_t s = 0; s < snaps_at.size(); ++s) {
        out[s].time = static_cast<double>(snaps_at[s]) * h;
        for (double tau : tenors)
            if (out[s].time + tau <= cfg.horizon * (1.0 + 1e-12)) out[s].tenors.push_back(tau);
        sum[s].assign(out[s].tenors.size(), 0.0);
        sum_sq[s].assign(out[s].tenors.size(), 0.0);
    }

    evolve(cfg, factors, [&](const PathView& v) {
        for (std::size_t s = 0; s < snaps_at.size(); ++s) {
            const auto& curve = v.snapshots[s];
            for (std::size_t i = 0; i < out[s].tenors.size(); ++i) {
                const double x = std::min((out[s].time + out[s].tenors[i]) / h, static_cast<double>(n));
                const auto lo = std::min(static_cast<std::size_t>(x), n - 1);
                const double w = x - static_cast<double>(lo);
                const double f = curve[lo] + w * (curve[lo + 1] - curve[lo]);
                sum[s][i] += f;
                sum_sq[s][i] += f * f;
            }
        }
    });

    const auto np = static_cast<double>(cfg.n_paths);
    for (std::size_t s = 0; s < out.size(); ++s) {
        for (std::size_t i = 0; i < out[s].tenors.size(); ++i) {
            const double mean = sum[s][i] / np;
            const double var = np > 1 ? std::max(0.0, (sum_sq[s][i] - np * mean * mean) / (np - 1)) : 0.0;
            out[s].mean.push_back(mean);
            out[s].stdev.push_back(std::sqrt(var));
        }
    }
    return out;
}

}  // namespace qhjm::hjm
