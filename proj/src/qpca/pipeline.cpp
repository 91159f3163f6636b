// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "qhjm/error.hpp"
#include "qhjm/random.hpp"
#include "readout.hpp"

namespace qhjm::qpca {

using qsim::Circuit;
using qsim::Register;
using qsim::StateVector;

namespace {

int log2_exact(Eigen::Index dim) {
    int m = 0;
    while ((Eigen::Index{1} << m) < dim) ++m;
    return (Eigen::Index{1} << m) == dim ? m : -1;
}

void check_target(const std::string& bits, int n_bits) {
    if (static_cast<int>(bits.size()) != n_bits) {
        std::ostringstream os;
        os << "target bitstring '" << bits << "' must have " << n_bits << " bits";
        throw ValidationError(os.str());
    }
    qsim::parse_bitstring(bits);
}

ComplexVector magnitudes_as_state(const std::vector<double>& mags) {
    ComplexVector v(static_cast<Eigen::Index>(mags.size()));
    for (std::size_t i = 0; i < mags.size(); ++i) v(static_cast<Eigen::Index>(i)) = mags[i];
    return v;
}

}  // namespace

void QpcaConfig::validate() const {
    if (n_bits < 1 || n_bits > 12) throw ValidationError("n_bits must be between 1 and 12");
    if (!std::isfinite(evolution_time) || evolution_time <= 0.0)
        throw ValidationError("evolution_time must be positive and finite");
    if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
    if (shots < 1) throw ValidationError("shots must be at least 1");
    if (!(convergence_tol > 0.0 && convergence_tol < 1.0)) throw ValidationError("convergence_tol must lie in (0, 1)");
    if (refine_bits < 0 || refine_bits > 12) throw ValidationError("refine_bits must be between 0 and 12");
    if (target_bitstring) check_target(*target_bitstring, n_bits);
    if (noise) noise->validate();
}

Eigen::Matrix2cd r_basis(const RBasisAngles& a) {
    using linalg::cplx;
    Eigen::Matrix2cd r;
    r << std::cos(a.alpha), -std::exp(cplx(0.0, a.gamma)) * std::sin(a.alpha),
        std::exp(cplx(0.0, a.beta)) * std::sin(a.alpha), std::exp(cplx(0.0, a.beta + a.gamma)) * std::cos(a.alpha);
    return r;
}

Circuit build_qpca_circuit(const DensityMatrix& rho, int n_bits, double evolution_time) {
    if (n_bits < 1 || n_bits > 12) throw ValidationError("n_bits must be between 1 and 12");
    const int m = log2_exact(rho.dim());
    if (m < 1) {
        std::ostringstream os;
        os << "qpca: density matrix dimension " << rho.dim() << " is not a power of two (zero-pad it first)";
        throw ValidationError(os.str());
    }
    Circuit c(n_bits + m);
    c.add_register("eigenvalue", Register{0, n_bits});
    c.add_register("eigenvector", Register{n_bits, m});
    std::vector<int> targets(static_cast<std::size_t>(m));
    for (int q = 0; q < m; ++q) targets[static_cast<std::size_t>(q)] = n_bits + q;

    for (int q = 0; q < n_bits; ++q) c.add(qsim::Hadamard{q});
    for (int k = n_bits - 1; k >= 0; --k) {
        const double t = evolution_time * std::ldexp(1.0, k);
        c.add(qsim::ControlledUnitary{k, targets, linalg::expm_unitary(rho.hermitian(), t),
                                      k == 0 ? "U" : "U^" + std::to_string(1LL << k)});
    }
    c.append(qsim::inverse_qft(n_bits));
    return c;
}

Circuit build_qpca_circuit(const DensityMatrix& rho, const QpcaConfig& cfg) {
    return build_qpca_circuit(rho, cfg.n_bits, cfg.evolution_time);
}

std::string nearest_bitstring(double lambda, int n_bits) {
    if (n_bits < 1 || n_bits > 30) throw ValidationError("nearest_bitstring: n_bits out of range");
    if (!std::isfinite(lambda)) throw ValidationError("nearest_bitstring: lambda must be finite");
    const std::uint64_t size = std::uint64_t{1} << n_bits;
    const double frac = lambda - std::floor(lambda);
    auto best = static_cast<std::uint64_t>(std::llround(frac * static_cast<double>(size))) % size;
    // Rounding picks the circular argmin; ties resolve to the lower value.
    const double scaled = frac * static_cast<double>(size);
    if (std::abs(scaled - std::floor(scaled) - 0.5) < 1e-12) best = static_cast<std::uint64_t>(std::floor(scaled)) % size;
    return qsim::to_bitstring(best, n_bits);
}

double bitstring_value(const std::string& bits) {
    return static_cast<double>(qsim::parse_bitstring(bits)) / std::ldexp(1.0, static_cast<int>(bits.size()));
}

double decode_eigenvalue(double value, double evolution_time) {
    const double scale = 2.0 * std::numbers::pi / evolution_time;
    if (value == 0.0 && scale <= 1.0) return scale;
    return value * scale;
}

ComplexVector IterationTrace::final_state() const {
    if (iterations.empty()) throw ValidationError("IterationTrace: no iterations recorded");
    return magnitudes_as_state(iterations.back().magnitudes);
}

IterationTrace qpca_iterate(const DensityMatrix& rho, const ComplexVector& b0, const QpcaConfig& cfg) {
    cfg.validate();
    if (!cfg.target_bitstring) throw ValidationError("qpca_iterate: target bitstring is not set");
    const detail::Engine engine(rho, cfg.n_bits, cfg.evolution_time, cfg.noise);
    const int m = engine.m_qubits();

    IterationTrace trace;
    trace.target = *cfg.target_bitstring;
    ComplexVector b = StateVector::normalized(b0).amplitudes();
    for (int k = 1; k <= cfg.max_iterations; ++k) {
        IterationRecord rec;
        rec.index = k;
        rec.input = b;
        const auto readout = engine.projected_readout(b, trace.target, {}, cfg.shots,
                                                      detail::stage_seed(cfg.seed, detail::Stage::Iterate, k), "z");
        rec.histogram = readout.histogram;
        rec.accepted_shots = readout.accepted;
        rec.projection_probability = readout.probability;
        const auto freq = detail::frequencies(readout.histogram, m);
        for (double f : freq) {
            rec.magnitudes.push_back(std::sqrt(f));
            rec.magnitude_sigma.push_back(0.5 * std::sqrt((1.0 - f) / static_cast<double>(readout.accepted)));
        }
        const ComplexVector next = magnitudes_as_state(rec.magnitudes);
        rec.fidelity_to_previous = linalg::fidelity(next, b);
        trace.iterations.push_back(std::move(rec));
        b = next;
        if (trace.iterations.back().fidelity_to_previous >= 1.0 - cfg.convergence_tol) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

QpeRefinement qpe_refine(const DensityMatrix& rho, const ComplexVector& u, int n_bits, const QpcaConfig& cfg) {
    cfg.validate();
    const detail::Engine engine(rho, n_bits, cfg.evolution_time, cfg.noise);
    const StateVector in = engine.input(u);
    const ComplexVector unit = in.amplitudes().head(u.size()) / in.amplitudes().head(u.size()).norm();
    const auto& ereg = engine.eigenvalue();
    const std::size_t outcomes = std::size_t{1} << n_bits;
    const std::uint64_t seed = detail::stage_seed(cfg.seed, detail::Stage::Refine, static_cast<std::uint64_t>(n_bits));

    QpeRefinement out;
    out.entangling_count = engine.native_entangling_count();
    out.distribution.assign(outcomes, 0.0);
    // overlap[y] accumulates |(<y| (x) <u|) psi|^2, the unnormalized weight
    // of the input inside the post-selected eigenvector register.
    std::vector<double> overlap(outcomes, 0.0);
    const auto accumulate = [&](const StateVector& s, double weight) {
        const Eigen::Index block = unit.size();
        for (std::size_t y = 0; y < outcomes; ++y) {
            const auto seg = s.amplitudes().segment(static_cast<Eigen::Index>(y) * block, block);
            out.distribution[y] += weight * seg.squaredNorm();
            overlap[y] += weight * std::norm(unit.dot(seg));
        }
    };

    if (!cfg.noise) {
        const StateVector s = qsim::run_circuit(engine.circuit(), in);
        accumulate(s, 1.0);
        out.histogram = qsim::sample_shots(s, ereg, {}, cfg.shots, seed);
    } else {
        const qsim::Circuit expanded = qsim::expand_for_noise(engine.circuit());
        const double w = 1.0 / static_cast<double>(cfg.shots);
        out.histogram.basis = "z";
        out.histogram.total = cfg.shots;
        const std::uint64_t master = stream_seed(seed, cfg.noise->seed);
        for (std::uint64_t t = 0; t < cfg.shots; ++t) {
            Rng rng = make_stream(master, t);
            const StateVector s = qsim::run_trajectory(expanded, in, cfg.noise->two_qubit_depolarizing_p, rng);
            accumulate(s, w);
            const auto probs = qsim::register_probabilities(s, ereg);
            ++out.histogram.counts[qsim::to_bitstring(qsim::sample_indices(probs, 1, rng).front(), n_bits)];
        }
    }
    out.bitstring = out.histogram.modal();
    const auto y = static_cast<std::size_t>(qsim::parse_bitstring(out.bitstring));
    out.value = bitstring_value(out.bitstring);
    out.eigenvalue = decode_eigenvalue(out.value, cfg.evolution_time);
    out.modal_probability = out.distribution[y];
    out.fidelity = out.distribution[y] > qsim::kMinProjectionProbability ? overlap[y] / out.distribution[y] : 0.0;
    out.tv_to_uniform = qsim::tv_to_uniform(out.distribution);
    return out;
}

std::string calibrate_target(const DensityMatrix& rho, const QpcaConfig& cfg) {
    cfg.validate();
    const detail::Engine engine(rho, cfg.n_bits, cfg.evolution_time, cfg.noise);
    const double size = std::ldexp(1.0, cfg.n_bits);
    // The leading eigenvalue of a trace-one spectrum is at least 1/N; outcomes
    // more than half a bin below that cannot be its nearest bitstring.
    const double floor_value = 1.0 / static_cast<double>(rho.dim()) - 0.5 * decode_eigenvalue(1.0 / size, cfg.evolution_time);

    // A fresh Haar start per shot: the eigenvector register is maximally mixed.
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(size), 0);
    const std::uint64_t master = detail::stage_seed(cfg.seed, detail::Stage::Calibrate, 0);
    for (std::uint64_t t = 0; t < cfg.shots; ++t) {
        Rng rng = make_stream(master, t);
        const auto b = StateVector::haar_random(engine.m_qubits(), rng);
        const auto s = engine.final_state(b.amplitudes(), rng);
        ++counts[qsim::sample_indices(qsim::register_probabilities(s, engine.eigenvalue()), 1, rng).front()];
    }
    std::uint64_t best = 0, best_count = 0;
    for (std::uint64_t y = 1; y < counts.size(); ++y) {
        if (decode_eigenvalue(static_cast<double>(y) / size, cfg.evolution_time) < floor_value) continue;
        if (counts[y] > best_count) {
            best = y;
            best_count = counts[y];
        }
    }
    return qsim::to_bitstring(best, cfg.n_bits);
}

AmbiguityReport check_ambiguity(const DensityMatrix& rho, const QpcaConfig& cfg, std::uint64_t seed_b,
                                std::uint64_t seed_c) {
    cfg.validate();
    if (!cfg.target_bitstring) throw ValidationError("check_ambiguity: target bitstring is not set");
    if (seed_b == seed_c) throw ValidationError("check_ambiguity: the two starts need distinct seeds");
    const int m = [&] {
        const int v = log2_exact(rho.dim());
        if (v < 1) throw ValidationError("check_ambiguity: density matrix dimension is not a power of two");
        return v;
    }();
    AmbiguityReport rep;
    rep.seed_b = seed_b;
    rep.seed_c = seed_c;
    const auto run = [&](std::uint64_t seed, ComplexVector& start, ComplexVector& final_state) {
        Rng rng = make_stream(detail::stage_seed(cfg.seed, detail::Stage::Ambiguity, seed), 0);
        start = StateVector::haar_random(m, rng).amplitudes();
        QpcaConfig c = cfg;
        c.seed = detail::stage_seed(cfg.seed, detail::Stage::Ambiguity, seed);
        const auto trace = qpca_iterate(rho, start, c);
        final_state = trace.final_state();
        // How far the first projection moved the start's magnitudes.
        return 1.0 - linalg::fidelity(ComplexVector(start.cwiseAbs().cast<linalg::cplx>()),
                                      magnitudes_as_state(trace.iterations.front().magnitudes));
    };
    rep.shift_b = run(seed_b, rep.start_b, rep.final_b);
    rep.shift_c = run(seed_c, rep.start_c, rep.final_c);
    rep.cross_fidelity = linalg::fidelity(rep.final_b, rep.final_c);
    // A filter that leaves both random starts in place singles out nothing,
    // however close the two starts happen to be.
    const double still = cfg.convergence_tol;
    rep.single_component = rep.cross_fidelity >= kAmbiguityFidelity && !(rep.shift_b < still && rep.shift_c < still);
    if (!rep.single_component)
        rep.recommendation = "independent starts disagree: several eigenvalues share the target bitstring; increase n_bits";
    return rep;
}

QpcaResult run_qpca(const DensityMatrix& rho, const QpcaConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    QpcaResult res;
    QpcaConfig c = cfg;
    if (!c.target_bitstring) {
        c.target_bitstring = calibrate_target(rho, c);
        res.target_calibrated = true;
    }
    res.target = *c.target_bitstring;
    {
        const detail::Engine engine(rho, c.n_bits, c.evolution_time, std::nullopt);
        res.circuit_entangling_count = engine.native_entangling_count();
    }

    const ComplexVector b0 =
        opts.b0 ? *opts.b0 : StateVector::uniform(log2_exact(rho.dim()) < 1 ? 1 : log2_exact(rho.dim())).amplitudes();
    res.trace = qpca_iterate(rho, b0, c);
    res.eigenvector = recover_phases(rho, res.trace.final_state(), c);
    res.refinement = qpe_refine(rho, res.eigenvector.vector, c.effective_refine_bits(), c);
    if (opts.check_ambiguity) res.ambiguity = check_ambiguity(rho, c, 1, 2);

    if (opts.with_oracle) {
        const auto spec = linalg::eigh(rho.hermitian());
        OracleComparison o;
        o.eigenvalue = spec.eigenvalues(0);
        o.eigenvector = spec.vector(0);
        o.fidelity = linalg::fidelity(o.eigenvector, res.eigenvector.vector);
        o.nearest_bitstring = nearest_bitstring(o.eigenvalue * c.evolution_time / (2.0 * std::numbers::pi), c.n_bits);
        for (auto& rec : res.trace.iterations)
            rec.oracle_fidelity = linalg::fidelity(o.eigenvector, magnitudes_as_state(rec.magnitudes));
        res.oracle = std::move(o);
    }
    return res;
}

}  // namespace qhjm::qpca
