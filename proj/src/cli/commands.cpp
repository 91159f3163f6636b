// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qhjm/cli.hpp"
#include "qhjm/error.hpp"
#include "qhjm/fixtures.hpp"
#include "qhjm/hjm.hpp"
#include "qhjm/qpca.hpp"

namespace qhjm::cli {

namespace {

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const linalg::ComplexVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
    return out;
}

json rows_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
    return out;
}

json to_json(const qsim::ShotHistogram& h) {
    json counts = json::object();
    for (const auto& [label, n] : h.counts) counts[label] = n;
    return {{"basis", h.basis}, {"total", h.total}, {"counts", counts}};
}

json to_json(const hjm::VolatilityFactorSet& f) {
    return {{"tenors", f.grid.tenors()},
            {"factors", rows_json(f.factors)},
            {"eigenvalues", f.eigenvalues},
            {"explained_variance", f.explained_variance},
            {"provenance", f.provenance},
            {"uncertainty", f.uncertainty}};
}

json report(const std::string& command, json config, json results, json provenance) {
    return {{"schema_version", kSchemaVersion},
            {"command", command},
            {"config", std::move(config)},
            {"results", std::move(results)},
            {"provenance", std::move(provenance)}};
}

std::vector<double> parse_row(const std::string& line, std::size_t line_no, const std::string& path) {
    std::string s = line.substr(0, line.find('#'));
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream in(s);
    std::vector<double> row;
    std::string tok;
    while (in >> tok) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size() || !std::isfinite(v))
            throw ValidationError(path + ":" + std::to_string(line_no) + ": '" + tok + "' is not a finite number");
        row.push_back(v);
    }
    return row;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix file '" + path + "' (and it is not a builtin)");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto row = parse_row(line, line_no, path);
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError(path + ":" + std::to_string(line_no) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(path + ": no matrix rows");
    if (rows.size() != rows.front().size()) throw ValidationError(path + ": matrix is not square");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

json qpca_config_json(const qpca::QpcaConfig& c) {
    json j = {{"n_bits", c.n_bits},
              {"evolution_time", c.evolution_time},
              {"max_iterations", c.max_iterations},
              {"shots", c.shots},
              {"convergence_tol", c.convergence_tol},
              {"target_bitstring", c.target_bitstring ? json(*c.target_bitstring) : json(nullptr)},
              {"refine_bits", c.effective_refine_bits()},
              {"seed", c.seed}};
    j["noise"] = c.noise ? json{{"two_qubit_depolarizing_p", c.noise->two_qubit_depolarizing_p}, {"seed", c.noise->seed}}
                         : json(nullptr);
    return j;
}

json qpca_result_json(const qpca::QpcaResult& r) {
    json iterations = json::array();
    for (const auto& it : r.trace.iterations) {
        iterations.push_back({{"index", it.index},
                              {"input", to_json(it.input)},
                              {"magnitudes", it.magnitudes},
                              {"magnitude_sigma", it.magnitude_sigma},
                              {"projection_probability", it.projection_probability},
                              {"accepted_shots", it.accepted_shots},
                              {"fidelity_to_previous", it.fidelity_to_previous},
                              {"oracle_fidelity", it.oracle_fidelity ? json(*it.oracle_fidelity) : json(nullptr)},
                              {"histogram", to_json(it.histogram)}});
    }
    const auto& e = r.eigenvector;
    json histograms = json::array();
    for (const auto& h : e.histograms) histograms.push_back(to_json(h));
    const auto& q = r.refinement;
    json out = {{"target", r.target},
                {"target_calibrated", r.target_calibrated},
                {"circuit_entangling_count", r.circuit_entangling_count},
                {"trace", {{"converged", r.trace.converged}, {"iterations", iterations}}},
                {"eigenvector",
                 {{"vector", to_json(e.vector)},
                  {"split_phase", to_json(e.split_phase)},
                  {"uncertainty", e.uncertainty},
                  {"phase_sigma", e.phase_sigma},
                  {"phase_resolution_flag", e.phase_resolution_flag},
                  {"consistency_residual", e.consistency_residual},
                  {"projection_probability", e.projection_probability},
                  {"histograms", histograms}}},
                {"refinement",
                 {{"bitstring", q.bitstring},
                  {"value", q.value},
                  {"eigenvalue", q.eigenvalue},
                  {"modal_probability", q.modal_probability},
                  {"fidelity", q.fidelity},
                  {"distribution", q.distribution},
                  {"tv_to_uniform", q.tv_to_uniform},
                  {"entangling_count", q.entangling_count},
                  {"histogram", to_json(q.histogram)}}}};
    if (r.ambiguity) {
        const auto& a = *r.ambiguity;
        out["ambiguity"] = {{"verdict", a.single_component ? "K=1" : "K>1"},
                            {"seed_b", a.seed_b},
                            {"seed_c", a.seed_c},
                            {"shift_b", a.shift_b},
                            {"shift_c", a.shift_c},
                            {"cross_fidelity", a.cross_fidelity},
                            {"recommendation", a.recommendation}};
    } else {
        out["ambiguity"] = nullptr;
    }
    if (r.oracle) {
        out["oracle"] = {{"eigenvalue", r.oracle->eigenvalue},
                         {"eigenvector", to_json(r.oracle->eigenvector)},
                         {"fidelity", r.oracle->fidelity},
                         {"nearest_bitstring", r.oracle->nearest_bitstring}};
    } else {
        out["oracle"] = nullptr;
    }
    return out;
}

std::vector<double> or_default_maturities(const std::vector<double>& m, double horizon) {
    if (!m.empty()) return m;
    return {horizon / 2.0, horizon};
}

}  // namespace

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::string* source) {
    if (flag) {
        if (source) *source = "flag";
        return *flag;
    }
    if (const char* env = std::getenv(kSeedEnv); env && *env) {
        const std::string s(env);
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || s.front() == '-')
            throw ValidationError(std::string(kSeedEnv) + " must be a nonnegative integer, got '" + s + "'");
        if (source) *source = "env";
        return v;
    }
    throw ValidationError(std::string("a seed is required: pass --seed or set ") + kSeedEnv);
}

MatrixSource load_matrix(const std::string& source, const std::vector<double>& tenors) {
    MatrixSource out;
    out.name = source;
    if (auto m = fixtures::builtin(source)) {
        out.matrix = *m;
        out.tenors = fixtures::builtin_tenors(source, m->rows());
    } else {
        out.matrix = read_matrix_file(source);
        out.tenors = fixtures::builtin_tenors("", out.matrix.rows());
    }
    if (!tenors.empty()) {
        if (tenors.size() != static_cast<std::size_t>(out.matrix.rows()))
            throw ValidationError("tenor count does not match the matrix dimension");
        out.tenors = tenors;
    }
    return out;
}

json cmd_decompose(const DecomposeOptions& o) {
    const auto src = load_matrix(o.source, o.tenors);
    const linalg::HermitianMatrix h(src.matrix);
    const auto spec = linalg::eigh(h);
    const hjm::CovarianceMatrix cov{hjm::MaturityGrid(src.tenors), src.matrix};
    const auto factors = hjm::extract_factors(cov, o.r);

    const double tr = h.trace();
    json vectors = json::array();
    for (Eigen::Index k = 0; k < spec.eigenvectors.cols(); ++k)
        vectors.push_back(to_json(Eigen::VectorXd(spec.eigenvectors.col(k).real())));
    std::vector<std::size_t> gaps(spec.degenerate_gaps.begin(), spec.degenerate_gaps.end());
    json results = {{"dimension", src.matrix.rows()},
                    {"trace", tr},
                    {"eigenvalues", to_json(spec.eigenvalues)},
                    {"normalized_eigenvalues", tr > 0 ? to_json(Eigen::VectorXd(spec.eigenvalues / tr)) : json(nullptr)},
                    {"eigenvectors", vectors},
                    {"degenerate_gaps", gaps},
                    {"jacobi_sweeps", spec.sweeps},
                    {"explained_variance", factors.explained_variance},
                    {"factors", to_json(factors)}};
    return report("decompose", {{"source", o.source}, {"r", o.r}, {"tenors", src.tenors}}, results,
                  {{"stochastic", false}});
}

json cmd_qpca(const QpcaOptions& o) {
    const auto src = load_matrix(o.source);
    const auto rho = linalg::normalize_to_density(linalg::HermitianMatrix(linalg::zero_pad_pow2(src.matrix.cast<linalg::cplx>())));

    qpca::QpcaConfig cfg;
    cfg.n_bits = o.bits;
    cfg.shots = o.shots;
    cfg.max_iterations = o.iterations;
    cfg.convergence_tol = o.tol;
    if (o.time != 0.0) cfg.evolution_time = o.time;
    cfg.target_bitstring = o.target;
    if (o.noise_p != 0.0) cfg.noise = qsim::NoiseModel{o.noise_p, o.noise_seed};
    cfg.refine_bits = o.refine_bits;
    cfg.seed = o.seed;
    cfg.validate();

    const auto result = qpca::run_qpca(rho, cfg);
    json config = qpca_config_json(cfg);
    config["source"] = o.source;
    config["density_dimension"] = rho.dim();
    json provenance = {{"stochastic", true}, {"seed", cfg.seed}, {"shots", cfg.shots}, {"noise", config["noise"]}};
    return report("qpca", config, qpca_result_json(result), provenance);
}

json cmd_hjm(const HjmOptions& o) {
    hjm::VolatilityFactorSet factors;
    std::optional<hjm::RateHistory> history;
    json quantum = nullptr;
    if (o.history) history = hjm::read_history_csv_file(*o.history, o.annualization);

    if (o.sigma) {
        if (!std::isfinite(*o.sigma) || *o.sigma < 0.0) throw ValidationError("--sigma must be nonnegative");
        factors = hjm::make_factors(hjm::MaturityGrid(std::vector<double>{o.horizon}), Eigen::MatrixXd::Constant(1, 1, *o.sigma));
        factors.provenance = "flat";
    } else {
        hjm::CovarianceMatrix cov;
        if (history) {
            cov = hjm::estimate_covariance(history->curves, o.annualization);
        } else if (o.factors_from) {
            const auto src = load_matrix(*o.factors_from);
            cov = hjm::CovarianceMatrix{hjm::MaturityGrid(src.tenors), src.matrix};
        } else {
            throw ValidationError("hjm: give --history, --factors-from or --sigma");
        }
        if (o.quantum) {
            qpca::QpcaConfig qc;
            qc.n_bits = o.quantum_bits;
            qc.seed = o.seed;
            auto q = hjm::quantum_extract_factors(cov, o.r, qc);
            factors = std::move(q.factors);
            quantum = qpca_result_json(q.run);
            quantum["config"] = qpca_config_json(qc);
        } else {
            factors = hjm::extract_factors(cov, o.r);
        }
    }

    hjm::HjmConfig cfg;
    cfg.dt = o.dt;
    cfg.horizon = o.horizon;
    cfg.n_paths = o.paths;
    cfg.n_factors = factors.count();
    cfg.seed = o.seed;
    if (history) {
        cfg.initial = history->curves.back();
        cfg.initial.time = 0.0;
    } else {
        cfg.initial = hjm::flat_curve(o.f0, {o.horizon});
    }
    cfg.checkpoints = {o.horizon / 2.0, o.horizon};
    cfg.validate();

    const auto maturities = or_default_maturities(o.maturities, o.horizon);
    std::vector<double> tenors{0.0};
    for (double t : factors.grid.tenors()) tenors.push_back(t);

    const auto stats = hjm::curve_statistics(cfg, factors, tenors);
    const auto rows = hjm::martingale_check(cfg, factors, maturities);

    json path_stats = json::array();
    for (const auto& s : stats)
        path_stats.push_back({{"time", s.time}, {"tenors", s.tenors}, {"mean", s.mean}, {"stdev", s.stdev}});
    json bonds = json::array();
    json martingale = json::array();
    for (const auto& r : rows) {
        bonds.push_back({{"maturity", r.maturity}, {"price", r.bond_price}});
        martingale.push_back({{"maturity", r.maturity},
                              {"mc_estimate", r.mc_estimate},
                              {"std_error", r.std_error},
                              {"bond_price", r.bond_price},
                              {"abs_error", r.abs_error},
                              {"within_3se", r.within_3se}});
    }
    json results = {{"factors", to_json(factors)},
                    {"initial_curve", {{"maturities", cfg.initial.maturities}, {"rates", cfg.initial.rates}}},
                    {"lattice", {{"steps", cfg.steps()}, {"step", cfg.step()}}},
                    {"path_statistics", path_stats},
                    {"bond_prices", bonds},
                    {"martingale", martingale},
                    {"quantum", quantum}};
    json config = {{"history", o.history ? json(*o.history) : json(nullptr)},
                   {"factors_from", o.factors_from ? json(*o.factors_from) : json(nullptr)},
                   {"r", o.r},
                   {"quantum", o.quantum},
                   {"quantum_bits", o.quantum_bits},
                   {"sigma", o.sigma ? json(*o.sigma) : json(nullptr)},
                   {"f0", o.f0},
                   {"paths", o.paths},
                   {"dt", o.dt},
                   {"horizon", o.horizon},
                   {"annualization", o.annualization},
                   {"maturities", maturities},
                   {"seed", o.seed}};
    return report("hjm", config, results, {{"stochastic", true}, {"seed", o.seed}, {"paths", o.paths}});
}

json cmd_ingest_check(const IngestOptions& o) {
    const auto h = hjm::read_history_csv_file(o.path, o.annualization);
    json results = {{"observations", h.curves.size()},
                    {"tenors", h.grid.tenors()},
                    {"first_date", h.dates.front()},
                    {"last_date", h.dates.back()}};
    if (h.curves.size() >= 3) {
        const auto cov = hjm::estimate_covariance(h.curves, o.annualization);
        const auto f = hjm::extract_factors(cov, 1);
        results["covariance"] = rows_json(cov.c);
        results["eigenvalues"] = f.eigenvalues;
        results["leading_explained_variance"] = f.explained_variance;
    } else {
        results["covariance"] = nullptr;
        results["eigenvalues"] = nullptr;
        results["leading_explained_variance"] = nullptr;
    }
    return report("ingest-check", {{"path", o.path}, {"annualization", o.annualization}}, results,
                  {{"stochastic", false}});
}

}  // namespace qhjm::cli
