// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qhjm/cli.hpp"
#include "qhjm/error.hpp"

namespace qhjm::cli {

namespace {

constexpr const char* kQpcaHint = "hint: increase n_bits, pick another target bitstring or raise shots";

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase-estimation PCA of forward-rate covariances and HJM Monte Carlo", "qhjm"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "json";
    std::string output;
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json"}));
    app.add_option("--output,-o", output, "Write the report here instead of stdout");

    std::uint64_t seed_value = 0;
    const auto add_seed = [&](CLI::App* sub) {
        return sub->add_option("--seed", seed_value, "Master seed (default: $QHJM_SEED)");
    };

    DecomposeOptions dec;
    auto* decompose = app.add_subcommand("decompose", "Eigendecomposition and PCA factors of a covariance");
    decompose->add_option("source", dec.source, "Builtin (sigma2, sigma3, sigma4, rho2, rho4, identityN) or matrix file")
        ->required();
    decompose->add_option("--r", dec.r, "Factors to retain");
    decompose->add_option("--tenors", dec.tenors, "Tenors in years, one per row");

    QpcaOptions qo;
    auto* qpca = app.add_subcommand("qpca", "Phase-estimation PCA of a builtin or file matrix");
    qpca->add_option("source", qo.source, "Builtin or matrix file; normalized to trace one and zero-padded")->required();
    qpca->add_option("--bits", qo.bits, "Eigenvalue register width");
    qpca->add_option("--shots", qo.shots, "Shots per readout");
    qpca->add_option("--iterations", qo.iterations, "Maximum fixed-point iterations");
    qpca->add_option("--tol", qo.tol, "Convergence tolerance on 1 - fidelity");
    qpca->add_option("--time", qo.time, "Evolution time t (default 2 pi)");
    auto* target = qpca->add_option("--target", "Eigenvalue-register bitstring to post-select (default: calibrated)");
    qpca->add_option("--noise", qo.noise_p, "Depolarizing probability per entangling gate");
    qpca->add_option("--noise-seed", qo.noise_seed, "Noise stream index");
    qpca->add_option("--refine-bits", qo.refine_bits, "Register width of the refinement step (default: --bits)");
    auto* qpca_seed = add_seed(qpca);

    HjmOptions ho;
    auto* hjm_cmd = app.add_subcommand("hjm", "Evolve forward curves and check the martingale property");
    auto* history = hjm_cmd->add_option("--history", "Rate history CSV")->check(CLI::ExistingFile);
    auto* factors_from = hjm_cmd->add_option("--factors-from", "Covariance builtin or matrix file");
    hjm_cmd->add_option("--r", ho.r, "Factors to retain");
    hjm_cmd->add_flag("--quantum", ho.quantum, "Estimate the leading factor with phase-estimation PCA");
    hjm_cmd->add_option("--quantum-bits", ho.quantum_bits, "Eigenvalue register width for --quantum");
    auto* sigma = hjm_cmd->add_option("--sigma", "One flat factor of this size, replacing any covariance");
    hjm_cmd->add_option("--f0", ho.f0, "Flat initial forward rate when no history is given");
    hjm_cmd->add_option("--paths", ho.paths, "Monte Carlo paths");
    hjm_cmd->add_option("--dt", ho.dt, "Time step in years");
    hjm_cmd->add_option("--horizon", ho.horizon, "Simulation horizon in years");
    hjm_cmd->add_option("--annualization", ho.annualization, "Observations per year in the history");
    hjm_cmd->add_option("--maturities", ho.maturities, "Bond maturities to check (default: horizon/2, horizon)");
    auto* hjm_seed = add_seed(hjm_cmd);

    IngestOptions io;
    auto* ingest = app.add_subcommand("ingest-check", "Parse a rate history CSV and summarize it");
    ingest->add_option("path", io.path, "Rate history CSV")->required();
    ingest->add_option("--annualization", io.annualization, "Observations per year");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    json rep;
    try {
        if (app.got_subcommand(decompose)) {
            rep = cmd_decompose(dec);
        } else if (app.got_subcommand(qpca)) {
            if (target->count()) qo.target = target->as<std::string>();
            qo.seed = resolve_seed(qpca_seed->count() ? std::optional(seed_value) : std::nullopt);
            try {
                rep = cmd_qpca(qo);
            } catch (const NumericalError& e) {
                err << "error: " << e.what() << "\n" << kQpcaHint << "\n";
                return kExitNumerical;
            }
        } else if (app.got_subcommand(hjm_cmd)) {
            if (history->count()) ho.history = history->as<std::string>();
            if (factors_from->count()) ho.factors_from = factors_from->as<std::string>();
            if (sigma->count()) ho.sigma = sigma->as<double>();
            ho.seed = resolve_seed(hjm_seed->count() ? std::optional(seed_value) : std::nullopt);
            rep = cmd_hjm(ho);
        } else {
            rep = cmd_ingest_check(io);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }

    const std::string text = rep.dump(2) + "\n";
    if (output.empty()) {
        out << text;
        return kExitOk;
    }
    std::ofstream f(output, std::ios::binary);
    if (!(f << text)) {
        err << "error: cannot write '" << output << "'\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace qhjm::cli
