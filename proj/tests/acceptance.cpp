// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion with the measured values
// and wall time. Extra arguments are unit-test executables whose success
// makes up the property-suite criterion. Exit status is nonzero if any
// line fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qhjm/fixtures.hpp"
#include "qhjm/hjm.hpp"
#include "qhjm/linalg.hpp"
#include "qhjm/qpca.hpp"
#include "qhjm/qsim/simulator.hpp"
#include "qhjm/qsim/synthesis.hpp"
#include "support/oracles.hpp"

using namespace qhjm;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    double time_limit_s;  // 0: none
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string vec_str(const std::vector<double>& v, const char* f = "%.4f") {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
    return s + ")";
}

linalg::ComplexVector leading(const linalg::DensityMatrix& rho) { return oracle::eig_desc(rho.matrix()).vectors.col(0); }

qpca::QpcaConfig qcfg(int bits, const std::string& target) {
    qpca::QpcaConfig c;
    c.n_bits = bits;
    c.shots = 8192;
    c.target_bitstring = target;
    c.seed = 7;
    return c;
}

Outcome spectrum_check(const linalg::DensityMatrix& rho, const std::vector<double>& lambda,
                       const std::vector<double>& v1) {
    const auto spec = linalg::eigh(rho.hermitian());
    double worst = 0.0;
    std::vector<double> got_l, got_v;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        got_l.push_back(spec.eigenvalues(static_cast<Eigen::Index>(k)));
        worst = std::max(worst, std::abs(got_l.back() - lambda[k]));
    }
    for (std::size_t k = 0; k < v1.size(); ++k) {
        const auto c = spec.eigenvectors(static_cast<Eigen::Index>(k), 0);
        got_v.push_back(c.real());
        worst = std::max(worst, std::abs(c - linalg::cplx(v1[k])));
    }
    return {worst <= 1e-3, "lambda=" + vec_str(got_l) + " v1=" + vec_str(got_v) + " max|err|=" + fmt("%.2e", worst) +
                               " (tol 1e-3)"};
}

linalg::ComplexMatrix controlled(const linalg::ComplexMatrix& u) {
    const auto d = u.rows();
    linalg::ComplexMatrix full = linalg::ComplexMatrix::Identity(2 * d, 2 * d);
    full.bottomRightCorner(d, d) = u;
    return full;
}

std::vector<Criterion> criteria(const std::vector<std::string>& suites) {
    std::vector<Criterion> out;

    out.push_back({"1", "classical oracle 2x2", 1e-3, [] {
                       return spectrum_check(fixtures::rho2(), {0.8576, 0.1424}, {0.8347, 0.5508});
                   }});

    out.push_back({"2", "classical oracle 4x4", 1e-3, [] {
                       return spectrum_check(fixtures::rho4(), {0.800, 0.169, 0.031, 0.000},
                                             {0.669, 0.516, 0.536, 0.000});
                   }});

    out.push_back({"3", "unitary fixture e^{2 pi i rho2}", 0, [] {
                       const auto u = linalg::expm_unitary(fixtures::rho2().hermitian(), kTwoPi);
                       linalg::ComplexMatrix ref(2, 2);
                       ref << linalg::cplx(0.6260, -0.3068), linalg::cplx(0.0, -0.7170), linalg::cplx(0.0, -0.7170),
                           linalg::cplx(0.6260, 0.3068);
                       const double err = (u - ref).cwiseAbs().maxCoeff();
                       return Outcome{err <= 1e-3, "max entry error " + fmt("%.2e", err) + " (tol 1e-3)"};
                   }});

    out.push_back({"4a", "noiseless 2x2 iteration: convergence, filter-consistent first step, fidelity", 10.0, [] {
                       const auto rho = fixtures::rho2();
                       const linalg::ComplexVector plus = qsim::StateVector::uniform(1).amplitudes();
                       const auto trace = qpca::qpca_iterate(rho, plus, qcfg(2, "11"));
                       const auto& first = trace.iterations.front();
                       const oracle::Vec f = oracle::projected_filter(rho.matrix(), plus, 2, 3);
                       const std::vector<double> expect{std::abs(f(0)) / f.norm(), std::abs(f(1)) / f.norm()};
                       bool in3 = true;
                       for (int k = 0; k < 2; ++k)
                           in3 = in3 && std::abs(first.magnitudes[static_cast<std::size_t>(k)] - expect[static_cast<std::size_t>(k)]) <=
                                            3.0 * first.magnitude_sigma[static_cast<std::size_t>(k)];
                       const double fid = linalg::fidelity(trace.final_state(), leading(rho));
                       const bool pass = trace.converged && trace.iterations.size() <= 4 && fid >= 0.999 && in3;
                       return Outcome{pass, "iterations=" + std::to_string(trace.iterations.size()) +
                                                (trace.converged ? " converged" : " not converged") + " first=" +
                                                vec_str(first.magnitudes) + " filter=" + vec_str(expect) +
                                                " fidelity=" + fmt("%.5f", fid) + " (>= 0.999)"};
                   }});

    out.push_back({"4b", "noiseless 2x2 iteration: first magnitudes vs published (0.719, 0.695) within 3 sigma", 10.0,
                   [] {
                       const auto trace = qpca::qpca_iterate(fixtures::rho2(), qsim::StateVector::uniform(1).amplitudes(),
                                                             qcfg(2, "11"));
                       const auto& first = trace.iterations.front();
                       const double ref[] = {0.719, 0.695};
                       std::string z = "(";
                       bool pass = true;
                       for (int k = 0; k < 2; ++k) {
                           const auto i = static_cast<std::size_t>(k);
                           const double zs = std::abs(first.magnitudes[i] - ref[k]) / first.magnitude_sigma[i];
                           pass = pass && zs <= 3.0;
                           z += (k ? ", " : "") + fmt("%.1f", zs);
                       }
                       return Outcome{pass, "measured=" + vec_str(first.magnitudes) + " sigma=" +
                                                vec_str(first.magnitude_sigma) + " deviations in sigma=" + z + ")"};
                   }});

    out.push_back({"5", "QPE refinement 2x2, 3 bits", 10.0, [] {
                       const auto rho = fixtures::rho2();
                       const auto r = qpca::qpe_refine(rho, leading(rho), 3, qcfg(3, "111"));
                       const bool pass = r.bitstring == "111" && r.value == 0.875 && r.fidelity >= 0.977;
                       return Outcome{pass, "modal=" + r.bitstring + " value=" + fmt("%.4f", r.value) +
                                                " fidelity=" + fmt("%.4f", r.fidelity) + " (>= 0.977)"};
                   }});

    out.push_back({"6", "noiseless 4x4 iteration, 1 bit, target 1", 0, [] {
                       const auto rho = fixtures::rho4();
                       const auto trace =
                           qpca::qpca_iterate(rho, qsim::StateVector::uniform(2).amplitudes(), qcfg(1, "1"));
                       const double fid = linalg::fidelity(trace.final_state(), leading(rho));
                       const bool pass = trace.converged && trace.iterations.size() <= 4 && fid >= 0.99;
                       return Outcome{pass, "iterations=" + std::to_string(trace.iterations.size()) +
                                                (trace.converged ? " converged" : " not converged") +
                                                " fidelity=" + fmt("%.5f", fid) + " (>= 0.99)"};
                   }});

    out.push_back({"7", "decoherence at p=0.08 on the synthesized 4x4 circuit", 300.0, [] {
                       const auto circuit = qpca::build_qpca_circuit(fixtures::rho4(), 1, kTwoPi);
                       const auto native = qsim::expand_for_noise(circuit);
                       const auto input = qsim::StateVector(1).tensor(qsim::StateVector::uniform(2));
                       const std::uint64_t trajectories = 10000;
                       const auto noisy = qsim::average_distribution(native, input, 0.08, trajectories, 2024);
                       const auto clean = qsim::average_distribution(native, input, 0.0, 1, 2024);
                       const double tv = qsim::tv_to_uniform(noisy);
                       const double tv0 = qsim::tv_to_uniform(clean);
                       const bool pass = native.entangling_count() >= 18 && tv <= 0.25;
                       return Outcome{pass, "entanglers=" + std::to_string(native.entangling_count()) +
                                                " trajectories=" + std::to_string(trajectories) + " TV=" +
                                                fmt("%.4f", tv) + " (<= 0.25; noiseless TV=" + fmt("%.4f", tv0) + ")"};
                   }});

    out.push_back({"8", "controlled-stage synthesis for the 4x4 circuit", 0, [] {
                       const auto rho = fixtures::rho4();
                       const auto circuit = qpca::build_qpca_circuit(rho, 1, kTwoPi);
                       std::size_t total = 0;
                       double worst = 0.0;
                       int stages = 0;
                       for (const auto& g : circuit.gates()) {
                           const auto* cu = std::get_if<qsim::ControlledUnitary>(&g);
                           if (!cu) continue;
                           const auto syn = qsim::decompose_controlled_unitary(cu->u, static_cast<int>(cu->targets.size()));
                           total += syn.entangling_count;
                           worst = std::max(worst, (qsim::circuit_unitary(syn.circuit) - controlled(cu->u)).cwiseAbs().maxCoeff());
                           ++stages;
                       }
                       return Outcome{total >= 18 && worst <= 1e-8 && stages > 0,
                                      "stages=" + std::to_string(stages) + " entanglers=" + std::to_string(total) +
                                          " (>= 18) max reconstruction error=" + fmt("%.2e", worst) + " (<= 1e-8)"};
                   }});

    out.push_back({"9", "factor extraction from the 3x3 covariance", 0, [] {
                       const hjm::CovarianceMatrix cov{hjm::MaturityGrid(fixtures::sigma3_tenors()), fixtures::sigma3()};
                       const auto one = hjm::extract_factors(cov, 1);
                       const auto all = hjm::extract_factors(cov, 3);
                       const double err = (all.reconstruct() - fixtures::sigma3()).norm();
                       const bool pass = std::abs(one.explained_variance - 0.800) <= 1e-3 && err <= 1e-10;
                       return Outcome{pass, "explained=" + fmt("%.5f", one.explained_variance) +
                                                " (0.800 +- 1e-3) r=3 Frobenius error=" + fmt("%.2e", err) +
                                                " (<= 1e-10)"};
                   }});

    out.push_back({"10", "martingale property, flat factor, 1e5 paths", 120.0, [] {
                       const double sigma = 0.01, f0 = 0.03;
                       hjm::HjmConfig cfg;
                       cfg.dt = 1.0 / 252.0;
                       cfg.horizon = 1.0;
                       cfg.n_paths = 100000;
                       cfg.seed = 10;
                       cfg.initial = hjm::flat_curve(f0, {1.0});
                       const auto factors = hjm::make_factors(hjm::MaturityGrid(std::vector<double>{1.0}),
                                                              Eigen::MatrixXd::Constant(1, 1, sigma));
                       const auto rows = hjm::martingale_check(cfg, factors, {0.25, 0.5, 1.0});
                       bool pass = true;
                       std::string detail;
                       for (const auto& r : rows) {
                           // The integrated short rate is Gaussian with mean f0 T + sigma^2 T^3 / 6
                           // and variance sigma^2 T^3 / 3.
                           const double t = r.maturity;
                           const double closed = std::exp(-(f0 * t + sigma * sigma * t * t * t / 6) +
                                                          0.5 * sigma * sigma * t * t * t / 3);
                           const double z = std::abs(r.mc_estimate - closed) / r.std_error;
                           pass = pass && z <= 3.0;
                           detail += "T=" + fmt("%.2f", t) + ": |err|/se=" + fmt("%.2f", z) + " ";
                       }
                       return Outcome{pass, detail + "(<= 3)"};
                   }});

    out.push_back({"11", "property suites", 0, [suites] {
                       std::string detail;
                       bool pass = !suites.empty();
                       for (const auto& s : suites) {
                           const std::string cmd = "\"" + s + "\" > /dev/null 2>&1";
                           const int rc = std::system(cmd.c_str());
                           const auto slash = s.find_last_of('/');
                           detail += s.substr(slash == std::string::npos ? 0 : slash + 1) + (rc == 0 ? "=ok " : "=FAILED ");
                           pass = pass && rc == 0;
                       }
                       return Outcome{pass, suites.empty() ? "no suites given" : detail};
                   }});
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> suites(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& c : criteria(suites)) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string timing = fmt("%.3f s", s);
        if (c.time_limit_s > 0) {
            timing += " (limit " + fmt("%g s", c.time_limit_s) + ")";
            if (s > c.time_limit_s) {
                o.pass = false;
                o.detail += " [over time limit]";
            }
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %-4s %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(), o.detail.c_str(),
                    timing.c_str());
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
