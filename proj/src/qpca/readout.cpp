// SPDX-License-Identifier: Apache-2.0
#include "readout.hpp"

#include "qhjm/error.hpp"
#include "qhjm/random.hpp"

namespace qhjm::qpca::detail {

using qsim::StateVector;

std::uint64_t stage_seed(std::uint64_t master, Stage stage, std::uint64_t index) {
    return stream_seed(stream_seed(master, static_cast<std::uint64_t>(stage)), index);
}

Engine::Engine(const DensityMatrix& rho, int n_bits, double evolution_time, std::optional<qsim::NoiseModel> noise)
    : circuit_(build_qpca_circuit(rho, n_bits, evolution_time)),
      expanded_(qsim::expand_for_noise(circuit_)),
      eigenvalue_(circuit_.reg("eigenvalue")),
      eigenvector_(circuit_.reg("eigenvector")),
      noise_(std::move(noise)) {
    if (noise_) noise_->validate();
}

StateVector Engine::input(const ComplexVector& b) const {
    if (b.size() != (Eigen::Index{1} << m_qubits()))
        throw ValidationError("qpca: start vector dimension does not match the eigenvector register");
    return StateVector(n_bits()).tensor(StateVector::normalized(b));
}

Engine::Readout Engine::projected_readout(const ComplexVector& b, const std::string& target,
                                          const qsim::BasisRotation& basis, std::uint64_t shots, std::uint64_t seed,
                                          const std::string& label) const {
    const StateVector in = input(b);
    Readout r;
    if (!noise_) {
        const StateVector out = qsim::run_circuit(circuit_, in);
        const auto proj = qsim::project_register(out, eigenvalue_, target);
        r.histogram = qsim::sample_shots(proj.state, qsim::Register{0, m_qubits()}, basis, shots, seed, label);
        r.accepted = shots;
        r.probability = proj.probability;
        return r;
    }

    const std::uint64_t want = qsim::parse_bitstring(target);
    const int n = circuit_.n_qubits();
    r.histogram.basis = label;
    const std::uint64_t master = stream_seed(seed, noise_->seed);
    for (std::uint64_t t = 0; t < shots; ++t) {
        Rng rng = make_stream(master, t);
        StateVector s = qsim::run_trajectory(expanded_, in, noise_->two_qubit_depolarizing_p, rng);
        for (std::size_t k = 0; k < basis.size(); ++k)
            if (basis[k]) qsim::apply_single(s, eigenvector_.first + static_cast<int>(k), basis[k]->adjoint());
        std::vector<double> probs(static_cast<std::size_t>(s.dim()));
        for (Eigen::Index i = 0; i < s.dim(); ++i) probs[static_cast<std::size_t>(i)] = std::norm(s[i]);
        const auto idx = qsim::sample_indices(probs, 1, rng).front();
        if (qsim::register_value(idx, eigenvalue_, n) != want) continue;
        ++r.accepted;
        ++r.histogram.counts[qsim::register_label(idx, eigenvector_, n)];
    }
    if (r.accepted == 0)
        throw DegenerateProjectionError("qpca: no shot landed on eigenvalue outcome '" + target + "'");
    r.histogram.total = r.accepted;
    r.probability = static_cast<double>(r.accepted) / static_cast<double>(shots);
    return r;
}

StateVector Engine::final_state(const ComplexVector& b, Rng& rng) const {
    if (!noise_) return qsim::run_circuit(circuit_, input(b));
    return qsim::run_trajectory(expanded_, input(b), noise_->two_qubit_depolarizing_p, rng);
}

std::vector<double> frequencies(const qsim::ShotHistogram& h, int width) {
    return qsim::histogram_distribution(h, width);
}

}  // namespace qhjm::qpca::detail
