// SPDX-License-Identifier: Apache-2.0
#include "qhjm/qsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qhjm/error.hpp"
#include "qhjm/qsim/synthesis.hpp"

namespace qhjm::qsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Index = std::uint64_t;

constexpr Index mask_of(int q, int n) { return Index{1} << (n - 1 - q); }

// Applies m to `qubits` (first most significant) on every basis block whose
// `control` bit is set (or unconditionally when control < 0).
void apply_matrix(ComplexVector& amps, int n, const std::vector<int>& qubits, const ComplexMatrix& m, int control) {
    const auto k = qubits.size();
    const Index block = Index{1} << k;
    std::vector<Index> offsets(block, 0);
    Index target_mask = 0;
    for (Index local = 0; local < block; ++local)
        for (std::size_t b = 0; b < k; ++b)
            if ((local >> (k - 1 - b)) & 1U) offsets[local] |= mask_of(qubits[b], n);
    for (int q : qubits) target_mask |= mask_of(q, n);
    const Index control_mask = control >= 0 ? mask_of(control, n) : 0;

    ComplexVector in(static_cast<Eigen::Index>(block));
    const Index dim = Index{1} << n;
    for (Index base = 0; base < dim; ++base) {
        if (base & target_mask) continue;
        if (control_mask && !(base & control_mask)) continue;
        for (Index j = 0; j < block; ++j) in(static_cast<Eigen::Index>(j)) = amps(static_cast<Eigen::Index>(base | offsets[j]));
        const ComplexVector out = m * in;
        for (Index j = 0; j < block; ++j) amps(static_cast<Eigen::Index>(base | offsets[j])) = out(static_cast<Eigen::Index>(j));
    }
}

GateOp map_qubits(const GateOp& g, const std::vector<int>& to) {
    const auto at = [&](int q) { return to.at(static_cast<std::size_t>(q)); };
    return std::visit(overloaded{
                          [&](Hadamard h) -> GateOp { h.qubit = at(h.qubit); return h; },
                          [&](SingleQubitUnitary u) -> GateOp { u.qubit = at(u.qubit); return u; },
                          [&](ControlledUnitary cu) -> GateOp {
                              cu.control = at(cu.control);
                              for (int& t : cu.targets) t = at(t);
                              return cu;
                          },
                          [&](ControlledPhase cp) -> GateOp {
                              cp.control = at(cp.control);
                              cp.target = at(cp.target);
                              return cp;
                          },
                          [&](Cnot c) -> GateOp {
                              c.control = at(c.control);
                              c.target = at(c.target);
                              return c;
                          },
                          [&](Swap s) -> GateOp {
                              s.a = at(s.a);
                              s.b = at(s.b);
                              return s;
                          },
                      },
                      g);
}

void append_synthesized(Circuit& out, const Synthesis& syn, int control, const std::vector<int>& targets) {
    std::vector<int> to{control};
    to.insert(to.end(), targets.begin(), targets.end());
    for (const auto& g : syn.circuit.gates()) out.add(map_qubits(g, to));
}

}  // namespace

void NoiseModel::validate() const {
    if (!(two_qubit_depolarizing_p >= 0.0 && two_qubit_depolarizing_p <= 1.0))
        throw ValidationError("NoiseModel: depolarizing probability must lie in [0, 1]");
}

double ShotHistogram::frequency(const std::string& bits) const {
    if (total == 0) return 0.0;
    const auto it = counts.find(bits);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

std::string ShotHistogram::modal() const {
    std::string best;
    std::uint64_t best_count = 0;
    for (const auto& [label, count] : counts)
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    return best;
}

void apply_single(StateVector& s, int qubit, const Eigen::Matrix2cd& u) {
    auto& a = s.amplitudes_mut();
    const int n = s.n_qubits();
    const Index m = mask_of(qubit, n);
    const Index dim = Index{1} << n;
    for (Index i = 0; i < dim; ++i) {
        if (i & m) continue;
        const auto i0 = static_cast<Eigen::Index>(i), i1 = static_cast<Eigen::Index>(i | m);
        const cplx a0 = a(i0), a1 = a(i1);
        a(i0) = u(0, 0) * a0 + u(0, 1) * a1;
        a(i1) = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void apply_gate(StateVector& s, const GateOp& g) {
    const int n = s.n_qubits();
    for (int q : qubits_of(g))
        if (q < 0 || q >= n) throw ValidationError("apply_gate: qubit out of range");
    auto& a = s.amplitudes_mut();
    std::visit(overloaded{
                   [&](const Hadamard& h) { apply_single(s, h.qubit, hadamard_matrix()); },
                   [&](const SingleQubitUnitary& u) { apply_single(s, u.qubit, u.u); },
                   [&](const ControlledUnitary& cu) { apply_matrix(a, n, cu.targets, cu.u, cu.control); },
                   [&](const ControlledPhase& cp) {
                       const double angle = (cp.adjoint ? -2.0 : 2.0) * std::numbers::pi / std::ldexp(1.0, cp.k);
                       const cplx ph = std::exp(cplx(0.0, angle));
                       const Index both = mask_of(cp.control, n) | mask_of(cp.target, n);
                       for (Index i = 0; i < (Index{1} << n); ++i)
                           if ((i & both) == both) a(static_cast<Eigen::Index>(i)) *= ph;
                   },
                   [&](const Cnot& c) {
                       const Index cm = mask_of(c.control, n), tm = mask_of(c.target, n);
                       for (Index i = 0; i < (Index{1} << n); ++i)
                           if ((i & cm) && !(i & tm))
                               std::swap(a(static_cast<Eigen::Index>(i)), a(static_cast<Eigen::Index>(i | tm)));
                   },
                   [&](const Swap& sw) {
                       const Index am = mask_of(sw.a, n), bm = mask_of(sw.b, n);
                       for (Index i = 0; i < (Index{1} << n); ++i)
                           if ((i & am) && !(i & bm))
                               std::swap(a(static_cast<Eigen::Index>(i)), a(static_cast<Eigen::Index>((i & ~am) | bm)));
                   },
               },
               g);
}

Circuit expand_for_noise(const Circuit& c) {
    Circuit out(c.n_qubits());
    for (const auto& [name, r] : c.registers()) out.add_register(name, r);
    for (const auto& g : c.gates()) {
        if (const auto* cu = std::get_if<ControlledUnitary>(&g)) {
            append_synthesized(out, decompose_controlled_unitary(cu->u, static_cast<int>(cu->targets.size())),
                               cu->control, cu->targets);
        } else if (const auto* cp = std::get_if<ControlledPhase>(&g)) {
            const double angle = (cp->adjoint ? -2.0 : 2.0) * std::numbers::pi / std::ldexp(1.0, cp->k);
            append_synthesized(out, decompose_controlled_unitary(phase_matrix(angle), 1), cp->control, {cp->target});
        } else if (const auto* sw = std::get_if<Swap>(&g)) {
            out.add(Cnot{sw->a, sw->b});
            out.add(Cnot{sw->b, sw->a});
            out.add(Cnot{sw->a, sw->b});
        } else {
            out.add(g);
        }
    }
    return out;
}

StateVector run_trajectory(const Circuit& native, const StateVector& input, double p, Rng& rng) {
    if (input.n_qubits() != native.n_qubits()) throw ValidationError("run_trajectory: qubit count mismatch");
    StateVector s = input;
    for (const auto& g : native.gates()) {
        apply_gate(s, g);
        if (p > 0.0 && is_entangling(g) && uniform01(rng) < p) {
            for (int q : qubits_of(g)) {
                const int which = static_cast<int>(rng() >> 62);  // uniform over {I, X, Y, Z}
                if (which != 0) apply_single(s, q, pauli_matrix(which));
            }
        }
    }
    return s;
}

StateVector run_circuit(const Circuit& c, const StateVector& input, const std::optional<NoiseModel>& noise) {
    if (input.n_qubits() != c.n_qubits()) {
        std::ostringstream os;
        os << "run_circuit: input has " << input.n_qubits() << " qubits, circuit has " << c.n_qubits();
        throw ValidationError(os.str());
    }
    if (!noise) {
        StateVector s = input;
        for (const auto& g : c.gates()) apply_gate(s, g);
        return s;
    }
    noise->validate();
    Rng rng(noise->seed);
    return run_trajectory(expand_for_noise(c), input, noise->two_qubit_depolarizing_p, rng);
}

std::vector<double> register_probabilities(const StateVector& s, const Register& reg) {
    if (reg.width < 1 || reg.first < 0 || reg.end() > s.n_qubits()) throw ValidationError("register out of range");
    std::vector<double> probs(std::size_t{1} << reg.width, 0.0);
    for (Eigen::Index i = 0; i < s.dim(); ++i)
        probs[register_value(static_cast<Index>(i), reg, s.n_qubits())] += std::norm(s[i]);
    return probs;
}

Projection project_register(const StateVector& s, const Register& reg, const std::string& bits) {
    if (static_cast<int>(bits.size()) != reg.width) {
        std::ostringstream os;
        os << "project_register: bitstring '" << bits << "' does not match register width " << reg.width;
        throw ValidationError(os.str());
    }
    if (reg.first < 0 || reg.end() > s.n_qubits()) throw ValidationError("project_register: register out of range");
    if (reg.width == s.n_qubits()) throw ValidationError("project_register: nothing left after projection");
    const Index want = parse_bitstring(bits);
    const int n = s.n_qubits();
    const int rest = n - reg.width;
    ComplexVector kept = ComplexVector::Zero(Eigen::Index{1} << rest);
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        const auto idx = static_cast<Index>(i);
        if (register_value(idx, reg, n) != want) continue;
        Index r = 0;
        for (int q = 0; q < n; ++q)
            if (!reg.contains(q)) r = (r << 1U) | static_cast<Index>(bit_of(idx, q, n));
        kept(static_cast<Eigen::Index>(r)) = s[i];
    }
    const double prob = kept.squaredNorm();
    if (prob < kMinProjectionProbability) {
        std::ostringstream os;
        os << "project_register: outcome '" << bits << "' has probability " << prob
           << "; the target bitstring does not match any eigenphase";
        throw DegenerateProjectionError(os.str());
    }
    return {StateVector::normalized(std::move(kept)), std::min(prob, 1.0)};
}

Eigen::Matrix2cd x_basis() { return hadamard_matrix(); }

Eigen::Matrix2cd y_basis() {
    // S H maps |0> to (|0> + i|1>)/sqrt2.
    return phase_matrix(std::numbers::pi / 2.0) * hadamard_matrix();
}

std::vector<std::uint64_t> sample_indices(const std::vector<double>& probs, std::uint64_t count, Rng& rng) {
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += std::max(probs[k], 0.0);
        cdf[k] = acc;
    }
    if (!(acc > 0.0)) throw NumericalError("sample_indices: distribution has no mass");
    std::vector<std::uint64_t> out(count);
    for (auto& o : out) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) {
            // u rounded up to the total mass; fall back to the last populated bin.
            --it;
            while (it != cdf.begin() && probs[static_cast<std::size_t>(it - cdf.begin())] <= 0.0) --it;
        }
        o = static_cast<std::uint64_t>(it - cdf.begin());
    }
    return out;
}

ShotHistogram sample_shots(const StateVector& s, const Register& reg, const BasisRotation& basis, std::uint64_t shots,
                           std::uint64_t seed, std::string basis_label) {
    if (shots < 1) throw ValidationError("sample_shots: need at least one shot");
    if (!basis.empty() && static_cast<int>(basis.size()) != reg.width)
        throw ValidationError("sample_shots: basis rotation must list one entry per register qubit");
    StateVector rotated = s;
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (basis[k]) apply_single(rotated, reg.first + static_cast<int>(k), basis[k]->adjoint());
    const auto probs = register_probabilities(rotated, reg);
    Rng rng(seed);
    ShotHistogram h;
    h.basis = std::move(basis_label);
    h.total = shots;
    for (auto idx : sample_indices(probs, shots, rng)) ++h.counts[to_bitstring(idx, reg.width)];
    return h;
}

std::vector<double> average_distribution(const Circuit& native, const StateVector& input, double p,
                                         std::uint64_t trajectories, std::uint64_t seed) {
    if (trajectories < 1) throw ValidationError("average_distribution: need at least one trajectory");
    std::vector<double> mean(static_cast<std::size_t>(input.dim()), 0.0);
    for (std::uint64_t t = 0; t < trajectories; ++t) {
        Rng rng = make_stream(seed, t);
        const StateVector out = run_trajectory(native, input, p, rng);
        for (Eigen::Index i = 0; i < out.dim(); ++i) mean[static_cast<std::size_t>(i)] += std::norm(out[i]);
    }
    for (double& m : mean) m /= static_cast<double>(trajectories);
    return mean;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("total_variation: size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return 0.5 * s;
}

double tv_to_uniform(const std::vector<double>& probs) {
    return total_variation(probs, std::vector<double>(probs.size(), 1.0 / static_cast<double>(probs.size())));
}

std::vector<double> histogram_distribution(const ShotHistogram& h, int width) {
    std::vector<double> d(std::size_t{1} << width, 0.0);
    for (const auto& [label, count] : h.counts)
        d[parse_bitstring(label)] = static_cast<double>(count) / static_cast<double>(h.total);
    return d;
}

}  // namespace qhjm::qsim
