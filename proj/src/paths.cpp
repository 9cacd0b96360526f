#include "aqclab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aqclab/errors.hpp"

namespace aqclab {

double Envelope::operator()(double s) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::OneMinusS: return 1.0 - s;
        case Kind::S: return s;
        case Kind::Bump: return value * s * (1.0 - s);
        case Kind::ClauseRamp: {
            const double sk = m * s - k + 1;  // secondary interpolation variable
            return std::clamp(sk, 0.0, 1.0);
        }
    }
    return 0.0;
}

bool Envelope::ramp_active(double s) const {
    if (kind != Kind::ClauseRamp) return false;
    const double sk = m * s - k + 1;
    return sk >= 0.0 && sk < 1.0;
}

Envelope Envelope::clause_ramp(int k, int m) {
    if (m < 1 || k < 1 || k > m)
        throw validation_error("Envelope: clause ramp needs 1 <= k <= m");
    return {Kind::ClauseRamp, 0.0, k, m};
}

int Path::n_qubits() const {
    if (parts.empty())
        throw validation_error("Path: no parts");
    return parts.front().op.n_qubits();
}

SqhOperator hamiltonian_at(const Path& path, double s) {
    if (!(s >= 0.0 && s <= 1.0))
        throw validation_error("hamiltonian_at: s must lie in [0, 1]");
    std::vector<std::pair<double, const SqhOperator*>> combo;
    combo.reserve(path.parts.size());
    for (const auto& part : path.parts) combo.emplace_back(part.envelope(s), &part.op);
    return linear_combine(combo);
}

SqhOperator h_x_initial(const Ec3Instance& inst, double omega) {
    const InstanceStats stats = instance_stats(inst);
    double shift = 0.0;
    std::vector<SqhTerm> terms;
    for (int i = 1; i <= inst.n; ++i) {
        const int ni = stats.per_bit[i - 1];
        if (ni == 0) continue;
        shift += 0.5 * omega * ni;
        terms.emplace_back(-0.5 * omega * ni, std::vector<PauliFactor>{{i, PauliAxis::X}});
    }
    return SqhOperator(inst.n, shift, std::move(terms));
}

SqhOperator h_xyz_initial(const Ec3Instance& inst, double omega) {
    const InstanceStats stats = instance_stats(inst);
    double shift = 0.0;
    std::vector<SqhTerm> terms;
    for (int i = 1; i <= inst.n; ++i)
        for (int j = i + 1; j <= inst.n; ++j) {
            const int nij = stats.pair_count(i, j);
            if (nij == 0) continue;
            const double w = 0.5 * omega * nij;
            shift += w;
            for (const PauliAxis axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z})
                terms.emplace_back(-w, std::vector<PauliFactor>{{i, axis}, {j, axis}});
        }
    return SqhOperator(inst.n, shift, std::move(terms));
}

SqhOperator h_xy_initial(const Ec3Instance& inst, double omega) {
    const InstanceStats stats = instance_stats(inst);
    std::vector<SqhTerm> terms;
    for (int i = 1; i <= inst.n; ++i)
        for (int j = i + 1; j <= inst.n; ++j) {
            const int nij = stats.pair_count(i, j);
            if (nij == 0) continue;
            const double w = 0.5 * omega * nij;
            for (const PauliAxis axis : {PauliAxis::X, PauliAxis::Y})
                terms.emplace_back(-w, std::vector<PauliFactor>{{i, axis}, {j, axis}});
        }
    return SqhOperator(inst.n, 3.0 * stats.m * omega, std::move(terms));
}

Path ising_path(int n_qubits, double omega) {
    if (n_qubits < 3)
        throw validation_error("ising_path: periodic ring needs n >= 3");
    std::vector<SqhTerm> x_terms, zz_terms;
    for (int i = 1; i <= n_qubits; ++i) {
        x_terms.emplace_back(-omega, std::vector<PauliFactor>{{i, PauliAxis::X}});
        const int j = i == n_qubits ? 1 : i + 1;  // wraparound
        zz_terms.emplace_back(-omega, std::vector<PauliFactor>{{std::min(i, j), PauliAxis::Z},
                                                               {std::max(i, j), PauliAxis::Z}});
    }
    Path path;
    path.label = "ising";
    path.parts.push_back({Envelope::one_minus_s(), SqhOperator(n_qubits, 0.0, std::move(x_terms))});
    path.parts.push_back({Envelope::s(), SqhOperator(n_qubits, 0.0, std::move(zz_terms))});
    return path;
}

Path straight_line_path(SqhOperator initial, SqhOperator final_op, std::string label) {
    if (initial.n_qubits() != final_op.n_qubits())
        throw validation_error("straight_line_path: qubit count mismatch");
    Path path;
    path.label = std::move(label);
    path.parts.push_back({Envelope::one_minus_s(), std::move(initial)});
    path.parts.push_back({Envelope::s(), std::move(final_op)});
    return path;
}

Path nonlinear_smooth_path(SqhOperator initial, const Ec3Instance& inst,
                           const Clause& removed, double alpha, double omega,
                           std::string label) {
    const auto removable = removable_clauses(inst);
    if (std::find(removable.begin(), removable.end(), removed) == removable.end())
        throw validation_error("nonlinear_smooth_path: clause is not removable");
    Ec3Instance reduced;
    reduced.n = inst.n;
    for (const auto& c : inst.clauses)
        if (!(c == removed)) reduced.clauses.push_back(c);

    Path path = straight_line_path(std::move(initial), final_hamiltonian(inst, omega),
                                   std::move(label));
    path.parts.push_back({Envelope::bump(alpha), final_hamiltonian(reduced, omega)});
    return path;
}

Path clause_by_clause_path(SqhOperator initial, const Ec3Instance& inst,
                           double omega, std::span<const int> order,
                           std::string label) {
    inst.validate();
    const int m = inst.m();
    if (m < 1)
        throw validation_error("clause_by_clause_path: instance has no clauses");
    std::vector<int> perm(order.begin(), order.end());
    std::vector<int> check = perm;
    std::sort(check.begin(), check.end());
    std::vector<int> want(m);
    std::iota(want.begin(), want.end(), 0);
    if (check != want)
        throw validation_error("clause_by_clause_path: order is not a permutation of clause positions");

    Path path = straight_line_path(std::move(initial), final_hamiltonian(inst, omega),
                                   std::move(label));
    const int n = inst.n;

    // Deviation term: with cumulative sums H_j of the first j ordered clause
    // penalties (H_0 = H_m = 0), segment k of s carries (1-s_k) H_{k-1}
    // + s_k H_k. Saturating per-clause ramps reproduce every segment, and a
    // final negated H_{m-1} ramp returns the deviation to zero at s = 1.
    std::vector<std::pair<double, const SqhOperator*>> cumulative;
    std::vector<SqhOperator> penalties;
    penalties.reserve(m);
    for (int j = 0; j < m - 1; ++j) {
        penalties.push_back(clause_penalty(inst.clauses[perm[j]], n, omega));
        path.parts.push_back({Envelope::clause_ramp(j + 1, m), penalties.back()});
    }
    if (m > 1) {
        for (const auto& p : penalties) cumulative.emplace_back(-1.0, &p);
        path.parts.push_back({Envelope::clause_ramp(m, m), linear_combine(cumulative)});
    }
    for (int k = 1; k < m; ++k)
        path.breakpoints.push_back(static_cast<double>(k) / m);
    return path;
}

SqhOperator flip_symmetry_penalty(int n_qubits, double mu) {
    std::vector<PauliFactor> factors;
    factors.reserve(n_qubits);
    for (int q = 1; q <= n_qubits; ++q) factors.push_back({q, PauliAxis::X});
    return SqhOperator(n_qubits, 0.0, {SqhTerm(-mu, std::move(factors))});
}

}  // namespace aqclab
