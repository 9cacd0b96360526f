#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// 3-bit exact cover instances: a clause over three distinct bits is satisfied
// iff exactly one of them is 1. Includes the penalty-Hamiltonian encoding,
// brute-force solution counting, and a hard-instance generator targeting the
// satisfiability phase transition near m = 2n/3 with a unique solution.

namespace aqclab {

class SqhOperator;  // pauli.hpp

struct Clause {
    std::array<int, 3> bits;  // ascending, distinct, 1-based

    Clause(int a, int b, int c);

    std::uint64_t mask() const;
    friend auto operator<=>(const Clause&, const Clause&) = default;
};

struct Ec3Instance {
    int n = 0;
    std::vector<Clause> clauses;
    std::optional<std::uint64_t> known_solution;

    int m() const { return static_cast<int>(clauses.size()); }
    // Checks bit ranges and pairwise-distinct clauses.
    void validate() const;
};

struct InstanceStats {
    int n = 0;
    int m = 0;
    std::vector<int> per_bit;    // n_i, indexed by bit-1
    std::vector<int> per_pair;   // n_ij, flattened upper triangle

    int pair_count(int i, int j) const;  // 1-based, i != j
    int max_pair_count() const;
};

bool clause_satisfied(const Clause& clause, std::uint64_t z);

// Number of assignments satisfying every clause. With a cap the scan stops
// early once the cap is reached, so a return value equal to the cap means
// "at least cap". Exhaustive mode is limited to n <= 30.
long long count_solutions(const Ec3Instance& inst,
                          std::optional<long long> cap = std::nullopt);

// Up to max_count satisfying assignments, ascending.
std::vector<std::uint64_t> find_solutions(const Ec3Instance& inst, std::size_t max_count);

InstanceStats instance_stats(const Ec3Instance& inst);

// Penalty Hamiltonian: Omega*m - Omega sum_i (n_i/2) sigma^z_i
// + Omega sum_{i<j} (n_ij/2) sigma^z_i sigma^z_j. Diagonal; the entry at z is
// Omega * sum_c (1 - bitsum_c(z))^2, zero exactly on solutions.
SqhOperator final_hamiltonian(const Ec3Instance& inst, double omega);

// Single-clause penalty Omega * h_c as an operator on n qubits.
SqhOperator clause_penalty(const Clause& clause, int n_qubits, double omega);

// True when every bit 1..n appears in at least one clause.
bool covers_all_bits(const Ec3Instance& inst);

// True when the clause hypergraph is connected over the bits it touches.
bool hypergraph_connected(const Ec3Instance& inst);

// Clauses whose removal keeps the remaining hypergraph connected and still
// covering all n bits. Empty for m < 2.
std::vector<Clause> removable_clauses(const Ec3Instance& inst);

// Random hard instance: unique satisfying assignment, connected hypergraph
// covering all bits, every bit pair shared by at most one clause, and at most
// ceil(2n/3)+2 clauses. Deterministic for fixed (n, seed); restarts until the
// construction succeeds or the budget runs out.
Ec3Instance generate_hard_instance(int n, std::uint64_t seed, long max_restarts = 10000);

// Text format: "ec3 <n> <m>", optional "solution <z>", then m lines
// "<i> <j> <k>" with ascending indices.
std::string emit_instance(const Ec3Instance& inst);
Ec3Instance parse_instance(std::string_view text);
void save_instance(const Ec3Instance& inst, const std::string& path);
Ec3Instance load_instance(const std::string& path);

}  // namespace aqclab
