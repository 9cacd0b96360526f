#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

// State vectors over the computational basis and Hamming-weight sector
// bookkeeping. A basis index z encodes qubit q (1-based) in bit q-1,
// i.e. z = sum_q z_q 2^{q-1}.

namespace aqclab {

using cplx = std::complex<double>;

class SqhOperator;  // pauli.hpp

// 2^n amplitudes beyond this many qubits are refused unless the caller
// raises the cap explicitly (26 qubits = 1 GiB of complex doubles).
inline constexpr int kDefaultQubitCap = 26;

struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amplitudes;

    static StateVector zero(int n_qubits, int qubit_cap = kDefaultQubitCap);

    std::uint64_t dim() const { return std::uint64_t{1} << n_qubits; }
    double norm_sq() const;

    // Throws validation_error when |1 - norm^2| exceeds the tolerance.
    void require_normalized(double tolerance = 1e-9) const;
};

// Sorted basis indices of fixed Hamming weight; the eigenspace structure of
// the total spin-flip operator.
struct SectorMap {
    int n_qubits = 0;
    int weight = 0;
    std::vector<std::uint64_t> indices;

    std::uint64_t dim() const { return indices.size(); }
    // Position of z within the sector, or -1 if popcount(z) != weight.
    std::int64_t rank(std::uint64_t z) const;
};

std::uint64_t binomial(int n, int k);

// |S> = 2^{-n/2} sum_z |z>.
StateVector uniform_superposition(int n_qubits, int qubit_cap = kDefaultQubitCap);

// Balanced superposition of all basis states of Hamming weight `weight`.
StateVector dicke_state(int n_qubits, int weight, int qubit_cap = kDefaultQubitCap);

SectorMap sector_map(int n_qubits, int weight);

// Re<psi|H|psi>. The imaginary residual must stay below imag_tolerance
// (Hermiticity check) and is discarded.
double energy_expectation(const StateVector& psi, const SqhOperator& op,
                          double norm_tolerance = 1e-9,
                          double imag_tolerance = 1e-9);

// |<w|psi>|^2.
double solution_overlap(const StateVector& psi, std::uint64_t w);

// Probability mass outside the Hamming-weight sector `weight`.
double sector_leakage(const StateVector& psi, int weight);

// Probability mass inside each Hamming sector, indexed by weight 0..n.
std::vector<double> sector_probabilities(const StateVector& psi);

// Total spin-flip operator Sigma^z = sum_i (1 - sigma^z_i)/2, whose
// eigenvalue on |z> is the Hamming weight of z.
SqhOperator total_flip_operator(int n_qubits);

// Binary dump: 16-byte header (magic "SQHSTATE", u32 n, u32 reserved), then
// 2^{n+1} little-endian doubles, interleaved re/im. Used for checkpointing.
void save_state(const StateVector& psi, const std::string& path);
StateVector load_state(const std::string& path, int qubit_cap = kDefaultQubitCap);

}  // namespace aqclab
