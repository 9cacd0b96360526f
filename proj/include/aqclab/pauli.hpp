#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Sparse quantum Hamiltonian (SQH) representation: an n-qubit operator stored
// as a real energy shift plus a list of real-weighted Pauli products. Storage
// is proportional to the number of terms, never to the 2^n matrix dimension,
// and application to a state vector costs O(2^n * total factor count).

namespace aqclab {

using cplx = std::complex<double>;

struct StateVector;  // state.hpp

enum class PauliAxis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char axis_char(PauliAxis axis);

struct PauliFactor {
    int qubit;  // 1-based; qubit q maps to bit q-1 of a basis index
    PauliAxis axis;

    friend auto operator<=>(const PauliFactor&, const PauliFactor&) = default;
};

// One weighted Pauli product. Factors are sorted by qubit index and strictly
// increasing; the identity is never stored as a factor (a pure-identity
// contribution belongs in the operator shift). Weights are real, which keeps
// every representable operator Hermitian.
class SqhTerm {
  public:
    SqhTerm(double weight, std::vector<PauliFactor> factors);

    double weight() const { return weight_; }
    const std::vector<PauliFactor>& factors() const { return factors_; }
    int max_qubit() const { return factors_.back().qubit; }

    // Precomputed bit masks for fast application:
    //   X, Y flip the addressed bit; Y, Z pick up a bit-dependent phase.
    std::uint64_t flip_mask() const { return flip_mask_; }
    std::uint64_t phase_mask() const { return phase_mask_; }
    int phase_base() const { return phase_base_; }  // number of Y factors mod 4

    SqhTerm with_weight(double w) const { return SqhTerm(w, factors_); }

  private:
    double weight_;
    std::vector<PauliFactor> factors_;
    std::uint64_t flip_mask_ = 0;
    std::uint64_t phase_mask_ = 0;
    int phase_base_ = 0;
};

// Result of applying a Pauli product to a computational basis state:
// P|z> = i^phase_exponent |index>. The phase lives in the exact four-element
// group {+1, +i, -1, -i}; it is materialized as a complex only on request.
struct TermImage {
    std::uint64_t index;
    int phase_exponent;  // in {0, 1, 2, 3}

    cplx phase() const {
        static constexpr double re[4] = {1.0, 0.0, -1.0, 0.0};
        static constexpr double im[4] = {0.0, 1.0, 0.0, -1.0};
        return {re[phase_exponent & 3], im[phase_exponent & 3]};
    }
};

TermImage apply_term(const SqhTerm& term, std::uint64_t z, int n_qubits);

// Hermitian n-qubit operator in SQH form. Construction canonicalizes:
// factors ascending within each term, terms sorted lexicographically by
// factor list, duplicates merged by summing weights, zero-weight terms
// dropped. Immutable afterwards and safe for concurrent shared reads.
class SqhOperator {
  public:
    SqhOperator(int n_qubits, double shift, std::vector<SqhTerm> terms,
                double drop_tolerance = 0.0);

    // n-qubit zero operator (shift 0, no terms).
    static SqhOperator zero(int n_qubits) { return SqhOperator(n_qubits, 0.0, {}); }

    int n_qubits() const { return n_qubits_; }
    double shift() const { return shift_; }
    const std::vector<SqhTerm>& terms() const { return terms_; }

    // |shift| + sum of |weight|: an upper bound on the spectral radius, used
    // for integrator step-size selection.
    double spectral_bound() const;

    bool operator==(const SqhOperator& other) const;

  private:
    int n_qubits_;
    double shift_;
    std::vector<SqhTerm> terms_;
};

struct WeightedOperator {
    double coefficient;
    const SqhOperator* op;
};

// Core matrix-free kernel: out[y] = sum_p c_p * (H_p in)[y], accumulated
// term-major in a fixed order per output index, so the result is bit-exact
// independent of the number of threads. With times_minus_i the whole sum is
// multiplied by -i (the Schroedinger right-hand side).
void accumulate_weighted(std::span<const WeightedOperator> parts,
                         const StateVector& in, StateVector& out,
                         bool times_minus_i = false);

// phi = H psi via the OpenMP gather kernel.
StateVector matvec(const SqhOperator& op, const StateVector& psi);

// Same kernel over raw coefficient spans of length 2^n (no StateVector
// wrapper); used by the iterative eigensolver.
void matvec_into(const SqhOperator& op, std::span<const cplx> in, std::span<cplx> out);

// Reference implementation: scatter formulation, single-threaded, kept as an
// independent check of the parallel kernel.
StateVector matvec_serial(const SqhOperator& op, const StateVector& psi);

// sum_k coefficient_k * op_k with like terms merged; terms whose combined
// |weight| falls below 1e-15 are dropped.
SqhOperator linear_combine(std::span<const std::pair<double, const SqhOperator*>> parts);
SqhOperator linear_combine(std::initializer_list<std::pair<double, const SqhOperator*>> parts);

SqhOperator scaled(const SqhOperator& op, double factor);

// Textual dump, one line "shift <value>" then one canonical line per term
// "<weight> <q>:<axis> ...". Weights use shortest round-trip formatting, so
// parse(emit(op)) reproduces the operator bit-exactly.
std::string emit_operator(const SqhOperator& op);
SqhOperator parse_operator(std::string_view text, int n_qubits);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

}  // namespace aqclab
