#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqclab/ec3.hpp"
#include "aqclab/pauli.hpp"

// Time-dependent Hamiltonians as lists of (scalar envelope, static operator)
// pairs over the interpolation parameter s in [0, 1]: the straight line,
// the quadratic bump with a clause-reduced penalty, and the clause-by-clause
// schedule that switches the penalties on one segment at a time.

namespace aqclab {

struct Envelope {
    enum class Kind { Constant, OneMinusS, S, Bump, ClauseRamp };

    Kind kind = Kind::Constant;
    double value = 1.0;  // the constant c, or the bump coupling alpha
    int k = 0, m = 0;    // clause-ramp segment index and segment count

    double operator()(double s) const;

    // True while s lies inside this ramp's own segment [(k-1)/m, k/m).
    bool ramp_active(double s) const;

    static Envelope constant(double c) { return {Kind::Constant, c, 0, 0}; }
    static Envelope one_minus_s() { return {Kind::OneMinusS, 0.0, 0, 0}; }
    static Envelope s() { return {Kind::S, 0.0, 0, 0}; }
    static Envelope bump(double alpha) { return {Kind::Bump, alpha, 0, 0}; }
    static Envelope clause_ramp(int k, int m);
};

struct PathPart {
    Envelope envelope;
    SqhOperator op;
};

struct Path {
    std::vector<PathPart> parts;
    std::string label;
    std::optional<int> conserved_sector;  // Hamming weight preserved by every part
    // Interior s values where envelope slopes jump; the integrator restarts
    // its multistep history there.
    std::vector<double> breakpoints;

    int n_qubits() const;
};

// H(s) via linear combination of the parts at s. s must lie in [0, 1].
SqhOperator hamiltonian_at(const Path& path, double s);

// Omega sum_i (n_i/2)(1 - sigma^x_i); ground state |S> at energy 0.
SqhOperator h_x_initial(const Ec3Instance& inst, double omega);

// Heisenberg ferromagnet Omega sum_{i<j} (n_ij/2)(1 - sigma_i . sigma_j);
// ground state in each Hamming sector is the Dicke state, at energy 0.
SqhOperator h_xyz_initial(const Ec3Instance& inst, double omega);

// x,y-ferromagnet 3m*Omega - Omega sum_{i<j} (n_ij/2)(xx + yy); ground state
// is found numerically per sector.
SqhOperator h_xy_initial(const Ec3Instance& inst, double omega);

// Transverse-field Ising ring: (1-s)(-Omega sum sigma^x) + s(-Omega sum zz),
// periodic boundary. Benchmark path with no EC3 instance behind it.
Path ising_path(int n_qubits, double omega);

Path straight_line_path(SqhOperator initial, SqhOperator final_op,
                        std::string label = "straight");

// Straight line plus alpha*s(1-s) times the penalty of the instance reduced
// by `removed`, which must be removable (connectivity and coverage survive).
Path nonlinear_smooth_path(SqhOperator initial, const Ec3Instance& inst,
                           const Clause& removed, double alpha, double omega,
                           std::string label = "nonlinear");

// Straight line plus a deviation that ramps clause penalties on one by one
// over m equal segments of s, in the given order (a permutation of clause
// positions, 0-based). H(0) and H(1) equal the straight-line endpoints.
Path clause_by_clause_path(SqhOperator initial, const Ec3Instance& inst,
                           double omega, std::span<const int> order,
                           std::string label = "clause_by_clause");

// -mu * X^{otimes n}: added to a Hamiltonian that commutes with the global
// spin flip, it pushes the odd-parity sector up by 2*mu so that the lowest
// eigenvalues come from the even sector alone.
SqhOperator flip_symmetry_penalty(int n_qubits, double mu);

}  // namespace aqclab
