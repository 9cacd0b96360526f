#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aqclab/paths.hpp"
#include "aqclab/state.hpp"

// Lowest eigenvalues of SQH operators, matrix-free: Lanczos with full
// reorthogonalization and a seeded random start vector, with full dense
// diagonalization as the fallback for small dimensions. Operators can be
// restricted to a Hamming-weight sector; the restricted matvec runs natively
// on sector indices without ever touching the 2^n embedding.

namespace aqclab {

struct EigOptions {
    double tol = 1e-10;              // required residual norm per pair
    int max_iterations = 500;        // Lanczos cap
    std::uint64_t start_seed = 0x51e55eedULL;
    std::uint64_t dense_threshold = 4096;  // full diagonalization at or below
    bool compute_vectors = false;
};

struct EigenResult {
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> residuals;    // ||H v - lambda v|| per pair
    int iterations = 0;
    bool dense = false;
    // Coefficients per eigenvector: full-space amplitudes, or sector
    // coordinates when a sector was requested. Filled when compute_vectors.
    std::vector<std::vector<cplx>> vectors;
};

// k smallest eigenvalues of op, optionally restricted to the Hamming sector.
// The caller guarantees that a sector-restricted operator commutes with the
// total spin flip (checked densely for n <= 6 in debug builds).
EigenResult lowest_eigs(const SqhOperator& op, int k,
                        std::optional<int> sector = std::nullopt,
                        const EigOptions& opts = {});

struct GapCurve {
    std::vector<double> s_grid;
    std::vector<double> e1, e2, gap;
    double min_gap_s = 0.0;
    double min_gap = 0.0;
};

// Lowest two eigenvalues of hamiltonian_at(path, s) across the grid.
GapCurve gap_curve(const Path& path, std::span<const double> s_grid,
                   std::optional<int> sector = std::nullopt,
                   const EigOptions& opts = {});

// Grid argmin of the gap, ties broken toward smaller s.
std::pair<double, double> min_gap(const GapCurve& curve);

// points equally spaced values covering [0, 1] inclusive.
std::vector<double> uniform_grid(int points);

// Scatter sector coordinates back into a full 2^n state vector.
StateVector embed_sector(const SectorMap& map, std::span<const cplx> coeffs,
                         int qubit_cap = kDefaultQubitCap);

}  // namespace aqclab
