#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>

#include "aqclab/paths.hpp"
#include "aqclab/state.hpp"

// Fixed-step propagation of i d/dt |psi> = H(t)|psi> (hbar = 1, energies in
// units of Omega, time in units of 1/Omega) along a path traversed at
// constant speed s = t/T. Fourth-order Adams-Bashforth predictor with an
// Adams-Moulton corrector; the derivative evaluated at the predicted point is
// kept as the step's history entry, so each step past the bootstrap costs a
// single H|psi> application. The first three steps of every smooth segment
// use classical Runge-Kutta to build the multistep history.

namespace aqclab {

struct TimeDependentHamiltonian {
    Path path;
    double total_time = 0.0;  // T
};

struct EvolutionSpec {
    double dt = 0.0;             // requested step; 0 selects default_time_step
    double norm_tolerance = 1e-6;
    bool renormalize = false;    // rescale instead of failing on norm drift
    long checkpoint_every = 0;   // steps between checkpoints; 0 disables
    std::string checkpoint_prefix;
};

struct EvolveDiagnostics {
    long steps = 0;
    long rhs_evaluations = 0;
    long restarts = 0;        // multistep re-bootstraps at envelope breakpoints
    double dt = 0.0;          // largest step actually used
    double norm_drift = 0.0;  // |1 - norm^2| of the returned state
    double wall_seconds = 0.0;
};

// Called with (step index, time, state); never invoked concurrently.
using EvolveObserver = std::function<void(long, double, const StateVector&)>;

// -i H(t) psi with every envelope evaluated at s = t/T, fused into a single
// pass over the amplitudes.
StateVector rhs(const TimeDependentHamiltonian& h, const StateVector& psi, double t);

// min(1e-2, 0.05 / E_max), where E_max bounds the spectral radius of H(s)
// over s in {0, 1/2, 1}.
double default_time_step(const TimeDependentHamiltonian& h);

// Multistep state frozen mid-run; resuming reproduces the uninterrupted
// trajectory bit for bit.
struct Checkpoint {
    double t = 0.0;
    long global_step = 0;
    int segment = 0;
    long step_in_segment = 0;
    double h = 0.0;
    StateVector psi;
    std::array<StateVector, 4> history;  // derivative history, oldest first
};

void save_checkpoint(const Checkpoint& cp, const std::string& prefix);
Checkpoint load_checkpoint(const std::string& prefix);

std::pair<StateVector, EvolveDiagnostics> evolve(
    const StateVector& psi0, const TimeDependentHamiltonian& h,
    const EvolutionSpec& spec, const EvolveObserver& observer = {},
    long observe_every = 0, const Checkpoint* resume = nullptr);

}  // namespace aqclab
