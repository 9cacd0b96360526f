#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aqclab/ec3.hpp"
#include "aqclab/integrator.hpp"
#include "aqclab/paths.hpp"
#include "aqclab/spectra.hpp"

// Experiment orchestration: runtime searches against the E(T)/Omega = 1/2
// success criterion, final-energy sweeps, gap reports, and scaling studies
// with quartile statistics, all emitted as deterministic CSV files plus a
// JSON manifest. Identical configs produce byte-identical outputs.

namespace aqclab::lab {

enum class Algorithm { X, Xyz, Xy, Ising };
enum class PathKind { Straight, Nonlinear, ClauseByClause };

std::string to_string(Algorithm a);
std::string to_string(PathKind k);

struct PathDescriptor {
    Algorithm algorithm = Algorithm::Xy;
    PathKind kind = PathKind::Straight;
    double alpha = 8.0;                             // nonlinear coupling
    std::optional<Clause> removed_clause;           // nonlinear bump choice
    std::optional<std::vector<int>> clause_order;   // 1-based clause positions
    std::string label;                              // derived when empty
};

struct InstanceSource {
    std::string file;                  // takes precedence when non-empty
    std::optional<int> n;
    std::optional<std::uint64_t> seed;
};

struct RuntimeSearchParams {
    double t_start = 1.0;   // first probed Omega*T
    double growth = 2.0;    // exponential bracketing factor
    double rel_tol = 0.05;  // bisection stops at (hi-lo)/hi <= rel_tol
    double t_cap = 4096.0;  // probes beyond this report a censored result
};

struct RunConfig {
    InstanceSource instance;
    PathDescriptor path;
    std::vector<PathDescriptor> compare_paths;  // extra variants for gap/sweeps
    double omega = 1.0;
    EvolutionSpec integrator;
    RuntimeSearchParams search;
    double evolve_time = 10.0;       // T for the single-evolution command
    long output_every = 100;         // time-series sampling stride, in steps
    std::vector<double> t_list;      // runtimes for energy-vs-runtime sweeps
    std::vector<int> scaling_n;
    int instances_per_n = 10;
    bool censored_excluded = false;  // drop censored runs from quartiles
    int gap_grid = 101;
    std::string sector_policy = "auto";  // auto | full | <integer weight>
    bool scan_hamming = false;           // try every Hamming sector
    std::string output_dir = "out";
    std::uint64_t master_seed = 1;
    int threads = 0;  // 0 keeps the OpenMP default; AQCLAB_THREADS overrides
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Number of worker threads after applying the AQCLAB_THREADS override;
// applies it to OpenMP as a side effect.
int resolve_threads(int config_threads);

struct PreparedRun {
    std::optional<Ec3Instance> instance;
    std::string instance_file;  // persisted location (empty for Ising)
    SqhOperator initial_op = SqhOperator::zero(1);
    SqhOperator final_op = SqhOperator::zero(1);
    Path path;
    StateVector initial_state;
    std::optional<int> sector;   // conserved Hamming weight, when applicable
    std::vector<std::uint64_t> solutions;
    double ground_energy = 0.0;  // of final_op
    double omega = 1.0;
    std::string label;
};

// Resolves the instance (generating and persisting it if needed), builds the
// path and the initial state for the descriptor's algorithm. forced_sector
// replaces the solution-derived Hamming sector (the scan-hamming loop).
PreparedRun prepare_run(const RunConfig& config, const PathDescriptor& desc,
                        std::optional<int> forced_sector = std::nullopt);

struct ProbeResult {
    double t = 0.0;       // Omega*T
    double energy = 0.0;  // final energy above the ground energy, units Omega
    double p1 = 0.0;      // ground-space occupation
    double leakage = 0.0; // probability outside the conserved sector (or 0)
    long steps = 0;
};

// One fresh evolution over [0, T] followed by measurement on a normalized
// copy of the final state. Also verifies the energy lower bound
// E >= Omega(1 - P1) - 1e-9.
ProbeResult probe_at(const PreparedRun& run, const RunConfig& config, double t,
                     std::uint64_t* checksum = nullptr);

struct RuntimeSearchResult {
    bool censored = false;
    double t_success = 0.0;
    double t_fail = 0.0;  // certified failing bracket end (0 if none found)
    double energy = 0.0;
    double p1 = 0.0;
    std::uint64_t state_checksum = 0;
    long total_steps = 0;
    std::vector<ProbeResult> probes;  // every probe taken, sorted by t
};

// Exponential bracketing from t_start, then bisection to the relative width
// in the search parameters. Every probe is a fresh constant-speed evolution.
RuntimeSearchResult successful_runtime(const PreparedRun& run, const RunConfig& config);

struct QuartileSummary {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
};

// Inclusive (linear interpolation between order statistics) quantiles.
QuartileSummary quartiles(std::vector<double> values);

// Experiment entry points; each writes CSV files plus the run manifest under
// config.output_dir and returns the file list.
std::vector<std::string> run_evolve(const RunConfig& config);
std::vector<std::string> run_runtime(const RunConfig& config);
std::vector<std::string> run_gap(const RunConfig& config);
std::vector<std::string> run_scaling(const RunConfig& config);

// Gap curve for one prepared run, honoring the sector policy; Ising curves
// are evaluated in the spin-flip-even sector via a parity penalty.
GapCurve gap_for(const PreparedRun& run, const RunConfig& config,
                 std::span<const double> grid);

std::uint64_t fnv1a(const void* data, std::size_t size);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t instance_seed(std::uint64_t master, int n, int index);

}  // namespace aqclab::lab
