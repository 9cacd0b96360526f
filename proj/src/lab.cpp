#include "aqclab/lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aqclab/errors.hpp"

namespace aqclab::lab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::X: return "x";
        case Algorithm::Xyz: return "xyz";
        case Algorithm::Xy: return "xy";
        case Algorithm::Ising: return "ising";
    }
    return "?";
}

std::string to_string(PathKind k) {
    switch (k) {
        case PathKind::Straight: return "straight";
        case PathKind::Nonlinear: return "nonlinear";
        case PathKind::ClauseByClause: return "clause_by_clause";
    }
    return "?";
}

namespace {

Algorithm algorithm_from(const std::string& s) {
    if (s == "x") return Algorithm::X;
    if (s == "xyz") return Algorithm::Xyz;
    if (s == "xy") return Algorithm::Xy;
    if (s == "ising") return Algorithm::Ising;
    throw validation_error("config: unknown algorithm '" + s + "' (x|xyz|xy|ising)");
}

PathKind path_kind_from(const std::string& s) {
    if (s == "straight") return PathKind::Straight;
    if (s == "nonlinear") return PathKind::Nonlinear;
    if (s == "clause_by_clause") return PathKind::ClauseByClause;
    throw validation_error("config: unknown path '" + s +
                           "' (straight|nonlinear|clause_by_clause)");
}

std::string sanitize_label(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
            c = '_';
    return s;
}

std::string derive_label(const PathDescriptor& desc) {
    std::string label = to_string(desc.algorithm);
    if (desc.algorithm != Algorithm::Ising) {
        label += "_" + to_string(desc.kind);
        if (desc.kind == PathKind::Nonlinear) {
            label += "_a" + format_double(desc.alpha);
            if (desc.removed_clause) {
                const auto& b = desc.removed_clause->bits;
                label += "_rm" + std::to_string(b[0]) + "-" + std::to_string(b[1]) +
                         "-" + std::to_string(b[2]);
            }
        }
    }
    return sanitize_label(label);
}

PathDescriptor descriptor_from_json(const json& j, const PathDescriptor& defaults) {
    PathDescriptor desc = defaults;
    if (j.contains("algorithm")) desc.algorithm = algorithm_from(j.at("algorithm"));
    if (j.contains("path")) desc.kind = path_kind_from(j.at("path"));
    if (j.contains("alpha")) desc.alpha = j.at("alpha").get<double>();
    if (j.contains("removed_clause")) {
        const auto v = j.at("removed_clause").get<std::vector<int>>();
        if (v.size() != 3)
            throw validation_error("config: removed_clause must hold three indices");
        desc.removed_clause = Clause(v[0], v[1], v[2]);
    }
    if (j.contains("clause_order"))
        desc.clause_order = j.at("clause_order").get<std::vector<int>>();
    if (j.contains("label")) desc.label = sanitize_label(j.at("label").get<std::string>());
    return desc;
}

json descriptor_to_json(const PathDescriptor& desc) {
    json j;
    j["algorithm"] = to_string(desc.algorithm);
    j["path"] = to_string(desc.kind);
    j["alpha"] = desc.alpha;
    if (desc.removed_clause) {
        const auto& b = desc.removed_clause->bits;
        j["removed_clause"] = {b[0], b[1], b[2]};
    }
    if (desc.clause_order) j["clause_order"] = *desc.clause_order;
    if (!desc.label.empty()) j["label"] = desc.label;
    return j;
}

json config_to_json(const RunConfig& c) {
    json j;
    json inst;
    if (!c.instance.file.empty()) inst["file"] = c.instance.file;
    if (c.instance.n) inst["n"] = *c.instance.n;
    if (c.instance.seed) inst["seed"] = *c.instance.seed;
    j["instance"] = inst;
    const json primary = descriptor_to_json(c.path);
    j.update(primary);
    if (!c.compare_paths.empty()) {
        json arr = json::array();
        for (const auto& d : c.compare_paths) arr.push_back(descriptor_to_json(d));
        j["compare_paths"] = arr;
    }
    j["omega"] = c.omega;
    j["integrator"] = {{"dt", c.integrator.dt},
                       {"norm_tolerance", c.integrator.norm_tolerance},
                       {"renormalize", c.integrator.renormalize},
                       {"checkpoint_every", c.integrator.checkpoint_every},
                       {"checkpoint_prefix", c.integrator.checkpoint_prefix}};
    j["runtime_search"] = {{"t_start", c.search.t_start},
                           {"growth", c.search.growth},
                           {"rel_tol", c.search.rel_tol},
                           {"t_cap", c.search.t_cap}};
    j["evolve_time"] = c.evolve_time;
    j["output_every"] = c.output_every;
    if (!c.t_list.empty()) j["t_list"] = c.t_list;
    if (!c.scaling_n.empty())
        j["scaling"] = {{"n_list", c.scaling_n},
                        {"instances_per_n", c.instances_per_n},
                        {"exclude_censored", c.censored_excluded}};
    j["gap_grid"] = c.gap_grid;
    j["sector"] = c.sector_policy;
    j["scan_hamming"] = c.scan_hamming;
    j["output_dir"] = c.output_dir;
    j["master_seed"] = c.master_seed;
    j["threads"] = c.threads;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig c;
    if (j.contains("instance")) {
        const auto& ji = j.at("instance");
        if (ji.contains("file")) c.instance.file = ji.at("file").get<std::string>();
        if (ji.contains("n")) c.instance.n = ji.at("n").get<int>();
        if (ji.contains("seed")) c.instance.seed = ji.at("seed").get<std::uint64_t>();
    }
    c.path = descriptor_from_json(j, PathDescriptor{});
    if (j.contains("compare_paths"))
        for (const auto& jd : j.at("compare_paths"))
            c.compare_paths.push_back(descriptor_from_json(jd, c.path));
    if (j.contains("omega")) c.omega = j.at("omega").get<double>();
    if (c.omega <= 0.0) throw validation_error("config: omega must be positive");
    if (j.contains("integrator")) {
        const auto& ji = j.at("integrator");
        if (ji.contains("dt")) c.integrator.dt = ji.at("dt").get<double>();
        if (ji.contains("norm_tolerance"))
            c.integrator.norm_tolerance = ji.at("norm_tolerance").get<double>();
        if (ji.contains("renormalize"))
            c.integrator.renormalize = ji.at("renormalize").get<bool>();
        if (ji.contains("checkpoint_every"))
            c.integrator.checkpoint_every = ji.at("checkpoint_every").get<long>();
        if (ji.contains("checkpoint_prefix"))
            c.integrator.checkpoint_prefix = ji.at("checkpoint_prefix").get<std::string>();
    }
    if (j.contains("runtime_search")) {
        const auto& js = j.at("runtime_search");
        if (js.contains("t_start")) c.search.t_start = js.at("t_start").get<double>();
        if (js.contains("growth")) c.search.growth = js.at("growth").get<double>();
        if (js.contains("rel_tol")) c.search.rel_tol = js.at("rel_tol").get<double>();
        if (js.contains("t_cap")) c.search.t_cap = js.at("t_cap").get<double>();
        if (c.search.t_start <= 0 || c.search.growth <= 1.0 || c.search.rel_tol <= 0 ||
            c.search.t_cap < c.search.t_start)
            throw validation_error("config: invalid runtime_search parameters");
    }
    if (j.contains("evolve_time")) c.evolve_time = j.at("evolve_time").get<double>();
    if (j.contains("output_every")) c.output_every = j.at("output_every").get<long>();
    if (j.contains("t_list")) c.t_list = j.at("t_list").get<std::vector<double>>();
    if (j.contains("scaling")) {
        const auto& js = j.at("scaling");
        if (js.contains("n_list")) c.scaling_n = js.at("n_list").get<std::vector<int>>();
        if (js.contains("instances_per_n"))
            c.instances_per_n = js.at("instances_per_n").get<int>();
        if (js.contains("exclude_censored"))
            c.censored_excluded = js.at("exclude_censored").get<bool>();
    }
    if (j.contains("gap_grid")) c.gap_grid = j.at("gap_grid").get<int>();
    if (j.contains("sector")) {
        if (j.at("sector").is_number_integer())
            c.sector_policy = std::to_string(j.at("sector").get<int>());
        else
            c.sector_policy = j.at("sector").get<std::string>();
    }
    if (j.contains("scan_hamming")) c.scan_hamming = j.at("scan_hamming").get<bool>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("load_config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

int resolve_threads(int config_threads) {
    int threads = config_threads;
    if (const char* env = std::getenv("AQCLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) threads = v;
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
    return threads > 0 ? threads : omp_get_max_threads();
#else
    return 1;
#endif
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t instance_seed(std::uint64_t master, int n, int index) {
    return splitmix64(splitmix64(master ^ (static_cast<std::uint64_t>(n) << 32)) ^
                      static_cast<std::uint64_t>(index));
}

std::uint64_t fnv1a(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::optional<int> resolve_sector_policy(const RunConfig& config,
                                         const PreparedRun& run) {
    if (config.sector_policy == "auto") return run.sector;
    if (config.sector_policy == "full") return std::nullopt;
    try {
        return std::stoi(config.sector_policy);
    } catch (...) {
        throw validation_error("config: sector must be 'auto', 'full' or an integer");
    }
}

// Deterministic retry chain in the rare case a derived seed exhausts the
// generator's restart budget.
Ec3Instance generate_with_retries(int n, std::uint64_t seed) {
    for (int salt = 0; salt < 5; ++salt) {
        try {
            return generate_hard_instance(n, salt == 0 ? seed : splitmix64(seed + salt));
        } catch (const generation_error&) {
            if (salt == 4) throw;
        }
    }
    throw generation_error("generate_with_retries: unreachable", 0);
}

// RFC-4180 style CSV with LF line endings and shortest round-trip numbers.
class Csv {
  public:
    Csv(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw validation_error("csv: cannot open " + path);
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote(cells[i]);
        }
        out_ << '\n';
    }

  private:
    static std::string quote(const std::string& cell) {
        if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
        std::string q = "\"";
        for (const char c : cell) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }
    std::ofstream out_;
};

std::string num(double v) { return format_double(v); }
std::string num(long v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

void write_manifest(const RunConfig& config, const std::string& command,
                    const std::vector<std::string>& outputs, const json& metadata) {
    json j;
    j["command"] = command;
    j["config"] = config_to_json(config);
    j["outputs"] = outputs;
    j["metadata"] = metadata;
    j["quantile_method"] = "inclusive linear interpolation between order statistics";
    const fs::path path = fs::path(config.output_dir) / ("manifest_" + command + ".json");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("manifest: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace

PreparedRun prepare_run(const RunConfig& config, const PathDescriptor& desc,
                        std::optional<int> forced_sector) {
    PreparedRun run;
    run.omega = config.omega;
    run.label = desc.label.empty() ? derive_label(desc) : desc.label;
    fs::create_directories(config.output_dir);

    if (desc.algorithm == Algorithm::Ising) {
        if (desc.kind != PathKind::Straight)
            throw validation_error("prepare_run: the Ising benchmark uses the straight path only");
        if (!config.instance.n)
            throw validation_error("prepare_run: Ising runs need instance.n");
        const int n = *config.instance.n;
        run.path = ising_path(n, config.omega);
        run.path.label = run.label;
        run.initial_op = hamiltonian_at(run.path, 0.0);
        run.final_op = hamiltonian_at(run.path, 1.0);
        run.ground_energy = -static_cast<double>(n) * config.omega;
        run.initial_state = uniform_superposition(n);
        run.solutions = {0, (std::uint64_t{1} << n) - 1};  // ferromagnetic pair
        return run;
    }

    // EC3 algorithms: resolve the instance, persisting generated ones first.
    Ec3Instance inst;
    if (!config.instance.file.empty()) {
        inst = load_instance(config.instance.file);
        run.instance_file = config.instance.file;
    } else {
        if (!config.instance.n || !config.instance.seed)
            throw validation_error("prepare_run: instance needs a file or (n, seed)");
        inst = generate_with_retries(*config.instance.n, *config.instance.seed);
        const fs::path path = fs::path(config.output_dir) /
                              ("instance_n" + std::to_string(inst.n) + "_seed" +
                               std::to_string(*config.instance.seed) + ".ec3");
        save_instance(inst, path.string());
        run.instance_file = path.string();
    }

    run.final_op = final_hamiltonian(inst, config.omega);
    run.ground_energy = 0.0;
    if (inst.known_solution) {
        run.solutions = {*inst.known_solution};
    } else {
        run.solutions = find_solutions(inst, 4096);
        if (run.solutions.empty())
            throw validation_error(
                "prepare_run: instance has no solution; the success criterion is undefined");
    }
    const int delta_w = std::popcount(run.solutions.front());
    const int n = inst.n;

    switch (desc.algorithm) {
        case Algorithm::X:
            run.initial_op = h_x_initial(inst, config.omega);
            run.initial_state = uniform_superposition(n);
            break;
        case Algorithm::Xyz:
            run.sector = forced_sector.value_or(delta_w);
            run.initial_op = h_xyz_initial(inst, config.omega);
            run.initial_state = dicke_state(n, *run.sector);
            break;
        case Algorithm::Xy: {
            run.sector = forced_sector.value_or(delta_w);
            run.initial_op = h_xy_initial(inst, config.omega);
            EigOptions opts;
            opts.compute_vectors = true;
            const EigenResult ground = lowest_eigs(run.initial_op, 1, run.sector, opts);
            const SectorMap map = sector_map(n, *run.sector);
            run.initial_state = embed_sector(map, ground.vectors.front());
            break;
        }
        case Algorithm::Ising:
            break;  // handled above
    }

    switch (desc.kind) {
        case PathKind::Straight:
            run.path = straight_line_path(run.initial_op, run.final_op, run.label);
            break;
        case PathKind::Nonlinear: {
            Clause removed = [&] {
                if (desc.removed_clause) return *desc.removed_clause;
                const auto removable = removable_clauses(inst);
                if (removable.empty())
                    throw validation_error(
                        "prepare_run: no removable clause for the nonlinear path");
                return removable.front();
            }();
            run.path = nonlinear_smooth_path(run.initial_op, inst, removed, desc.alpha,
                                             config.omega, run.label);
            break;
        }
        case PathKind::ClauseByClause: {
            std::vector<int> order(inst.m());
            if (desc.clause_order) {
                if (static_cast<int>(desc.clause_order->size()) != inst.m())
                    throw validation_error("prepare_run: clause_order length mismatch");
                for (int i = 0; i < inst.m(); ++i) order[i] = (*desc.clause_order)[i] - 1;
            } else {
                for (int i = 0; i < inst.m(); ++i) order[i] = i;  // storage order
            }
            run.path = clause_by_clause_path(run.initial_op, inst, config.omega, order,
                                             run.label);
            break;
        }
    }
    run.path.conserved_sector = run.sector;
    run.instance = std::move(inst);
    return run;
}

ProbeResult probe_at(const PreparedRun& run, const RunConfig& config, double t,
                     std::uint64_t* checksum) {
    TimeDependentHamiltonian h{run.path, t};
    auto [final_state, diag] = evolve(run.initial_state, h, config.integrator);
    if (checksum)
        *checksum = fnv1a(final_state.amplitudes.data(),
                          final_state.amplitudes.size() * sizeof(cplx));

    // Measurements happen on a normalized copy; the drift itself is reported
    // through the integrator diagnostics and tolerance checks.
    StateVector measured = final_state;
    const double norm = std::sqrt(measured.norm_sq());
    for (auto& a : measured.amplitudes) a /= norm;

    ProbeResult probe;
    probe.t = t;
    probe.steps = diag.steps;
    probe.energy = energy_expectation(measured, run.final_op) - run.ground_energy;
    probe.p1 = 0.0;
    for (const std::uint64_t w : run.solutions) probe.p1 += solution_overlap(measured, w);
    probe.leakage = run.sector ? sector_leakage(measured, *run.sector) : 0.0;

    if (probe.energy < run.omega * (1.0 - probe.p1) - 1e-9)
        throw std::runtime_error("probe_at: energy lower bound violated (E = " +
                                 format_double(probe.energy) + ", P1 = " +
                                 format_double(probe.p1) + ")");
    return probe;
}

RuntimeSearchResult successful_runtime(const PreparedRun& run, const RunConfig& config) {
    const RuntimeSearchParams& params = config.search;
    const double target = 0.5 * run.omega;

    RuntimeSearchResult result;
    std::map<double, std::pair<ProbeResult, std::uint64_t>> memo;
    const auto probe = [&](double t) -> const ProbeResult& {
        auto it = memo.find(t);
        if (it == memo.end()) {
            std::uint64_t checksum = 0;
            ProbeResult p = probe_at(run, config, t, &checksum);
            it = memo.emplace(t, std::make_pair(std::move(p), checksum)).first;
        }
        return it->second.first;
    };

    double lo = 0.0, hi = -1.0;
    if (probe(params.t_start).energy <= target) {
        // Already successful: walk down in search of a certified failure.
        hi = params.t_start;
        double t = params.t_start;
        const double floor_t = params.t_start * 1e-3;
        while (true) {
            const double down = t / params.growth;
            if (down < floor_t) break;  // degenerate bracket: never failed
            if (probe(down).energy <= target) {
                hi = down;
                t = down;
            } else {
                lo = down;
                break;
            }
        }
    } else {
        lo = params.t_start;
        double t = params.t_start;
        while (hi < 0.0) {
            t = std::min(t * params.growth, params.t_cap);
            if (probe(t).energy <= target) {
                hi = t;
            } else {
                lo = t;
                if (t >= params.t_cap) {
                    result.censored = true;
                    break;
                }
            }
        }
    }

    if (!result.censored && lo > 0.0) {
        while (hi - lo > params.rel_tol * hi) {
            const double mid = 0.5 * (lo + hi);
            if (probe(mid).energy <= target)
                hi = mid;
            else
                lo = mid;
        }
    }

    if (result.censored) {
        result.t_success = params.t_cap;
        result.t_fail = lo;
        const auto& last = memo.rbegin()->second;
        result.energy = last.first.energy;
        result.p1 = last.first.p1;
        result.state_checksum = last.second;
    } else {
        result.t_success = hi;
        result.t_fail = lo;
        const auto& best = memo.at(hi);
        result.energy = best.first.energy;
        result.p1 = best.first.p1;
        result.state_checksum = best.second;
    }
    for (const auto& [t, entry] : memo) {
        result.probes.push_back(entry.first);
        result.total_steps += entry.first.steps;
    }
    return result;
}

QuartileSummary quartiles(std::vector<double> values) {
    if (values.empty())
        throw validation_error("quartiles: empty sample");
    std::sort(values.begin(), values.end());
    const auto at = [&](double p) {
        const double h = (static_cast<double>(values.size()) - 1.0) * p;
        const std::size_t i = static_cast<std::size_t>(h);
        if (i + 1 >= values.size()) return values.back();
        return values[i] + (h - static_cast<double>(i)) * (values[i + 1] - values[i]);
    };
    return {at(0.25), at(0.5), at(0.75)};
}

GapCurve gap_for(const PreparedRun& run, const RunConfig& config,
                 std::span<const double> grid) {
    const std::optional<int> sector = resolve_sector_policy(config, run);
    const bool ising = !run.instance.has_value();
    if (!ising) return gap_curve(run.path, grid, sector);

    // The Ising end point is two-fold degenerate across the global spin flip;
    // the physically coupled excitation lives in the even sector. A parity
    // penalty pushes the odd sector out of the low end of the spectrum, and
    // the reported eigenvalues are shifted back afterwards.
    const int n = run.path.n_qubits();
    double bound = 0.0;
    for (const double s : {0.0, 0.5, 1.0}) {
        double b = 0.0;
        for (const auto& part : run.path.parts)
            b += std::abs(part.envelope(s)) * part.op.spectral_bound();
        bound = std::max(bound, b);
    }
    const double mu = bound + run.omega;
    Path penalized = run.path;
    penalized.parts.push_back({Envelope::constant(1.0), flip_symmetry_penalty(n, mu)});
    GapCurve curve = gap_curve(penalized, grid, std::nullopt);
    for (std::size_t i = 0; i < curve.e1.size(); ++i) {
        curve.e1[i] += mu;
        curve.e2[i] += mu;
    }
    return curve;
}

namespace {

std::vector<PathDescriptor> all_descriptors(const RunConfig& config) {
    std::vector<PathDescriptor> descs{config.path};
    descs.insert(descs.end(), config.compare_paths.begin(), config.compare_paths.end());
    // Make labels unique.
    std::map<std::string, int> seen;
    for (auto& d : descs) {
        std::string label = d.label.empty() ? derive_label(d) : d.label;
        const int count = seen[label]++;
        if (count > 0) label += "_" + std::to_string(count + 1);
        d.label = label;
    }
    return descs;
}

}  // namespace

std::vector<std::string> run_evolve(const RunConfig& config) {
    resolve_threads(config.threads);
    fs::create_directories(config.output_dir);
    std::vector<std::string> outputs;
    json metadata;

    const std::vector<PathDescriptor> descs = all_descriptors(config);
    const PreparedRun primary = prepare_run(config, descs.front());
    if (!primary.instance_file.empty()) metadata["instance_file"] = primary.instance_file;

    // Time series of the primary path at the configured runtime.
    {
        const fs::path path = fs::path(config.output_dir) /
                              ("evolve_" + primary.label + ".csv");
        Csv csv(path.string(),
                {"step", "omega_t", "s", "energy", "p1", "leakage", "norm_drift"});
        TimeDependentHamiltonian h{primary.path, config.evolve_time};
        const EvolveObserver observer = [&](long step, double t, const StateVector& psi) {
            StateVector measured = psi;
            const double nrm2 = measured.norm_sq();
            const double scale = 1.0 / std::sqrt(nrm2);
            for (auto& a : measured.amplitudes) a *= scale;
            const double energy =
                energy_expectation(measured, primary.final_op) - primary.ground_energy;
            double p1 = 0.0;
            for (const std::uint64_t w : primary.solutions)
                p1 += solution_overlap(measured, w);
            const double leak =
                primary.sector ? sector_leakage(measured, *primary.sector) : 0.0;
            const double s = config.evolve_time > 0 ? t / config.evolve_time : 0.0;
            csv.row({num(step), num(t), num(s), num(energy), num(p1), num(leak),
                     num(std::abs(1.0 - nrm2))});
        };
        const auto [final_state, diag] =
            evolve(primary.initial_state, h, config.integrator, observer,
                   config.output_every);
        metadata["steps"] = diag.steps;
        metadata["rhs_evaluations"] = diag.rhs_evaluations;
        metadata["final_state_checksum"] =
            hex64(fnv1a(final_state.amplitudes.data(),
                        final_state.amplitudes.size() * sizeof(cplx)));
        outputs.push_back(path.string());
    }

    // Optional final-energy sweep over t_list, across all path variants.
    if (!config.t_list.empty()) {
        const fs::path path = fs::path(config.output_dir) / "energy_vs_runtime.csv";
        Csv csv(path.string(),
                {"path", "omega_t", "e_final", "p1", "leakage", "sector_ok"});
        for (const auto& desc : descs) {
            const PreparedRun run =
                desc.label == primary.label ? primary : prepare_run(config, desc);
            for (const double t : config.t_list) {
                if (t < 0.0)
                    throw validation_error("run_evolve: negative runtime in t_list");
                const ProbeResult p = probe_at(run, config, t);
                const bool sector_ok = !run.sector || p.leakage < 1e-8;
                csv.row({run.label, num(p.t), num(p.energy), num(p.p1), num(p.leakage),
                         sector_ok ? "1" : "0"});
            }
        }
        outputs.push_back(path.string());
    }

    write_manifest(config, "evolve", outputs, metadata);
    outputs.push_back((fs::path(config.output_dir) / "manifest_evolve.json").string());
    return outputs;
}

std::vector<std::string> run_runtime(const RunConfig& config) {
    resolve_threads(config.threads);
    fs::create_directories(config.output_dir);
    std::vector<std::string> outputs;
    json metadata;

    const PathDescriptor desc = all_descriptors(config).front();
    std::vector<std::optional<int>> sectors{std::nullopt};
    if (config.scan_hamming) {
        if (desc.algorithm != Algorithm::Xyz && desc.algorithm != Algorithm::Xy)
            throw validation_error("run_runtime: scan_hamming applies to xyz/xy only");
        if (!config.instance.n && config.instance.file.empty())
            throw validation_error("run_runtime: scan_hamming needs an instance");
        sectors.clear();
        const int n = config.instance.file.empty()
                          ? *config.instance.n
                          : load_instance(config.instance.file).n;
        for (int d = 0; d <= n; ++d) sectors.push_back(d);
    }

    const fs::path summary_path =
        fs::path(config.output_dir) / ("runtime_" + derive_label(desc) + ".csv");
    Csv summary(summary_path.string(),
                {"label", "sector", "t_s", "t_fail", "censored", "e_final", "p1",
                 "total_steps", "state_checksum"});

    json certificates = json::array();
    for (const std::optional<int> forced : sectors) {
        const PreparedRun run = prepare_run(config, desc, forced);
        const RuntimeSearchResult res = successful_runtime(run, config);

        const std::string suffix = forced ? "_d" + std::to_string(*forced) : "";
        const fs::path probes_path =
            fs::path(config.output_dir) / ("probes_" + run.label + suffix + ".csv");
        Csv probes(probes_path.string(),
                   {"omega_t", "e_final", "p1", "leakage", "steps"});
        for (const auto& p : res.probes)
            probes.row({num(p.t), num(p.energy), num(p.p1), num(p.leakage),
                        num(p.steps)});
        outputs.push_back(probes_path.string());

        summary.row({run.label,
                     run.sector ? num(*run.sector) : std::string("-"),
                     num(res.t_success), num(res.t_fail),
                     res.censored ? "1" : "0", num(res.energy), num(res.p1),
                     num(res.total_steps), hex64(res.state_checksum)});
        json cert;
        cert["label"] = run.label;
        if (run.sector) cert["sector"] = *run.sector;
        cert["t_s"] = res.t_success;
        cert["bracket"] = {res.t_fail, res.t_success};
        cert["energy"] = res.energy;
        cert["p1"] = res.p1;
        cert["censored"] = res.censored;
        cert["state_checksum"] = hex64(res.state_checksum);
        if (!run.instance_file.empty()) cert["instance_file"] = run.instance_file;
        certificates.push_back(cert);
    }
    outputs.insert(outputs.begin(), summary_path.string());
    metadata["certificates"] = certificates;
    write_manifest(config, "runtime", outputs, metadata);
    outputs.push_back((fs::path(config.output_dir) / "manifest_runtime.json").string());
    return outputs;
}

std::vector<std::string> run_gap(const RunConfig& config) {
    resolve_threads(config.threads);
    fs::create_directories(config.output_dir);
    std::vector<std::string> outputs;
    json metadata;
    json summary_meta = json::array();

    const std::vector<double> grid = uniform_grid(config.gap_grid);
    const fs::path summary_path = fs::path(config.output_dir) / "gap_summary.csv";
    Csv summary(summary_path.string(), {"path", "sector", "s_star", "min_gap"});

    for (const auto& desc : all_descriptors(config)) {
        const PreparedRun run = prepare_run(config, desc);
        const GapCurve curve = gap_for(run, config, grid);
        const fs::path path =
            fs::path(config.output_dir) / ("gap_" + run.label + ".csv");
        Csv csv(path.string(), {"s", "e1", "e2", "gap"});
        for (std::size_t i = 0; i < curve.s_grid.size(); ++i)
            csv.row({num(curve.s_grid[i]), num(curve.e1[i]), num(curve.e2[i]),
                     num(curve.gap[i])});
        outputs.push_back(path.string());

        const std::optional<int> sector = resolve_sector_policy(config, run);
        const bool ising = !run.instance.has_value();
        const std::string sector_desc =
            ising ? "spin-flip-even" : (sector ? std::to_string(*sector) : "full");
        summary.row({run.label, sector_desc, num(curve.min_gap_s), num(curve.min_gap)});
        json entry;
        entry["label"] = run.label;
        entry["sector"] = sector_desc;
        entry["s_star"] = curve.min_gap_s;
        entry["min_gap"] = curve.min_gap;
        if (!run.instance_file.empty()) entry["instance_file"] = run.instance_file;
        summary_meta.push_back(entry);
    }
    outputs.insert(outputs.begin(), summary_path.string());
    metadata["min_gaps"] = summary_meta;
    write_manifest(config, "gap", outputs, metadata);
    outputs.push_back((fs::path(config.output_dir) / "manifest_gap.json").string());
    return outputs;
}

std::vector<std::string> run_scaling(const RunConfig& config) {
    resolve_threads(config.threads);
    fs::create_directories(config.output_dir);
    if (config.scaling_n.empty())
        throw validation_error("run_scaling: scaling.n_list is empty");
    std::vector<std::string> outputs;
    json metadata;

    const PathDescriptor desc = all_descriptors(config).front();
    const bool ising = desc.algorithm == Algorithm::Ising;
    const int per_n = ising ? 1 : std::max(1, config.instances_per_n);

    struct Task {
        int n;
        int index;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const int n : config.scaling_n)
        for (int i = 0; i < per_n; ++i)
            tasks.push_back({n, i, ising ? 0 : instance_seed(config.master_seed, n, i)});

    struct Row {
        RuntimeSearchResult res;
        int m = 0;
        std::string instance_file;
    };
    std::vector<Row> rows(tasks.size());
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ti = 0; ti < static_cast<std::int64_t>(tasks.size()); ++ti) {
        try {
            const Task& task = tasks[ti];
            RunConfig local = config;
            if (ising) {
                local.instance.file.clear();
                local.instance.n = task.n;
            } else {
                const Ec3Instance inst = generate_with_retries(task.n, task.seed);
                const fs::path ipath =
                    fs::path(config.output_dir) /
                    ("instance_n" + std::to_string(task.n) + "_i" +
                     std::to_string(task.index) + ".ec3");
                save_instance(inst, ipath.string());
                local.instance.file = ipath.string();
                local.instance.n.reset();
                local.instance.seed.reset();
                rows[ti].m = inst.m();
                rows[ti].instance_file = ipath.string();
            }
            const PreparedRun run = prepare_run(local, desc);
            rows[ti].res = successful_runtime(run, local);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    const fs::path instances_path = fs::path(config.output_dir) / "scaling_instances.csv";
    Csv instances(instances_path.string(),
                  {"n", "index", "seed", "m", "t_s", "censored", "e_final", "p1"});
    for (std::size_t i = 0; i < tasks.size(); ++i)
        instances.row({num(tasks[i].n), num(tasks[i].index), num(tasks[i].seed),
                       num(rows[i].m), num(rows[i].res.t_success),
                       rows[i].res.censored ? "1" : "0", num(rows[i].res.energy),
                       num(rows[i].res.p1)});
    outputs.push_back(instances_path.string());

    const fs::path summary_path = fs::path(config.output_dir) / "scaling_summary.csv";
    Csv summary(summary_path.string(),
                {"n", "count", "censored", "t_s_q1", "t_s_median", "t_s_q3"});
    for (const int n : config.scaling_n) {
        std::vector<double> values;
        int censored = 0;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].n != n) continue;
            if (rows[i].res.censored) {
                ++censored;
                if (config.censored_excluded) continue;
            }
            values.push_back(rows[i].res.t_success);
        }
        if (values.empty()) {
            summary.row({num(n), "0", num(censored), "-", "-", "-"});
            continue;
        }
        const QuartileSummary q = quartiles(values);
        summary.row({num(n), num(static_cast<long>(values.size())), num(censored),
                     num(q.q1), num(q.median), num(q.q3)});
    }
    outputs.push_back(summary_path.string());

    metadata["algorithm"] = to_string(desc.algorithm);
    metadata["instances_per_n"] = per_n;
    write_manifest(config, "scaling", outputs, metadata);
    outputs.push_back((fs::path(config.output_dir) / "manifest_scaling.json").string());
    return outputs;
}

}  // namespace aqclab::lab
