// Command-line front end: instance generation plus the evolve / runtime /
// gap / scaling experiment drivers. All numeric output goes to CSV files in
// the configured output directory; stdout lists the files written.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aqclab/ec3.hpp"
#include "aqclab/lab.hpp"

namespace {

int run_with_config(const std::string& config_path, int threads, int grid_override,
                    const std::string& command) {
    aqclab::lab::RunConfig config = aqclab::lab::load_config(config_path);
    if (threads > 0) config.threads = threads;
    if (grid_override > 0) config.gap_grid = grid_override;

    std::vector<std::string> outputs;
    if (command == "evolve") outputs = aqclab::lab::run_evolve(config);
    else if (command == "runtime") outputs = aqclab::lab::run_runtime(config);
    else if (command == "gap") outputs = aqclab::lab::run_gap(config);
    else outputs = aqclab::lab::run_scaling(config);

    for (const auto& f : outputs) std::printf("%s\n", f.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aqclab: matrix-free adiabatic quantum computation simulator"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (AQCLAB_THREADS overrides)");

    auto* gen = app.add_subcommand("gen", "generate a hard EC3 instance file");
    int gen_n = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    long gen_restarts = 10000;
    gen->add_option("--n", gen_n, "number of bits")->required();
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--out", gen_out, "output instance file")->required();
    gen->add_option("--max-restarts", gen_restarts, "restart budget");

    std::string config_path;
    int grid = 0;
    auto* evolve = app.add_subcommand("evolve", "single evolution, energy/P1 time series");
    evolve->add_option("--config", config_path, "run configuration (JSON)")->required();
    auto* runtime = app.add_subcommand("runtime", "successful-runtime search");
    runtime->add_option("--config", config_path, "run configuration (JSON)")->required();
    auto* gap = app.add_subcommand("gap", "gap curves over the interpolation");
    gap->add_option("--config", config_path, "run configuration (JSON)")->required();
    gap->add_option("--grid", grid, "override the s-grid point count");
    auto* scaling = app.add_subcommand("scaling", "runtime scaling study");
    scaling->add_option("--config", config_path, "run configuration (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const aqclab::Ec3Instance inst =
                aqclab::generate_hard_instance(gen_n, gen_seed, gen_restarts);
            aqclab::save_instance(inst, gen_out);
            std::printf("%s\n", gen_out.c_str());
            std::fprintf(stderr, "n=%d m=%d solution=%llu\n", inst.n, inst.m(),
                         static_cast<unsigned long long>(*inst.known_solution));
            return 0;
        }
        for (const auto* cmd : {evolve, runtime, gap, scaling})
            if (cmd->parsed())
                return run_with_config(config_path, threads, grid, cmd->get_name());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
