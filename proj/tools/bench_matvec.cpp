// Compares the OpenMP gather kernel against the serial scatter reference and
// times the fused Schroedinger right-hand side, per qubit count.
//
//   bench_matvec [n_min] [n_max] [repetitions]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aqclab/integrator.hpp"
#include "aqclab/paths.hpp"
#include "aqclab/state.hpp"

using namespace aqclab;

namespace {

StateVector random_state(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    StateVector psi = StateVector::zero(n);
    for (auto& a : psi.amplitudes) a = cplx(dist(rng), dist(rng));
    const double norm = std::sqrt(psi.norm_sq());
    for (auto& a : psi.amplitudes) a /= norm;
    return psi;
}

template <typename F>
double time_best_of(int reps, F&& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int n_min = argc > 1 ? std::atoi(argv[1]) : 10;
    const int n_max = argc > 2 ? std::atoi(argv[2]) : 20;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 5;

#ifdef _OPENMP
    std::printf("# OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("# OpenMP disabled\n");
#endif
    std::printf("# transverse Ising ring at s = 0.5 (2n terms)\n");
    std::printf("%4s %12s %12s %8s %12s\n", "n", "serial[s]", "parallel[s]", "speedup",
                "rhs[s]");

    for (int n = n_min; n <= n_max; ++n) {
        const Path path = ising_path(n, 1.0);
        const SqhOperator h = hamiltonian_at(path, 0.5);
        const StateVector psi = random_state(n, 42);
        const TimeDependentHamiltonian tdh{path, 1.0};

        volatile double sink = 0.0;
        const double t_serial = time_best_of(reps, [&] {
            const StateVector out = matvec_serial(h, psi);
            sink = out.amplitudes[0].real();
        });
        const double t_parallel = time_best_of(reps, [&] {
            const StateVector out = matvec(h, psi);
            sink = out.amplitudes[0].real();
        });
        const double t_rhs = time_best_of(reps, [&] {
            const StateVector out = rhs(tdh, psi, 0.5);
            sink = out.amplitudes[0].real();
        });
        (void)sink;
        std::printf("%4d %12.6f %12.6f %8.2f %12.6f\n", n, t_serial, t_parallel,
                    t_serial / t_parallel, t_rhs);
    }
    return 0;
}
