// Benchmark: serial reference versus the OpenMP-chunked simulator on the
// same configuration, verifying identical tallies along the way.
//
//   bench_mc [rounds]        (default 2e6)

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>

#include "qkd/mc_sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace qkd;

namespace {

template <typename F>
double time_run(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    uint64_t rounds = 2'000'000;
    if (argc > 1) rounds = std::strtoull(argv[1], nullptr, 10);

    SimConfig config;
    config.params.channel = ChannelSpec{25.0, 0.2, 0.145};
    config.params.mu_a = config.params.mu_b = 0.5;
    config.source_model = SourceModel::WeakCoherent;
    config.n_rounds = rounds;
    config.seed = 424242;

    EmpiricalReport serial_rep, parallel_rep;
    const double t_serial = time_run([&] { serial_rep = simulate_serial(config); });
    const double t_parallel = time_run([&] { parallel_rep = simulate(config); });

    if (serial_rep.tally.kept12 != parallel_rep.tally.kept12 ||
        serial_rep.tally.errors12 != parallel_rep.tally.errors12 ||
        serial_rep.tally.announced12 != parallel_rep.tally.announced12) {
        std::fprintf(stderr, "FAIL: serial and parallel tallies differ\n");
        return 1;
    }

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("rounds            %llu\n", (unsigned long long)rounds);
    std::printf("threads           %d\n", threads);
    std::printf("serial            %.3f s  (%.2f Mrounds/s)\n", t_serial,
                rounds / t_serial / 1e6);
    std::printf("openmp            %.3f s  (%.2f Mrounds/s)\n", t_parallel,
                rounds / t_parallel / 1e6);
    std::printf("speedup           %.2fx\n", t_serial / t_parallel);
    std::printf("gain estimate     %.6g +- %.2g\n", parallel_rep.gain.value,
                parallel_rep.gain.std_err);
    std::printf("tallies identical yes\n");
    return 0;
}
