// Times the serial ensemble loop against the OpenMP one on identical work and
// checks they produce identical records. Usage:
//
//   bench_ensemble [preset] [n_seeds] [horizon]
//
// defaults: fig1, 16 members, horizon 200.

#include "sirlevy/analysis.hpp"
#include "sirlevy/config.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sirlevy;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_records(const EnsembleSummary& a, const EnsembleSummary& b) {
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const RunRecord &ra = a.records[i], &rb = b.records[i];
        if (ra.seed != rb.seed || ra.final_state.s != rb.final_state.s ||
            ra.final_state.i != rb.final_state.i || ra.final_state.d != rb.final_state.d ||
            ra.tail_mean_i != rb.tail_mean_i || ra.slope != rb.slope ||
            ra.extinct != rb.extinct || ra.persistent != rb.persistent)
            return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    const std::string name = argc > 1 ? argv[1] : "fig1";
    const std::size_t n_seeds = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 16;
    const double horizon = argc > 3 ? std::strtod(argv[3], nullptr) : 200.0;

    auto cfg = preset(name);
    if (!cfg) {
        std::fprintf(stderr, "unknown preset \"%s\" (expected fig1..fig4)\n", name.c_str());
        return 1;
    }
    cfg->sim.horizon = horizon;
    cfg->analysis.window = Window{0.5 * horizon, horizon};

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("preset %s, %zu members, horizon %g, dt %g, %d thread(s)\n", name.c_str(),
                n_seeds, horizon, cfg->sim.dt, threads);

    auto t0 = std::chrono::steady_clock::now();
    const EnsembleSummary serial = run_ensemble_serial(cfg->model, cfg->noise, cfg->initial,
                                                       cfg->sim, n_seeds, cfg->analysis);
    const double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const EnsembleSummary parallel = run_ensemble(cfg->model, cfg->noise, cfg->initial,
                                                  cfg->sim, n_seeds, cfg->analysis);
    const double t_parallel = seconds_since(t0);

    std::printf("serial   : %8.3f s\n", t_serial);
    std::printf("parallel : %8.3f s  (speedup %.2fx)\n", t_parallel,
                t_parallel > 0 ? t_serial / t_parallel : 0.0);
    std::printf("fraction extinct %.3f, fraction persistent %.3f\n", serial.fraction_extinct,
                serial.fraction_persistent);

    if (!same_records(serial, parallel)) {
        std::fprintf(stderr, "MISMATCH: serial and parallel records differ\n");
        return 1;
    }
    std::printf("records identical across serial and parallel runs\n");
    return 0;
}
