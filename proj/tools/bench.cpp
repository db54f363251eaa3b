// Serial vs OpenMP timings for the data-parallel kernels.
#include <chrono>
#include <cstdio>
#include <vector>

#include "ipp/field.hpp"
#include "ipp/gp.hpp"
#include "ipp/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

template <class F>
double seconds(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main() {
    using namespace ipp;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    GridSpec grid(30, 30);
    Rng rng(7);
    auto field = random_mixture(grid, {}, rng);
    for (std::size_t n : {25u, 100u, 200u}) {
        auto locs = initial_locations(grid, n, rng);
        std::vector<Observation> obs;
        for (auto l : locs) obs.push_back({l, field.value(l)});
        auto model = fit(obs, {});
        const auto cells = grid.cells();
        const double t_ser = seconds([&] { predict_serial(model, cells); }, 5);
        const double t_par = seconds([&] { predict(model, cells); }, 5);
        std::printf("posterior over 900 cells, n=%3zu obs: serial %8.3f ms  batched/omp %8.3f ms  speedup %.2fx\n", n,
                    t_ser * 1e3, t_par * 1e3, t_ser / t_par);
    }

    nlohmann::json doc = {{"field", {{"type", "mixture"}}}, {"robots", 3}, {"budget", 100},
                          {"planner", {{"iterations", 200}}}, {"runs", 4}};
    auto config = parse_config(doc);
    const double b_ser = seconds([&] { run_batch(config, Execution::serial); }, 1);
    const double b_par = seconds([&] { run_batch(config, Execution::parallel); }, 1);
    std::printf("batch of 4 missions (3 robots, 200 it/step): serial %.2f s  omp %.2f s  speedup %.2fx\n", b_ser, b_par,
                b_ser / b_par);
    return 0;
}
