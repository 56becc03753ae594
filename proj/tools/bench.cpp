// Times the embarrassingly parallel kernels (certification grid, sweep
// runner) against their serial reference paths.

#include <chrono>
#include <cstdio>

#ifdef LLR_HAVE_OPENMP
#include <omp.h>
#endif

#include "llr/harness.hpp"
#include "llr/oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& fn, int reps = 3) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto start = Clock::now();
    fn();
    const auto stop = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return best;
}

}  // namespace

int main() {
#ifdef LLR_HAVE_OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n");
#endif

  using namespace llr;
  const RateSchedule f = RateSchedule::sqrt_log();

  {
    StreamConfig config;
    config.kind = ModelKind::kRegression;
    config.horizon = 2000;
    const Stream stream(config);
    CertGrid grid;
    grid.ts = {100, 500, 1000, 2000};
    grid.etas = {1e-4, 1e-3, 1e-2, 1e-1, 0.5, 1.0};
    const double serial = time_ms([&] { certify_stream(stream, f, grid, 0.0, false); });
    const double parallel = time_ms([&] { certify_stream(stream, f, grid, 0.0, true); });
    std::printf("certification grid (24 cells, regression): serial %8.2f ms  parallel %8.2f ms  speedup %.2fx\n",
                serial, parallel, serial / parallel);
  }

  {
    ExperimentConfig config;
    config.stream.kind = ModelKind::kRegression;
    config.stream.horizon = 7500;
    config.algos = {Algo::kSg, Algo::kSvrg, Algo::kSgSg, Algo::kSgAg, Algo::kSvrgAg};
    const double serial = time_ms([&] {
      ExperimentConfig c = config;
      c.parallel = false;
      run(c);
    });
    const double parallel = time_ms([&] { run(config); });
    std::printf("sweep runner (30 runs, regression T=7500):  serial %8.2f ms  parallel %8.2f ms  speedup %.2fx\n",
                serial, parallel, serial / parallel);
  }
  return 0;
}
