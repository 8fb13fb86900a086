// Times the OpenMP gram construction against the serial reference on
// synthetic suites of growing size and reports the speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ccdetect/seqkernel.hpp"
#include "ccdetect/synthgen.hpp"

using namespace ccd;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(GramMatrix (*build)(const TestSuite&), const TestSuite& suite, int reps,
               double& checksum) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    const GramMatrix gram = build(suite);
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (ms < best) best = ms;
    checksum += gram.at(0, gram.size() - 1);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled at build time (both columns run serial code)\n");
#endif
  std::printf("%8s %12s %12s %10s\n", "traces", "serial ms", "parallel ms", "speedup");

  for (std::size_t n_tests : {100, 200, 400, 800}) {
    SynthConfig cfg;
    cfg.n_predicates = 60;
    cfg.n_tests = n_tests;
    cfg.trace_len_range = {30, 60};
    cfg.seed = 7;
    const TestSuite suite = generate(cfg);

    double checksum = 0.0;
    const double serial = time_ms(&build_gram_serial, suite, reps, checksum);
    const double parallel = time_ms(&build_gram, suite, reps, checksum);
    std::printf("%8zu %12.2f %12.2f %9.2fx\n", n_tests, serial, parallel, serial / parallel);
    if (checksum < 0) std::printf("impossible\n");  // keep the builds observable
  }
  return 0;
}
