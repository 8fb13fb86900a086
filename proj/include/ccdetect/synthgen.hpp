#pragma once

#include <cstdint>
#include <utility>

#include "ccdetect/trace_model.hpp"

namespace ccd {

struct SynthConfig {
  std::size_t n_predicates = 50;
  std::size_t n_tests = 100;
  double fail_rate = 0.2;   // fraction of tests that fail, (0, 1)
  double cc_rate = 0.2;     // fraction of passing tests that execute the fault, [0, 1)
  std::pair<std::size_t, std::size_t> trace_len_range{4, 8};
  double noise = 0.05;      // per-element substitution probability, [0, 0.5)
  std::uint64_t seed = 42;
};

// Deterministic labeled suite with one planted faulty predicate. Failing and
// coincidentally correct traces are noisy truncations of a shared failing
// template and always contain the fault; true passes never do. Uses
// mt19937_64 with local samplers so suites reproduce across platforms.
TestSuite generate(const SynthConfig& config);

}  // namespace ccd
