#include "ccdetect/synthgen.hpp"

#include <cmath>
#include <random>

#include "ccdetect/errors.hpp"

namespace ccd {

namespace {

// std::uniform_int_distribution is not portable across standard libraries;
// these samplers pin the byte stream to mt19937_64 alone.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t bound = n == 0 ? 0 : (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= bound);
  return r % n;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TestSuite generate(const SynthConfig& cfg) {
  if (cfg.n_predicates < 3)
    throw Error(ErrorCode::ConfigError, "synth: n_predicates must be >= 3");
  if (cfg.n_tests < 10) throw Error(ErrorCode::ConfigError, "synth: n_tests must be >= 10");
  if (!(cfg.fail_rate > 0.0 && cfg.fail_rate < 1.0))
    throw Error(ErrorCode::ConfigError, "synth: fail_rate must be in (0, 1)");
  if (!(cfg.cc_rate >= 0.0 && cfg.cc_rate < 1.0))
    throw Error(ErrorCode::ConfigError, "synth: cc_rate must be in [0, 1)");
  if (!(cfg.noise >= 0.0 && cfg.noise < 0.5))
    throw Error(ErrorCode::ConfigError, "synth: noise must be in [0, 0.5)");
  if (cfg.trace_len_range.first < 1 || cfg.trace_len_range.first > cfg.trace_len_range.second)
    throw Error(ErrorCode::ConfigError, "synth: invalid trace_len_range");

  const auto n_fail = static_cast<std::size_t>(
      std::llround(static_cast<double>(cfg.n_tests) * cfg.fail_rate));
  if (n_fail < 1)
    throw Error(ErrorCode::ConfigError, "synth: n_tests * fail_rate must be >= 1");
  if (n_fail > cfg.n_tests)
    throw Error(ErrorCode::ConfigError, "synth: fail_rate leaves no room for tests");
  const std::size_t n_pass = cfg.n_tests - n_fail;
  const auto n_cc = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_pass) * cfg.cc_rate));
  if (cfg.cc_rate > 0.0 && n_pass == 0)
    throw Error(ErrorCode::ConfigError, "synth: cc_rate > 0 but no passing tests");

  std::mt19937_64 rng(cfg.seed);
  const std::size_t len_min = cfg.trace_len_range.first;
  const std::size_t len_max = cfg.trace_len_range.second;
  const auto faulty = static_cast<PredicateId>(uniform_below(rng, cfg.n_predicates));

  auto random_predicate = [&] {
    return static_cast<PredicateId>(uniform_below(rng, cfg.n_predicates));
  };
  auto random_nonfaulty = [&] {
    auto id = static_cast<PredicateId>(uniform_below(rng, cfg.n_predicates - 1));
    return id >= faulty ? id + 1 : id;
  };

  // Class templates at maximal length; each trace is a truncated copy with
  // element-wise substitution noise. The fault sits below len_min so no
  // truncation can drop it.
  std::vector<PredicateId> fail_template(len_max);
  for (auto& id : fail_template) id = random_nonfaulty();
  const std::size_t fault_pos = static_cast<std::size_t>(uniform_below(rng, len_min));
  fail_template[fault_pos] = faulty;

  // True passes execute the same non-faulty predicates in a different order:
  // shared coverage for the spectra, low similarity for the order-sensitive
  // kernel.
  std::vector<PredicateId> pass_template = fail_template;
  pass_template[fault_pos] = random_nonfaulty();
  for (std::size_t i = len_max - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i + 1));
    std::swap(pass_template[i], pass_template[j]);
  }

  auto sample_length = [&] {
    return len_min + static_cast<std::size_t>(uniform_below(rng, len_max - len_min + 1));
  };

  auto make_fail_like = [&] {
    const std::size_t len = sample_length();
    std::vector<PredicateId> seq(fail_template.begin(),
                                 fail_template.begin() + static_cast<std::ptrdiff_t>(len));
    for (std::size_t q = 0; q < len; ++q) {
      if (q == fault_pos) continue;  // keep the planted fault
      if (uniform01(rng) < cfg.noise) seq[q] = random_predicate();
    }
    return seq;
  };
  auto make_true_pass = [&] {
    const std::size_t len = sample_length();
    std::vector<PredicateId> seq(pass_template.begin(),
                                 pass_template.begin() + static_cast<std::ptrdiff_t>(len));
    for (std::size_t q = 0; q < len; ++q)
      if (uniform01(rng) < cfg.noise) seq[q] = random_nonfaulty();
    return seq;
  };

  TestSuite suite;
  suite.predicate_count = cfg.n_predicates;
  suite.faulty_predicates.insert(faulty);
  std::size_t next_id = 1;
  auto test_id = [&] { return "t" + std::to_string(next_id++); };

  for (std::size_t i = 0; i < n_fail; ++i)
    suite.traces.push_back({test_id(), make_fail_like(), Outcome::Fail});
  for (std::size_t i = 0; i < n_cc; ++i) {
    ExecutionTrace trace{test_id(), make_fail_like(), Outcome::Pass};
    suite.ground_truth_cc.insert(trace.test_id);
    suite.traces.push_back(std::move(trace));
  }
  for (std::size_t i = 0; i < n_pass - n_cc; ++i)
    suite.traces.push_back({test_id(), make_true_pass(), Outcome::Pass});

  return suite;
}

}  // namespace ccd
