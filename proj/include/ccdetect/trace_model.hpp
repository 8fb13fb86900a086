#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace ccd {

using PredicateId = std::uint32_t;

enum class Outcome { Pass, Fail };

// Fixed suite-wide numeric encoding: Pass -> +1, Fail -> -1.
constexpr int outcome_label(Outcome o) { return o == Outcome::Pass ? +1 : -1; }

struct ExecutionTrace {
  std::string test_id;
  std::vector<PredicateId> sequence;  // execution order, repeats allowed
  Outcome outcome = Outcome::Pass;

  bool operator==(const ExecutionTrace&) const = default;
};

struct TestSuite {
  std::size_t predicate_count = 0;
  std::vector<ExecutionTrace> traces;
  std::set<std::string> ground_truth_cc;    // optional "#cc" section
  std::set<PredicateId> faulty_predicates;  // optional "#faulty" section

  bool operator==(const TestSuite&) const = default;

  std::size_t fail_count() const;
  std::size_t pass_count() const;
  const ExecutionTrace* find(const std::string& test_id) const;
};

struct PredicateSpectrum {
  std::uint64_t n_cf = 0;  // failed tests executing the predicate
  std::uint64_t n_uf = 0;  // failed tests not executing it
  std::uint64_t n_cs = 0;  // passed tests executing it
  std::uint64_t n_us = 0;  // passed tests not executing it
};

struct SpectrumCounts {
  std::vector<PredicateSpectrum> per_predicate;
  std::uint64_t total_failed = 0;
  std::uint64_t total_passed = 0;
};

// Line-oriented trace format:
//   predicates <N>
//   <test_id> <P|F> <id_1> <id_2> ... <id_k>
//   #cc <test_id...>        (optional trailing ground-truth section)
//   #faulty <pid...>        (optional trailing ground-truth section)
// Other '#'-prefixed lines are comments.
TestSuite parse_suite(std::istream& in);
TestSuite parse_suite_file(const std::string& path);
void serialize_suite(const TestSuite& suite, std::ostream& out);

// Presence-based coverage: a predicate executes in a trace iff its id
// appears at least once in the sequence.
SpectrumCounts compute_spectrum(const TestSuite& suite);

// Returns a copy with the named passing traces relabeled Fail.
TestSuite flip_outcomes(const TestSuite& suite, const std::set<std::string>& cc_ids);

}  // namespace ccd
