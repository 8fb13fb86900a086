#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "ccdetect/sbfl.hpp"
#include "ccdetect/svm.hpp"
#include "ccdetect/trace_model.hpp"

namespace ccd {

struct CCVerdict {
  std::string test_id;
  double decision_value = 0.0;
  bool is_cc = false;  // decision on the Fail side (value <= 0)
};

struct CCReport {
  std::vector<CCVerdict> per_passing_test;  // suite order
  std::set<std::string> cc_ids;
  TestSuite flipped_suite;
  bool converged = true;  // solver convergence warning propagates here
};

// Trains on the whole labeled suite (Pass -> +1, Fail -> -1) and classifies
// every passing trace against the trained model. Passing traces that land on
// the Fail side are reported as coincidentally correct and flipped.
CCReport detect_cc(const TestSuite& suite, const SvmConfig& config);
CCReport detect_cc(const TestSuite& suite, const GramMatrix& gram, const SvmConfig& config);

// rank(flip_outcomes(suite, detect_cc(suite, config).cc_ids), formula).
Ranking localize_after_cc(const TestSuite& suite, const SvmConfig& config, Formula formula);

// One line per passing test: id, decision value, verdict.
void write_cc_report(const CCReport& report, std::ostream& out);
// Reads back the cc ids of a written report (used by the eval command).
std::set<std::string> read_cc_report_ids(std::istream& in);

}  // namespace ccd
