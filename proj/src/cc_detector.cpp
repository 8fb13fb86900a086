#include "ccdetect/cc_detector.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "ccdetect/errors.hpp"
#include "ccdetect/numfmt.hpp"

namespace ccd {

CCReport detect_cc(const TestSuite& suite, const SvmConfig& config) {
  if (suite.pass_count() == 0) {
    // Nothing to classify; no training needed.
    CCReport report;
    report.flipped_suite = suite;
    return report;
  }
  if (suite.fail_count() == 0)
    throw Error(ErrorCode::TrainingError, "detect_cc: suite has no failing traces");
  return detect_cc(suite, build_gram(suite), config);
}

CCReport detect_cc(const TestSuite& suite, const GramMatrix& gram, const SvmConfig& config) {
  if (gram.size() != suite.traces.size())
    throw Error(ErrorCode::ContractViolation, "detect_cc: gram does not match suite");

  CCReport report;
  if (suite.pass_count() == 0) {
    report.flipped_suite = suite;
    return report;
  }

  const SvmModel model = train(gram, config);
  report.converged = model.converged;

  std::vector<double> sims(model.support_indices.size());
  for (std::size_t idx = 0; idx < suite.traces.size(); ++idx) {
    if (suite.traces[idx].outcome != Outcome::Pass) continue;
    for (std::size_t r = 0; r < model.support_indices.size(); ++r)
      sims[r] = gram.at(model.support_indices[r], idx);
    const double value = decision_value(model, sims);
    const bool is_cc = classify(value) == Outcome::Fail;
    report.per_passing_test.push_back({suite.traces[idx].test_id, value, is_cc});
    if (is_cc) report.cc_ids.insert(suite.traces[idx].test_id);
  }
  report.flipped_suite = flip_outcomes(suite, report.cc_ids);
  return report;
}

Ranking localize_after_cc(const TestSuite& suite, const SvmConfig& config, Formula formula) {
  const CCReport report = detect_cc(suite, config);
  return rank(report.flipped_suite, formula);
}

void write_cc_report(const CCReport& report, std::ostream& out) {
  out << "# cc-report\n";
  out << "# converged " << (report.converged ? "yes" : "no") << "\n";
  out << "# detected " << report.cc_ids.size() << " of " << report.per_passing_test.size()
      << " passing tests\n";
  for (const auto& v : report.per_passing_test)
    out << v.test_id << ' ' << format_sig(v.decision_value) << ' '
        << (v.is_cc ? "CC" : "true-pass") << "\n";
}

std::set<std::string> read_cc_report_ids(std::istream& in) {
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string id, value, verdict;
    if (!(ss >> id >> value >> verdict))
      throw Error(ErrorCode::ParseError, "cc report: malformed line '" + line + "'");
    if (verdict == "CC") ids.insert(id);
  }
  return ids;
}

}  // namespace ccd
