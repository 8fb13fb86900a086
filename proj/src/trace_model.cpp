#include "ccdetect/trace_model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ccdetect/errors.hpp"

namespace ccd {

std::size_t TestSuite::fail_count() const {
  return static_cast<std::size_t>(
      std::count_if(traces.begin(), traces.end(),
                    [](const ExecutionTrace& t) { return t.outcome == Outcome::Fail; }));
}

std::size_t TestSuite::pass_count() const { return traces.size() - fail_count(); }

const ExecutionTrace* TestSuite::find(const std::string& test_id) const {
  for (const auto& t : traces)
    if (t.test_id == test_id) return &t;
  return nullptr;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

std::uint64_t parse_uint(const std::string& tok, int line_no, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                           what + ", got '" + tok + "'");
  return v;
}

}  // namespace

TestSuite parse_suite(std::istream& in) {
  TestSuite suite;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  bool in_trailer = false;  // set once a ground-truth section starts
  std::unordered_set<std::string> seen_ids;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    if (tokens[0][0] == '#') {
      if (tokens[0] == "#cc") {
        in_trailer = true;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
          if (seen_ids.find(tokens[i]) == seen_ids.end())
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                                   ": #cc names unknown test id '" +
                                                   tokens[i] + "'");
          suite.ground_truth_cc.insert(tokens[i]);
        }
      } else if (tokens[0] == "#faulty") {
        in_trailer = true;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
          std::uint64_t pid = parse_uint(tokens[i], line_no, "a predicate id");
          if (pid >= suite.predicate_count)
            throw Error(ErrorCode::DomainError,
                        "line " + std::to_string(line_no) + ": faulty predicate id " +
                            tokens[i] + " out of range (N=" +
                            std::to_string(suite.predicate_count) + ")");
          suite.faulty_predicates.insert(static_cast<PredicateId>(pid));
        }
      }
      continue;  // plain comment
    }

    if (!have_header) {
      if (tokens.size() != 2 || tokens[0] != "predicates")
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": expected header 'predicates <N>'");
      suite.predicate_count =
          static_cast<std::size_t>(parse_uint(tokens[1], line_no, "the predicate count"));
      have_header = true;
      continue;
    }

    if (in_trailer)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                             ": trace record after a ground-truth section");

    if (tokens.size() < 3)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) +
                      ": expected '<test_id> <P|F> <id...>' with at least one predicate id");

    ExecutionTrace trace;
    trace.test_id = tokens[0];
    if (tokens[1] == "P")
      trace.outcome = Outcome::Pass;
    else if (tokens[1] == "F")
      trace.outcome = Outcome::Fail;
    else
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                             ": outcome must be P or F, got '" + tokens[1] + "'");

    trace.sequence.reserve(tokens.size() - 2);
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      std::uint64_t id = parse_uint(tokens[i], line_no, "a predicate id");
      if (id >= suite.predicate_count)
        throw Error(ErrorCode::DomainError,
                    "line " + std::to_string(line_no) + ": predicate id " + tokens[i] +
                        " out of range (N=" + std::to_string(suite.predicate_count) + ")");
      trace.sequence.push_back(static_cast<PredicateId>(id));
    }

    if (!seen_ids.insert(trace.test_id).second)
      throw Error(ErrorCode::DuplicateTestId,
                  "line " + std::to_string(line_no) + ": duplicate test id '" + trace.test_id + "'");
    suite.traces.push_back(std::move(trace));
  }

  if (!have_header)
    throw Error(ErrorCode::ParseError, "empty input: missing 'predicates <N>' header");
  if (suite.traces.empty()) throw Error(ErrorCode::ParseError, "input contains no traces");
  return suite;
}

TestSuite parse_suite_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open trace file '" + path + "'");
  return parse_suite(in);
}

void serialize_suite(const TestSuite& suite, std::ostream& out) {
  out << "predicates " << suite.predicate_count << "\n";
  for (const auto& trace : suite.traces) {
    out << trace.test_id << ' ' << (trace.outcome == Outcome::Pass ? 'P' : 'F');
    for (PredicateId id : trace.sequence) out << ' ' << id;
    out << "\n";
  }
  if (!suite.ground_truth_cc.empty()) {
    out << "#cc";
    for (const auto& id : suite.ground_truth_cc) out << ' ' << id;
    out << "\n";
  }
  if (!suite.faulty_predicates.empty()) {
    out << "#faulty";
    for (PredicateId pid : suite.faulty_predicates) out << ' ' << pid;
    out << "\n";
  }
}

SpectrumCounts compute_spectrum(const TestSuite& suite) {
  if (suite.traces.empty())
    throw Error(ErrorCode::ContractViolation, "compute_spectrum: empty suite");

  SpectrumCounts counts;
  counts.per_predicate.resize(suite.predicate_count);
  std::vector<char> seen(suite.predicate_count, 0);

  for (const auto& trace : suite.traces) {
    std::fill(seen.begin(), seen.end(), 0);
    for (PredicateId id : trace.sequence) seen[id] = 1;
    const bool failed = trace.outcome == Outcome::Fail;
    if (failed)
      ++counts.total_failed;
    else
      ++counts.total_passed;
    for (std::size_t p = 0; p < suite.predicate_count; ++p) {
      if (!seen[p]) continue;
      if (failed)
        ++counts.per_predicate[p].n_cf;
      else
        ++counts.per_predicate[p].n_cs;
    }
  }
  for (auto& entry : counts.per_predicate) {
    entry.n_uf = counts.total_failed - entry.n_cf;
    entry.n_us = counts.total_passed - entry.n_cs;
  }
  return counts;
}

TestSuite flip_outcomes(const TestSuite& suite, const std::set<std::string>& cc_ids) {
  TestSuite flipped = suite;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < flipped.traces.size(); ++i)
    index.emplace(flipped.traces[i].test_id, i);

  for (const auto& id : cc_ids) {
    auto it = index.find(id);
    if (it == index.end())
      throw Error(ErrorCode::NotFound, "flip_outcomes: test id '" + id + "' not found");
    ExecutionTrace& trace = flipped.traces[it->second];
    if (trace.outcome == Outcome::Fail)
      throw Error(ErrorCode::InvalidFlip,
                  "flip_outcomes: test '" + id + "' is not a passing trace");
    trace.outcome = Outcome::Fail;
  }
  return flipped;
}

}  // namespace ccd
