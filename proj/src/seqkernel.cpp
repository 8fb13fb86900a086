#include "ccdetect/seqkernel.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <utility>

#include "ccdetect/errors.hpp"
#include "ccdetect/numfmt.hpp"

namespace ccd {

std::size_t MatchSelection::matched_length() const {
  std::size_t total = 0;
  for (const auto& r : runs) total += r.len;
  return total;
}

std::vector<DiagonalRun> find_runs(std::span<const PredicateId> s,
                                   std::span<const PredicateId> t) {
  if (s.empty() || t.empty())
    throw Error(ErrorCode::InvalidTrace, "find_runs: sequences must be non-empty");

  std::vector<DiagonalRun> runs;
  const std::int64_t ns = static_cast<std::int64_t>(s.size());
  const std::int64_t nt = static_cast<std::int64_t>(t.size());

  // Diagonal offset d = col - row, from bottom-left to top-right.
  for (std::int64_t d = -(ns - 1); d <= nt - 1; ++d) {
    const std::int64_t i0 = d >= 0 ? 0 : -d;
    const std::int64_t j0 = d >= 0 ? d : 0;
    const std::int64_t steps = std::min(ns - i0, nt - j0);
    std::int64_t run_start = -1;
    for (std::int64_t q = 0; q < steps; ++q) {
      const bool match = s[static_cast<std::size_t>(i0 + q)] ==
                         t[static_cast<std::size_t>(j0 + q)];
      if (match && run_start < 0) run_start = q;
      if (!match && run_start >= 0) {
        runs.push_back({static_cast<std::size_t>(i0 + run_start),
                        static_cast<std::size_t>(j0 + run_start),
                        static_cast<std::size_t>(q - run_start)});
        run_start = -1;
      }
    }
    if (run_start >= 0)
      runs.push_back({static_cast<std::size_t>(i0 + run_start),
                      static_cast<std::size_t>(j0 + run_start),
                      static_cast<std::size_t>(steps - run_start)});
  }
  return runs;
}

namespace {

// Greedy priority: longest first, then smallest (row - col), then smallest row.
bool run_precedes(const DiagonalRun& a, const DiagonalRun& b) {
  if (a.len != b.len) return a.len > b.len;
  const std::int64_t da = static_cast<std::int64_t>(a.row) - static_cast<std::int64_t>(a.col);
  const std::int64_t db = static_cast<std::int64_t>(b.row) - static_cast<std::int64_t>(b.col);
  if (da != db) return da < db;
  return a.row < b.row;
}

// Removes from `r` every position whose row or column is covered by
// `chosen`, appending the surviving maximal fragments to `out`.
void subtract_intervals(const DiagonalRun& r, const DiagonalRun& chosen,
                        std::vector<DiagonalRun>& out) {
  const std::int64_t len = static_cast<std::int64_t>(r.len);
  auto blocked_span = [&](std::int64_t sel_start, std::int64_t sel_len,
                          std::int64_t base) -> std::pair<std::int64_t, std::int64_t> {
    const std::int64_t lo = std::max<std::int64_t>(0, sel_start - base);
    const std::int64_t hi = std::min(len, sel_start + sel_len - base);
    return {lo, hi};  // empty if hi <= lo
  };
  auto [rlo, rhi] = blocked_span(static_cast<std::int64_t>(chosen.row),
                                 static_cast<std::int64_t>(chosen.len),
                                 static_cast<std::int64_t>(r.row));
  auto [clo, chi] = blocked_span(static_cast<std::int64_t>(chosen.col),
                                 static_cast<std::int64_t>(chosen.len),
                                 static_cast<std::int64_t>(r.col));

  std::int64_t q = 0;
  while (q < len) {
    const bool blocked = (q >= rlo && q < rhi) || (q >= clo && q < chi);
    if (blocked) {
      ++q;
      continue;
    }
    std::int64_t end = q;
    while (end < len && !((end >= rlo && end < rhi) || (end >= clo && end < chi))) ++end;
    out.push_back({r.row + static_cast<std::size_t>(q), r.col + static_cast<std::size_t>(q),
                   static_cast<std::size_t>(end - q)});
    q = end;
  }
}

}  // namespace

MatchSelection select_nonoverlapping(std::vector<DiagonalRun> runs) {
  MatchSelection selection;
  std::vector<DiagonalRun> pool = std::move(runs);
  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < pool.size(); ++k)
      if (run_precedes(pool[k], pool[best])) best = k;
    const DiagonalRun chosen = pool[best];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    selection.runs.push_back(chosen);

    std::vector<DiagonalRun> survivors;
    survivors.reserve(pool.size());
    for (const auto& r : pool) subtract_intervals(r, chosen, survivors);
    pool = std::move(survivors);
  }
  return selection;
}

double directed_similarity(std::span<const PredicateId> s, std::span<const PredicateId> t) {
  auto selection = select_nonoverlapping(find_runs(s, t));
  if (selection.runs.empty()) return 0.0;  // no shared elements
  const double total = static_cast<double>(selection.matched_length());
  const double k = static_cast<double>(selection.runs.size());
  const double longest = static_cast<double>(std::max(s.size(), t.size()));
  return total / (k * longest);
}

double similarity(std::span<const PredicateId> s, std::span<const PredicateId> t) {
  return 0.5 * (directed_similarity(s, t) + directed_similarity(t, s));
}

namespace {

GramMatrix make_shell(const TestSuite& suite) {
  if (suite.traces.size() < 2)
    throw Error(ErrorCode::ContractViolation, "build_gram: suite needs at least 2 traces");
  for (const auto& trace : suite.traces)
    if (trace.sequence.empty())
      throw Error(ErrorCode::InvalidTrace,
                  "build_gram: trace '" + trace.test_id + "' has an empty sequence");

  GramMatrix gram;
  const std::size_t m = suite.traces.size();
  gram.values.assign(m * m, 0.0);
  gram.labels.reserve(m);
  gram.trace_ids.reserve(m);
  for (const auto& trace : suite.traces) {
    gram.labels.push_back(outcome_label(trace.outcome));
    gram.trace_ids.push_back(trace.test_id);
  }
  for (std::size_t a = 0; a < m; ++a) gram.values[a * m + a] = 1.0;
  return gram;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> upper_triangle_pairs(std::size_t m) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::uint32_t a = 0; a < m; ++a)
    for (std::uint32_t b = a + 1; b < m; ++b) pairs.emplace_back(a, b);
  return pairs;
}

void fill_pair(GramMatrix& gram, const TestSuite& suite, std::size_t a, std::size_t b) {
  const double v = similarity(suite.traces[a].sequence, suite.traces[b].sequence);
  const std::size_t m = gram.size();
  gram.values[a * m + b] = v;
  gram.values[b * m + a] = v;
}

}  // namespace

GramMatrix build_gram_serial(const TestSuite& suite) {
  GramMatrix gram = make_shell(suite);
  for (const auto& [a, b] : upper_triangle_pairs(suite.traces.size()))
    fill_pair(gram, suite, a, b);
  return gram;
}

GramMatrix build_gram(const TestSuite& suite) {
  GramMatrix gram = make_shell(suite);
  const auto pairs = upper_triangle_pairs(suite.traces.size());
  const std::int64_t n = static_cast<std::int64_t>(pairs.size());
  // Entries are independent; each iteration writes to its own two slots.
#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t p = 0; p < n; ++p) fill_pair(gram, suite, pairs[p].first, pairs[p].second);
  return gram;
}

void write_gram_csv(const GramMatrix& gram, std::ostream& out) {
  const std::size_t m = gram.size();
  for (std::size_t a = 0; a < m; ++a) out << (a ? "," : "") << gram.trace_ids[a];
  out << "\n";
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b)
      out << (b ? "," : "") << format_sig(gram.at(a, b));
    out << "\n";
  }
}

}  // namespace ccd
