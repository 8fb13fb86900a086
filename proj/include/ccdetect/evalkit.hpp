#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>

#include "ccdetect/sbfl.hpp"
#include "ccdetect/trace_model.hpp"

namespace ccd {

struct ExamResult {
  double exam_best = 0.0;   // percent of statements examined, best case
  double exam_worst = 0.0;  // percent, worst case
  std::size_t statements_examined_best = 0;
  std::size_t statements_examined_worst = 0;
};

// Statements examined until the first faulty element is reached, under
// best/worst tie ordering. n_statements supplies the percentage base so
// statement-level totals can be injected when known.
ExamResult exam(const Ranking& ranking, const std::set<PredicateId>& faulty,
                std::size_t n_statements);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

// precision = |truth & detected| / |detected|, recall = |truth & detected| /
// |truth|, f = 2PR/(P+R). Empty detected gives precision 0; empty truth gives
// recall 1.
PRF prf(const std::set<std::string>& detected, const std::set<std::string>& truth);

struct SafetyPrecisionDelta {
  double score_before = 0.0;
  double score_after = 0.0;
  std::size_t r_before = 0;  // statements scored strictly higher than the fault
  std::size_t r_after = 0;
  bool safety_improved = false;    // score_after > score_before
  bool precision_improved = false; // r_after < r_before
};

SafetyPrecisionDelta safety_precision(const Ranking& before, const Ranking& after,
                                      PredicateId faulty);

struct WilcoxonResult {
  double p_value = 0.0;
  double confidence = 0.0;  // 1 - p_value
  double w_statistic = 0.0; // sum of ranks of positive (y - x) differences
  std::size_t n_used = 0;   // pairs left after dropping zero differences
};

// One-tailed signed-rank test of H1 "x requires fewer than y". Zero
// differences are dropped; |differences| are ranked with midranks. Exact
// null distribution by enumeration for n <= 20, normal approximation with
// tie and continuity correction beyond.
WilcoxonResult wilcoxon_one_tailed(std::span<const double> x, std::span<const double> y);

}  // namespace ccd
