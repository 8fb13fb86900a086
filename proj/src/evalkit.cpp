#include "ccdetect/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "ccdetect/errors.hpp"

namespace ccd {

ExamResult exam(const Ranking& ranking, const std::set<PredicateId>& faulty,
                std::size_t n_statements) {
  if (faulty.empty())
    throw Error(ErrorCode::DomainError, "exam: faulty set is empty");
  if (n_statements == 0)
    throw Error(ErrorCode::DomainError, "exam: n_statements must be positive");

  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t worst = std::numeric_limits<std::size_t>::max();
  for (PredicateId f : faulty) {
    const RankedPredicate* entry = ranking.find(f);
    if (!entry)
      throw Error(ErrorCode::DomainError,
                  "exam: faulty predicate " + std::to_string(f) + " is not ranked");
    best = std::min(best, entry->best_rank);
    worst = std::min(worst, entry->worst_rank);
  }
  ExamResult result;
  result.statements_examined_best = best;
  result.statements_examined_worst = worst;
  result.exam_best = 100.0 * static_cast<double>(best) / static_cast<double>(n_statements);
  result.exam_worst = 100.0 * static_cast<double>(worst) / static_cast<double>(n_statements);
  return result;
}

PRF prf(const std::set<std::string>& detected, const std::set<std::string>& truth) {
  std::size_t hit = 0;
  for (const auto& id : detected) hit += truth.count(id);

  PRF result;
  result.precision =
      detected.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(detected.size());
  result.recall =
      truth.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(truth.size());
  const double pr = result.precision + result.recall;
  result.f_measure = pr > 0.0 ? 2.0 * result.precision * result.recall / pr : 0.0;
  return result;
}

SafetyPrecisionDelta safety_precision(const Ranking& before, const Ranking& after,
                                      PredicateId faulty) {
  const RankedPredicate* b = before.find(faulty);
  const RankedPredicate* a = after.find(faulty);
  if (!b || !a)
    throw Error(ErrorCode::DomainError,
                "safety_precision: faulty predicate " + std::to_string(faulty) +
                    " is not ranked in both rankings");
  SafetyPrecisionDelta delta;
  delta.score_before = b->score;
  delta.score_after = a->score;
  delta.r_before = b->best_rank - 1;
  delta.r_after = a->best_rank - 1;
  delta.safety_improved = delta.score_after > delta.score_before;
  delta.precision_improved = delta.r_after < delta.r_before;
  return delta;
}

namespace {

// Midranks doubled so ties stay integral: positions p+1..p+k average to
// p + (k+1)/2, doubled 2p + k + 1.
std::vector<std::uint64_t> doubled_midranks(const std::vector<double>& abs_diffs) {
  const std::size_t n = abs_diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return abs_diffs[a] < abs_diffs[b]; });

  std::vector<std::uint64_t> ranks2(n, 0);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos + 1;
    while (end < n && abs_diffs[order[end]] == abs_diffs[order[pos]]) ++end;
    const std::uint64_t doubled = 2 * pos + (end - pos) + 1;
    for (std::size_t q = pos; q < end; ++q) ranks2[order[q]] = doubled;
    pos = end;
  }
  return ranks2;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_one_tailed(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw Error(ErrorCode::ContractViolation,
                "wilcoxon: samples must be paired and non-empty");

  std::vector<double> abs_diffs;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - x[i];  // positive supports "x fewer than y"
    if (d == 0.0) continue;
    abs_diffs.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  const std::size_t n = abs_diffs.size();
  if (n == 0)
    throw Error(ErrorCode::UndefinedTest, "wilcoxon: all paired differences are zero");

  const auto ranks2 = doubled_midranks(abs_diffs);
  std::uint64_t w2 = 0;
  std::uint64_t total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += ranks2[i];
    if (positive[i]) w2 += ranks2[i];
  }

  WilcoxonResult result;
  result.n_used = n;
  result.w_statistic = static_cast<double>(w2) / 2.0;

  if (n <= 20) {
    // Exact tail count over all 2^n sign assignments via a sum-distribution
    // table; p is an exact dyadic rational.
    std::vector<std::uint64_t> dist(total2 + 1, 0);
    dist[0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t r = ranks2[i];
      for (std::size_t s = total2 + 1; s-- > r;) dist[s] += dist[s - r];
    }
    std::uint64_t tail = 0;
    for (std::size_t s = w2; s <= total2; ++s) tail += dist[s];
    result.p_value =
        static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(n));
  } else {
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    double tie_term = 0.0;
    std::vector<double> sorted(abs_diffs);
    std::sort(sorted.begin(), sorted.end());
    std::size_t pos = 0;
    while (pos < sorted.size()) {
      std::size_t end = pos + 1;
      while (end < sorted.size() && sorted[end] == sorted[pos]) ++end;
      const double t = static_cast<double>(end - pos);
      tie_term += t * t * t - t;
      pos = end;
    }
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    const double w = result.w_statistic;
    const double z = (w - mean - 0.5) / std::sqrt(var);  // continuity correction
    result.p_value = normal_upper_tail(z);
  }

  result.p_value = std::clamp(result.p_value, std::numeric_limits<double>::min(), 1.0);
  result.confidence = 1.0 - result.p_value;
  return result;
}

}  // namespace ccd
