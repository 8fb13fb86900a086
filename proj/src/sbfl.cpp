#include "ccdetect/sbfl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ccdetect/errors.hpp"
#include "ccdetect/numfmt.hpp"

namespace ccd {

Formula parse_formula(const std::string& name) {
  if (name == "tarantula") return Formula::Tarantula;
  if (name == "ochiai") return Formula::Ochiai;
  if (name == "naish") return Formula::Naish;
  throw Error(ErrorCode::UndefinedFormula, "unknown formula '" + name + "'");
}

const char* formula_name(Formula f) {
  switch (f) {
    case Formula::Tarantula: return "tarantula";
    case Formula::Ochiai: return "ochiai";
    case Formula::Naish: return "naish";
  }
  return "?";
}

double tarantula(const PredicateSpectrum& p, std::uint64_t n_f, std::uint64_t n_s) {
  if (n_f == 0 || n_s == 0)
    throw Error(ErrorCode::UndefinedFormula,
                "tarantula requires at least one failing and one passing test");
  if (p.n_cf == 0 && p.n_cs == 0) return 0.0;
  const double cf = static_cast<double>(p.n_cf) / static_cast<double>(n_f);
  const double cs = static_cast<double>(p.n_cs) / static_cast<double>(n_s);
  return cf / (cs + cf);
}

double ochiai(const PredicateSpectrum& p, std::uint64_t n_f) {
  if (n_f == 0)
    throw Error(ErrorCode::UndefinedFormula, "ochiai requires at least one failing test");
  if (p.n_cf + p.n_cs == 0) return 0.0;
  return static_cast<double>(p.n_cf) /
         std::sqrt(static_cast<double>(n_f) * static_cast<double>(p.n_cf + p.n_cs));
}

double naish(const PredicateSpectrum& p) {
  if (p.n_uf > 0) return -1.0;
  return static_cast<double>(p.n_us);
}

const RankedPredicate* Ranking::find(PredicateId p) const {
  for (const auto& e : entries)
    if (e.predicate == p) return &e;
  return nullptr;
}

namespace {

// Score with an exact comparison key. Tarantula and Naish scores are
// rationals of the spectrum counts; Ochiai needs an epsilon.
struct ScoredPredicate {
  PredicateId predicate = 0;
  double value = 0.0;
  long long num = 0;
  long long den = 1;
  bool exact = true;
};

int compare_scores(const ScoredPredicate& a, const ScoredPredicate& b) {
  if (a.exact && b.exact) {
    const __int128 lhs = static_cast<__int128>(a.num) * b.den;
    const __int128 rhs = static_cast<__int128>(b.num) * a.den;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
  }
  if (std::fabs(a.value - b.value) <= 1e-12) return 0;
  return a.value < b.value ? -1 : 1;
}

}  // namespace

Ranking rank(const TestSuite& suite, Formula formula) {
  const SpectrumCounts counts = compute_spectrum(suite);
  const std::uint64_t n_f = counts.total_failed;
  const std::uint64_t n_s = counts.total_passed;
  if (n_f == 0)
    throw Error(ErrorCode::UndefinedFormula, "ranking requires at least one failing test");
  if (formula == Formula::Tarantula && n_s == 0)
    throw Error(ErrorCode::UndefinedFormula, "tarantula requires at least one passing test");

  std::vector<ScoredPredicate> scored(suite.predicate_count);
  for (std::size_t p = 0; p < suite.predicate_count; ++p) {
    const auto& e = counts.per_predicate[p];
    auto& s = scored[p];
    s.predicate = static_cast<PredicateId>(p);
    switch (formula) {
      case Formula::Tarantula: {
        s.value = tarantula(e, n_f, n_s);
        s.num = static_cast<long long>(e.n_cf * n_s);
        s.den = static_cast<long long>(e.n_cs * n_f + e.n_cf * n_s);
        if (s.den == 0) s.den = 1;  // never-executed predicate, score 0
        break;
      }
      case Formula::Ochiai:
        s.value = ochiai(e, n_f);
        s.exact = false;
        break;
      case Formula::Naish:
        s.value = naish(e);
        s.num = e.n_uf > 0 ? -1 : static_cast<long long>(e.n_us);
        break;
    }
  }

  std::sort(scored.begin(), scored.end(), [](const ScoredPredicate& a, const ScoredPredicate& b) {
    const int c = compare_scores(a, b);
    if (c != 0) return c > 0;  // descending score
    return a.predicate < b.predicate;
  });

  Ranking ranking;
  ranking.formula = formula;
  ranking.entries.resize(scored.size());
  std::size_t group_start = 0;
  while (group_start < scored.size()) {
    std::size_t group_end = group_start + 1;
    while (group_end < scored.size() &&
           compare_scores(scored[group_end], scored[group_start]) == 0)
      ++group_end;
    for (std::size_t i = group_start; i < group_end; ++i) {
      ranking.entries[i] = {scored[i].predicate, scored[i].value, group_start + 1, group_end};
    }
    group_start = group_end;
  }
  return ranking;
}

void write_ranking_csv(const Ranking& ranking, std::ostream& out) {
  out << "predicate,score,best_rank,worst_rank\n";
  for (const auto& e : ranking.entries)
    out << e.predicate << ',' << format_sig(e.score) << ',' << e.best_rank << ','
        << e.worst_rank << "\n";
}

Ranking read_ranking_csv(std::istream& in) {
  Ranking ranking;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line))
    throw Error(ErrorCode::ParseError, "ranking csv: empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "predicate,score,best_rank,worst_rank")
    throw Error(ErrorCode::ParseError, "ranking csv: unexpected header '" + line + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    RankedPredicate e;
    try {
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("predicate");
      e.predicate = static_cast<PredicateId>(std::stoul(field));
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("score");
      e.score = std::stod(field);
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("best_rank");
      e.best_rank = std::stoul(field);
      if (!std::getline(ss, field, ',')) throw std::invalid_argument("worst_rank");
      e.worst_rank = std::stoul(field);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError,
                  "ranking csv line " + std::to_string(line_no) + ": malformed record");
    }
    ranking.entries.push_back(e);
  }
  return ranking;
}

}  // namespace ccd
