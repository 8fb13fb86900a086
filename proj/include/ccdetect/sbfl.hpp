#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccdetect/trace_model.hpp"

namespace ccd {

enum class Formula { Tarantula, Ochiai, Naish };

Formula parse_formula(const std::string& name);  // throws UndefinedFormula
const char* formula_name(Formula f);

// susp(p) = (n_cf/n_f) / (n_cs/n_s + n_cf/n_f); 0 when the predicate is
// executed by no test at all.
double tarantula(const PredicateSpectrum& p, std::uint64_t n_f, std::uint64_t n_s);

// susp(p) = n_cf / sqrt(n_f * (n_cs + n_cf)); 0 when n_cs + n_cf = 0.
double ochiai(const PredicateSpectrum& p, std::uint64_t n_f);

// susp(p) = -1 if n_uf > 0, else n_us.
double naish(const PredicateSpectrum& p);

struct RankedPredicate {
  PredicateId predicate = 0;
  double score = 0.0;
  std::size_t best_rank = 0;   // 1 + #{q : score(q) > score(p)}
  std::size_t worst_rank = 0;  // #{q : score(q) >= score(p)}
};

struct Ranking {
  Formula formula = Formula::Tarantula;
  std::vector<RankedPredicate> entries;  // descending score, ties by predicate id

  const RankedPredicate* find(PredicateId p) const;
};

// Tie groups use exact rational comparison for Tarantula and Naish and a
// 1e-12 epsilon for Ochiai.
Ranking rank(const TestSuite& suite, Formula formula);

// CSV: predicate,score,best_rank,worst_rank
void write_ranking_csv(const Ranking& ranking, std::ostream& out);
Ranking read_ranking_csv(std::istream& in);

}  // namespace ccd
