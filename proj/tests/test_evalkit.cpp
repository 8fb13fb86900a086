#include "ccdetect/evalkit.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "ccdetect/errors.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace ccd;
using ccd::testing::load_table1;

namespace {

// Brute force over all 2^n sign assignments; independent of the
// distribution-table path used by the implementation.
double brute_force_p(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> abs_d;
  std::vector<int> sign;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - x[i];
    if (d == 0.0) continue;
    abs_d.push_back(std::fabs(d));
    sign.push_back(d > 0 ? 1 : -1);
  }
  const std::size_t n = abs_d.size();
  // midranks
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      below += abs_d[j] < abs_d[i];
      equal += abs_d[j] == abs_d[i];
    }
    ranks[i] = below + (equal + 1.0) / 2.0;
  }
  double w_obs = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (sign[i] > 0) w_obs += ranks[i];
  std::uint64_t tail = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) w += ranks[i];
    if (w >= w_obs) ++tail;
  }
  return static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(n));
}

}  // namespace

TEST_CASE("exam basics") {
  Ranking r;
  r.entries = {{0, 0.9, 1, 1}, {1, 0.5, 2, 4}, {2, 0.5, 2, 4}, {3, 0.5, 2, 4}, {4, 0.1, 5, 5}};

  SUBCASE("faulty alone at the top") {
    const ExamResult e = exam(r, {0}, 5);
    CHECK(e.statements_examined_best == 1);
    CHECK(e.statements_examined_worst == 1);
    CHECK(e.exam_best == doctest::Approx(20.0));
    CHECK(e.exam_worst == doctest::Approx(20.0));
  }
  SUBCASE("faulty tied with two others") {
    Ranking top_tie;
    top_tie.entries = {{0, 0.9, 1, 3}, {1, 0.9, 1, 3}, {2, 0.9, 1, 3}, {3, 0.1, 4, 4}};
    const ExamResult e = exam(top_tie, {1}, 4);
    CHECK(e.statements_examined_best == 1);
    CHECK(e.statements_examined_worst == 3);
  }
  SUBCASE("multi-fault takes the earliest reached") {
    const ExamResult e = exam(r, {1, 4}, 5);
    CHECK(e.statements_examined_best == 2);
    CHECK(e.statements_examined_worst == 4);
  }
  SUBCASE("unranked faulty id") {
    CHECK_THROWS_AS(exam(r, {9}, 5), Error);
    CHECK_THROWS_AS(exam(r, {}, 5), Error);
  }
}

TEST_CASE("exam on the table-1 tarantula ranking, faulty P2") {
  const Ranking r = rank(load_table1(), Formula::Tarantula);
  const ExamResult e = exam(r, {1}, 5);
  CHECK(e.statements_examined_best == 2);   // below P1, tied with P5
  CHECK(e.statements_examined_worst == 3);
  CHECK(e.exam_best == doctest::Approx(40.0));
  CHECK(e.exam_worst == doctest::Approx(60.0));
}

TEST_CASE("a new higher-scored predicate never lowers the statements examined") {
  Ranking r;
  r.entries = {{0, 0.9, 1, 1}, {1, 0.5, 2, 2}, {2, 0.1, 3, 3}};
  const ExamResult base = exam(r, {1}, 4);
  Ranking grown;
  grown.entries = {{3, 0.95, 1, 1}, {0, 0.9, 2, 2}, {1, 0.5, 3, 3}, {2, 0.1, 4, 4}};
  const ExamResult bigger = exam(grown, {1}, 4);
  CHECK(bigger.statements_examined_best >= base.statements_examined_best);
  CHECK(bigger.statements_examined_worst >= base.statements_examined_worst);
}

TEST_CASE("prf") {
  SUBCASE("table-9 style values: P=0.87, R=0.91 give F=0.8896") {
    // 9100 detected, 8700 true, 7917 common: P = 0.87 and R = 0.91 exactly
    std::set<std::string> detected, truth;
    for (int i = 0; i < 9100; ++i) detected.insert("t" + std::to_string(i));
    for (int i = 0; i < 7917; ++i) truth.insert("t" + std::to_string(i));
    for (int i = 0; i < 783; ++i) truth.insert("x" + std::to_string(i));
    const PRF m = prf(detected, truth);
    CHECK(m.precision == doctest::Approx(0.87).epsilon(1e-12));
    CHECK(m.recall == doctest::Approx(0.91).epsilon(1e-12));
    CHECK(m.f_measure == doctest::Approx(0.8896).epsilon(5e-4));
  }
  SUBCASE("identical non-empty sets") {
    const PRF m = prf({"a", "b"}, {"a", "b"});
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f_measure == 1.0);
  }
  SUBCASE("disjoint non-empty sets") {
    const PRF m = prf({"a"}, {"b"});
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f_measure == 0.0);
  }
  SUBCASE("swapping the sets swaps precision and recall, f fixed") {
    const std::set<std::string> a{"1", "2", "3"}, b{"2", "3", "4", "5"};
    const PRF ab = prf(a, b);
    const PRF ba = prf(b, a);
    CHECK(ab.precision == ba.recall);
    CHECK(ab.recall == ba.precision);
    CHECK(ab.f_measure == doctest::Approx(ba.f_measure).epsilon(1e-15));
  }
}

TEST_CASE("safety_precision") {
  Ranking before, after;
  before.entries = {{0, 0.75, 1, 1}, {1, 0.67, 2, 3}, {4, 0.67, 2, 3}};
  SUBCASE("identical rankings improve nothing") {
    const auto d = safety_precision(before, before, 1);
    CHECK(!d.safety_improved);
    CHECK(!d.precision_improved);
  }
  SUBCASE("score 0.67 -> 1.0 with R 1 -> 0 improves both") {
    after.entries = {{1, 1.0, 1, 1}, {0, 0.7, 2, 2}, {4, 0.4, 3, 3}};
    const auto d = safety_precision(before, after, 1);
    CHECK(d.score_before == doctest::Approx(0.67));
    CHECK(d.score_after == doctest::Approx(1.0));
    CHECK(d.r_before == 1);
    CHECK(d.r_after == 0);
    CHECK(d.safety_improved);
    CHECK(d.precision_improved);
  }
  SUBCASE("score rises but R unchanged: safety only") {
    after.entries = {{0, 0.9, 1, 1}, {1, 0.8, 2, 2}, {4, 0.4, 3, 3}};
    const auto d = safety_precision(before, after, 1);
    CHECK(d.safety_improved);
    CHECK(!d.precision_improved);
  }
  SUBCASE("unranked fault") {
    CHECK_THROWS_AS(safety_precision(before, before, 9), Error);
  }
}

TEST_CASE("wilcoxon known cases") {
  SUBCASE("six pairs, x strictly smaller, distinct differences: p = 1/64") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    const std::vector<double> y{3, 5, 7, 9, 11, 13};
    const WilcoxonResult r = wilcoxon_one_tailed(x, y);
    CHECK(r.n_used == 6);
    CHECK(r.w_statistic == 21.0);
    CHECK(r.p_value == 1.0 / 64.0);  // exact dyadic rational
    CHECK(r.confidence == 1.0 - 1.0 / 64.0);
  }
  SUBCASE("single pair, x < y: p = 1/2") {
    const WilcoxonResult r = wilcoxon_one_tailed(std::vector<double>{1.0},
                                                 std::vector<double>{2.0});
    CHECK(r.p_value == 0.5);
  }
  SUBCASE("all differences zero") {
    const std::vector<double> same{1, 2, 3};
    CHECK_THROWS_AS(wilcoxon_one_tailed(same, same), Error);
    try {
      wilcoxon_one_tailed(same, same);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UndefinedTest);
    }
  }
  SUBCASE("mismatched lengths") {
    CHECK_THROWS_AS(wilcoxon_one_tailed(std::vector<double>{1.0},
                                        std::vector<double>{1.0, 2.0}),
                    Error);
  }
}

TEST_CASE("wilcoxon exact p matches brute-force enumeration for n <= 10") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> val(0, 6);
  for (std::size_t n = 1; n <= 10; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> x(n), y(n);
      bool any_nonzero = false;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = val(rng);
        y[i] = val(rng);  // integer values force ties and zero differences
        any_nonzero |= x[i] != y[i];
      }
      if (!any_nonzero) continue;
      const WilcoxonResult r = wilcoxon_one_tailed(x, y);
      CHECK(r.p_value == brute_force_p(x, y));  // both exact dyadic rationals
      CHECK(r.p_value > 0.0);
      CHECK(r.p_value <= 1.0);
      CHECK(r.confidence == 1.0 - r.p_value);
    }
  }
}

TEST_CASE("wilcoxon normal approximation matches the frozen reference") {
  // 25 integer pairs (one zero difference, several ties); reference p-value
  // computed with an independent statistics package.
  const std::vector<double> x{25, 14, 35, 32, 13, 29, 33, 17, 38, 35, 24, 33, 18,
                              35, 24, 20, 36, 18, 17, 16, 14, 26, 17, 22, 10};
  const std::vector<double> y{31, 15, 42, 32, 24, 24, 30, 21, 47, 36, 23, 42, 22,
                              33, 22, 23, 47, 14, 12, 27, 21, 28, 22, 26, 8};
  const WilcoxonResult r = wilcoxon_one_tailed(x, y);
  CHECK(r.n_used == 24);
  CHECK(r.w_statistic == doctest::Approx(231.5).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.010212995987440935).epsilon(1e-10));
}
