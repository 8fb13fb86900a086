// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ccdetect/cc_detector.hpp"
#include "ccdetect/evalkit.hpp"
#include "ccdetect/sbfl.hpp"
#include "ccdetect/seqkernel.hpp"
#include "ccdetect/svm.hpp"
#include "ccdetect/synthgen.hpp"
#include "ccdetect/trace_model.hpp"

#ifndef CCD_TEST_DATA_DIR
#define CCD_TEST_DATA_DIR "tests/data"
#endif
#ifndef CCD_CLI_PATH
#define CCD_CLI_PATH "build/tools/ccdetect"
#endif

using namespace ccd;
namespace fs = std::filesystem;

namespace {

std::string g_data_dir = CCD_TEST_DATA_DIR;
std::string g_cli_path = CCD_CLI_PATH;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TestSuite table1() { return parse_suite_file(g_data_dir + "/table1.trace"); }

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

// --- criterion 1: motivating-example reproduction --------------------------

Check criterion1() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const TestSuite suite = table1();

  const Ranking tar = rank(suite, Formula::Tarantula);
  const Ranking och = rank(suite, Formula::Ochiai);
  const Ranking nai = rank(suite, Formula::Naish);
  c.expect(close(tar.find(0)->score, 0.75, 1e-4), "tarantula P1");
  c.expect(close(tar.find(1)->score, 0.6667, 1e-4), "tarantula P2");
  c.expect(close(tar.find(4)->score, 0.6667, 1e-4), "tarantula P5");
  c.expect(close(och.find(0)->score, 0.8660, 1e-4), "ochiai P1");
  c.expect(close(och.find(1)->score, 0.8165, 1e-4), "ochiai P2");
  c.expect(close(och.find(4)->score, 0.8165, 1e-4), "ochiai P5");
  c.expect(close(nai.find(0)->score, 4.0, 1e-4), "naish P1");
  c.expect(close(nai.find(1)->score, 3.0, 1e-4), "naish P2");

  const TestSuite flipped = flip_outcomes(suite, {"t7", "t8", "t10"});
  const Ranking tar2 = rank(flipped, Formula::Tarantula);
  c.expect(close(tar2.find(1)->score, 1.0, 1e-4), "tarantula* P2");
  c.expect(close(tar2.find(2)->score, 1.0, 1e-4), "tarantula* P3");
  c.expect(close(tar2.find(3)->score, 1.0, 1e-4), "tarantula* P4");
  c.expect(tar2.find(1)->best_rank == 1, "P2 best rank after flipping");

  c.expect(seconds_since(t0) < 1.0, "runtime >= 1 s");
  return c;
}

// --- criterion 2: kernel worked example -------------------------------------

Check criterion2() {
  Check c;
  const std::vector<PredicateId> s{1, 2, 2, 3, 4, 5, 6};
  const std::vector<PredicateId> t{1, 2, 3, 4, 5, 7, 5};
  double warm = 0;
  for (int i = 0; i < 100; ++i) warm += similarity(s, t);
  if (warm < 0) std::printf("impossible\n");  // keep the warmup observable
  double best = 1e9;
  double value = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    value = similarity(s, t);
    best = std::min(best, seconds_since(t0));
  }
  c.expect(std::fabs(value - 5.0 / 14.0) < 1e-12, "similarity != 5/14");
  c.expect(best < 1e-3, "runtime >= 1 ms");
  return c;
}

// --- criterion 3: kernel property suite -------------------------------------

std::vector<PredicateId> random_seq(std::mt19937& rng, std::size_t lo, std::size_t hi,
                                    PredicateId alphabet) {
  std::uniform_int_distribution<std::size_t> len(lo, hi);
  std::uniform_int_distribution<PredicateId> sym(0, alphabet - 1);
  std::vector<PredicateId> s(len(rng));
  for (auto& x : s) x = sym(rng);
  return s;
}

std::vector<DiagonalRun> brute_runs(const std::vector<PredicateId>& s,
                                    const std::vector<PredicateId>& t) {
  std::vector<DiagonalRun> runs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (s[i] != t[j]) continue;
      if (i > 0 && j > 0 && s[i - 1] == t[j - 1]) continue;
      std::size_t len = 0;
      while (i + len < s.size() && j + len < t.size() && s[i + len] == t[j + len]) ++len;
      runs.push_back({i, j, len});
    }
  }
  return runs;
}

Check criterion3() {
  Check c;
  std::mt19937 rng(271828);
  auto runs_equal = [](std::vector<DiagonalRun> a, std::vector<DiagonalRun> b) {
    auto lt = [](const DiagonalRun& x, const DiagonalRun& y) {
      return std::tuple(x.row, x.col, x.len) < std::tuple(y.row, y.col, y.len);
    };
    std::sort(a.begin(), a.end(), lt);
    std::sort(b.begin(), b.end(), lt);
    return a == b;
  };

  int brute_checked = 0;
  for (int iter = 0; iter < 1200; ++iter) {
    const bool small = iter % 2 == 0;  // half the pairs stay brute-forceable
    const auto s = random_seq(rng, 1, small ? 6 : 50, small ? 3 : 10);
    const auto t = random_seq(rng, 1, small ? 6 : 50, small ? 3 : 10);
    const double st = similarity(s, t);
    if (!(st >= 0.0 && st <= 1.0)) c.expect(false, "similarity out of [0,1]");
    if (similarity(s, s) != 1.0) c.expect(false, "sim(s,s) != 1");
    if (st != similarity(t, s)) c.expect(false, "asymmetric after symmetrization");
    const auto sel = select_nonoverlapping(find_runs(s, t));
    if (sel.matched_length() > std::min(s.size(), t.size()))
      c.expect(false, "matched length exceeds min length");
    if (s.size() <= 6 && t.size() <= 6) {
      ++brute_checked;
      if (!runs_equal(find_runs(s, t), brute_runs(s, t)))
        c.expect(false, "find_runs disagrees with brute force");
    }
    if (!c.ok) break;
  }
  c.expect(brute_checked >= 500, "too few brute-force comparisons");
  return c;
}

// --- criterion 4: solver correctness ----------------------------------------

Check criterion4() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  GramMatrix two;
  two.values = {1, 0, 0, 1};
  two.labels = {+1, -1};
  two.trace_ids = {"a", "b"};
  const SvmModel m2 = train(two, SvmConfig{});
  c.expect(close(m2.alphas[0], 1.0, 1e-6), "alpha_1 != 1");
  c.expect(close(m2.alphas[1], 1.0, 1e-6), "alpha_2 != 1");
  c.expect(close(m2.bias, 0.0, 1e-6), "bias != 0");

  std::mt19937 rng(987);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t m = 4 + rng() % 27;  // m <= 30
    const std::size_t dim = 6;
    std::vector<std::vector<double>> pts(m, std::vector<double>(dim, 0.0));
    GramMatrix gram;
    gram.labels.resize(m);
    gram.trace_ids.resize(m, "p");
    for (std::size_t i = 0; i < m; ++i) {
      gram.labels[i] = i % 2 == 0 ? +1 : -1;
      pts[i][0] = gram.labels[i] * 3.0 + noise(rng);
      for (std::size_t d = 1; d < dim; ++d) pts[i][d] = noise(rng);
    }
    auto dot = [&](std::size_t a, std::size_t b) {
      double s = 0;
      for (std::size_t d = 0; d < dim; ++d) s += pts[a][d] * pts[b][d];
      return s;
    };
    gram.values.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      gram.values[a * m + a] = 1.0;
      for (std::size_t b = a + 1; b < m; ++b) {
        const double v = dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
        gram.values[a * m + b] = v;
        gram.values[b * m + a] = v;
      }
    }
    SvmConfig cfg;
    cfg.c_pos = 1e3;
    cfg.c_neg = 1e3;
    const SvmModel model = train(gram, cfg);
    std::vector<double> sims(model.support_indices.size());
    for (std::size_t j = 0; j < m && c.ok; ++j) {
      for (std::size_t r = 0; r < sims.size(); ++r)
        sims[r] = gram.at(model.support_indices[r], j);
      const double f = decision_value(model, sims);
      const double yf = gram.labels[j] * f;
      double residual;
      if (model.alphas[j] <= 0.0)
        residual = std::max(0.0, 1.0 - yf);
      else if (model.alphas[j] >= model.box_bound(j))
        residual = std::max(0.0, yf - 1.0);
      else
        residual = std::fabs(yf - 1.0);
      if (residual > 10.0 * cfg.kkt_tolerance)
        c.expect(false, "KKT residual " + std::to_string(residual) + " at instance " +
                            std::to_string(inst));
      if (classify(f) != (gram.labels[j] > 0 ? Outcome::Pass : Outcome::Fail))
        c.expect(false, "training error at instance " + std::to_string(inst));
    }
    if (!c.ok) break;
  }
  c.expect(seconds_since(t0) < 5.0, "runtime >= 5 s");
  return c;
}

// --- criterion 5: end-to-end cc detection on synthetic suites ---------------

Check criterion5(std::string& note) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  double precision_sum = 0.0, recall_sum = 0.0;
  int rank_not_worse = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig sc;
    sc.n_predicates = 50;
    sc.n_tests = 200;
    sc.fail_rate = 0.15;
    sc.cc_rate = 0.2;
    sc.noise = 0.05;
    sc.seed = seed;
    const TestSuite suite = generate(sc);
    const CCReport report = detect_cc(suite, SvmConfig{});
    const PRF m = prf(report.cc_ids, suite.ground_truth_cc);
    precision_sum += m.precision;
    recall_sum += m.recall;

    const PredicateId faulty = *suite.faulty_predicates.begin();
    const Ranking before = rank(suite, Formula::Ochiai);
    const Ranking after = rank(report.flipped_suite, Formula::Ochiai);
    if (after.find(faulty)->best_rank <= before.find(faulty)->best_rank) ++rank_not_worse;
  }
  const double mean_p = precision_sum / 10.0;
  const double mean_r = recall_sum / 10.0;
  {
    char buf[128];
    std::snprintf(buf, sizeof buf, "mean precision %.3f, mean recall %.3f, rank kept %d/10",
                  mean_p, mean_r, rank_not_worse);
    note = buf;
  }
  c.expect(mean_p >= 0.80, "mean precision < 0.80");
  c.expect(mean_r >= 0.80, "mean recall < 0.80");
  c.expect(rank_not_worse >= 8, "ochiai best rank degraded on more than 2 seeds");
  c.expect(seconds_since(t0) < 60.0, "runtime >= 60 s");
  return c;
}

// --- criterion 6: Eq. 16 reproduction ----------------------------------------

Check criterion6() {
  Check c;
  // |detected| = 9100, |truth| = 8700, overlap 7917: P = 0.87, R = 0.91 exactly
  std::set<std::string> detected, truth;
  for (int i = 0; i < 9100; ++i) detected.insert("t" + std::to_string(i));
  for (int i = 0; i < 7917; ++i) truth.insert("t" + std::to_string(i));
  for (int i = 0; i < 783; ++i) truth.insert("x" + std::to_string(i));
  const PRF m = prf(detected, truth);
  c.expect(close(m.precision, 0.87, 1e-12), "precision != 0.87");
  c.expect(close(m.recall, 0.91, 1e-12), "recall != 0.91");
  c.expect(close(m.f_measure, 0.8896, 5e-4), "f-measure not 0.8896 +- 5e-4");
  return c;
}

// --- criterion 7: wilcoxon oracle --------------------------------------------

Check criterion7() {
  Check c;
  std::mt19937 rng(55);
  std::uniform_int_distribution<int> val(0, 5);
  for (std::size_t n = 1; n <= 10 && c.ok; ++n) {
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<double> x(n), y(n);
      bool nonzero = false;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = val(rng);
        y[i] = val(rng);
        nonzero |= x[i] != y[i];
      }
      if (!nonzero) continue;
      const WilcoxonResult r = wilcoxon_one_tailed(x, y);

      // brute force over all sign assignments
      std::vector<double> abs_d;
      std::vector<int> sgn;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = y[i] - x[i];
        if (d == 0.0) continue;
        abs_d.push_back(std::fabs(d));
        sgn.push_back(d > 0 ? 1 : -1);
      }
      const std::size_t k = abs_d.size();
      std::vector<double> ranks(k);
      for (std::size_t i = 0; i < k; ++i) {
        double below = 0, equal = 0;
        for (std::size_t j = 0; j < k; ++j) {
          below += abs_d[j] < abs_d[i];
          equal += abs_d[j] == abs_d[i];
        }
        ranks[i] = below + (equal + 1.0) / 2.0;
      }
      double w_obs = 0;
      for (std::size_t i = 0; i < k; ++i)
        if (sgn[i] > 0) w_obs += ranks[i];
      std::uint64_t tail = 0;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < k; ++i)
          if (mask & (std::uint64_t{1} << i)) w += ranks[i];
        if (w >= w_obs) ++tail;
      }
      const double p_brute = static_cast<double>(tail) / std::ldexp(1.0, static_cast<int>(k));
      if (r.p_value != p_brute) {
        c.expect(false, "exact p mismatch at n=" + std::to_string(n));
        break;
      }
    }
  }
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const std::vector<double> y{2, 4, 6, 8, 10, 12};
  c.expect(wilcoxon_one_tailed(x, y).p_value == 1.0 / 64.0, "all-positive 6-pair p != 1/64");
  return c;
}

// --- criterion 8: pipeline determinism ---------------------------------------

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Check criterion8() {
  Check c;
  const fs::path base = fs::temp_directory_path() / "ccdetect-acceptance";
  fs::remove_all(base);
  fs::create_directories(base);

  // a synthetic input with ground truth exercises every pipeline stage
  const fs::path input = base / "input.trace";
  {
    SynthConfig sc;
    sc.n_tests = 60;
    sc.seed = 2025;
    std::ofstream out(input);
    serialize_suite(generate(sc), out);
  }
  const fs::path out1 = base / "run1";
  const fs::path out2 = base / "run2";
  for (const fs::path& dir : {out1, out2}) {
    const std::string cmd = "\"" + g_cli_path + "\" pipeline --in " + input.string() +
                            " --out " + dir.string() + " >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      c.expect(false, "pipeline run failed");
      return c;
    }
  }
  const char* artifacts[] = {"gram.csv",        "cc_report.txt", "flipped.trace",
                             "rank_before.csv", "rank_after.csv", "metrics.txt"};
  for (const char* name : artifacts) {
    if (!fs::exists(out1 / name) || !fs::exists(out2 / name)) {
      c.expect(false, std::string("missing artifact ") + name);
      continue;
    }
    if (read_file(out1 / name) != read_file(out2 / name))
      c.expect(false, std::string("artifact differs: ") + name);
  }
  fs::remove_all(base);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_data_dir = argv[1];
  if (argc > 2) g_cli_path = argv[2];

  struct Row {
    int id;
    const char* name;
    Check result;
    std::string note;
  };
  std::vector<Row> rows;
  rows.push_back({1, "motivating-example reproduction", criterion1(), ""});
  rows.push_back({2, "kernel worked example 5/14", criterion2(), ""});
  rows.push_back({3, "kernel property suite", criterion3(), ""});
  rows.push_back({4, "solver correctness", criterion4(), ""});
  {
    std::string note;
    Check c5 = criterion5(note);
    rows.push_back({5, "end-to-end cc detection", c5, note});
  }
  rows.push_back({6, "precision/recall/f-measure reproduction", criterion6(), ""});
  rows.push_back({7, "wilcoxon exact oracle", criterion7(), ""});
  rows.push_back({8, "pipeline determinism", criterion8(), ""});

  int failures = 0;
  for (const auto& row : rows) {
    const bool ok = row.result.ok;
    failures += !ok;
    std::string line = ok ? "PASS" : "FAIL";
    if (!row.note.empty()) line += "  (" + row.note + ")";
    if (!row.result.detail.empty()) line += "  [" + row.result.detail + "]";
    std::printf("criterion %d  %-42s %s\n", row.id, row.name, line.c_str());
  }

  // informational: recovery of the published cc set on the tiny motivating
  // example is configuration-sensitive and intentionally not a gate
  try {
    const CCReport report = detect_cc(table1(), SvmConfig{});
    std::string ids;
    for (const auto& id : report.cc_ids) ids += (ids.empty() ? "" : " ") + id;
    std::printf("note: table-1 detected cc set = {%s} (soft target {t10 t7 t8})\n",
                ids.c_str());
  } catch (const std::exception& e) {
    std::printf("note: table-1 detection raised: %s\n", e.what());
  }

  std::printf("acceptance: %zu/%zu criteria passed\n", rows.size() - failures, rows.size());
  return failures == 0 ? 0 : 1;
}
