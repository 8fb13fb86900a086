// ccdetect: detect coincidentally correct tests in a trace file with a
// sequence-kernel SVM, flip them, and re-rank predicates with SBFL formulas.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccdetect/cc_detector.hpp"
#include "ccdetect/errors.hpp"
#include "ccdetect/evalkit.hpp"
#include "ccdetect/numfmt.hpp"
#include "ccdetect/sbfl.hpp"
#include "ccdetect/seqkernel.hpp"
#include "ccdetect/svm.hpp"
#include "ccdetect/synthgen.hpp"
#include "ccdetect/trace_model.hpp"

namespace fs = std::filesystem;
using namespace ccd;

namespace {

TestSuite read_suite(const std::string& path) {
  if (path == "-") return parse_suite(std::cin);
  return parse_suite_file(path);
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open output file '" + path + "'");
  fn(out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open input file '" + path + "'");
  return in;
}

// Two-column csv "x,y" of paired statement counts for the signed-rank test.
std::pair<std::vector<double>, std::vector<double>> read_paired_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || (line != "x,y" && line != "x,y\r"))
    throw Error(ErrorCode::ParseError, "paired csv '" + path + "': expected header 'x,y'");
  std::vector<double> x, y;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      x.push_back(std::stod(line.substr(0, comma)));
      y.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError,
                  "paired csv '" + path + "' line " + std::to_string(line_no) + ": malformed");
    }
  }
  return {std::move(x), std::move(y)};
}

struct MetricsReport {
  std::string formula;
  std::size_t n_statements = 0;
  std::optional<PredicateId> faulty;
  std::optional<ExamResult> exam_before, exam_after;
  std::optional<SafetyPrecisionDelta> delta;
  std::optional<PRF> detection;
  std::size_t detected_cc = 0, truth_cc = 0;
  std::optional<WilcoxonResult> wilcoxon;
};

void write_metrics(const MetricsReport& m, bool csv, std::ostream& out) {
  const char sep = csv ? ',' : ' ';
  auto line = [&](const std::string& key, const std::string& value) {
    if (csv)
      out << key << sep << value << "\n";
    else
      out << key << ":" << sep << value << "\n";
  };
  if (!csv) out << "metrics\n";
  line("formula", m.formula);
  line("predicates", std::to_string(m.n_statements));
  line("faulty_predicate", m.faulty ? std::to_string(*m.faulty) : "unknown");
  if (m.exam_before && m.exam_after) {
    line("statements_best_before", std::to_string(m.exam_before->statements_examined_best));
    line("statements_worst_before", std::to_string(m.exam_before->statements_examined_worst));
    line("statements_best_after", std::to_string(m.exam_after->statements_examined_best));
    line("statements_worst_after", std::to_string(m.exam_after->statements_examined_worst));
    line("exam_best_before_pct", format_fixed(m.exam_before->exam_best));
    line("exam_worst_before_pct", format_fixed(m.exam_before->exam_worst));
    line("exam_best_after_pct", format_fixed(m.exam_after->exam_best));
    line("exam_worst_after_pct", format_fixed(m.exam_after->exam_worst));
  }
  if (m.delta) {
    line("score_before", format_fixed(m.delta->score_before));
    line("score_after", format_fixed(m.delta->score_after));
    line("higher_ranked_before", std::to_string(m.delta->r_before));
    line("higher_ranked_after", std::to_string(m.delta->r_after));
    line("safety_improved", m.delta->safety_improved ? "yes" : "no");
    line("precision_improved", m.delta->precision_improved ? "yes" : "no");
  }
  if (m.detection) {
    line("detected_cc", std::to_string(m.detected_cc));
    line("truth_cc", std::to_string(m.truth_cc));
    line("precision_pct", format_fixed(100.0 * m.detection->precision));
    line("recall_pct", format_fixed(100.0 * m.detection->recall));
    line("f_measure_pct", format_fixed(100.0 * m.detection->f_measure));
  }
  if (m.wilcoxon) {
    line("wilcoxon_n", std::to_string(m.wilcoxon->n_used));
    line("wilcoxon_w", format_fixed(m.wilcoxon->w_statistic, 1));
    line("wilcoxon_p", format_sig(m.wilcoxon->p_value, 6));
    line("wilcoxon_confidence", format_sig(m.wilcoxon->confidence, 6));
  }
}

// Single-fault view of a possibly multi-fault ground truth: the fault
// reached earliest in the before ranking (ties to the smallest id).
std::optional<PredicateId> resolve_faulty(const std::set<PredicateId>& faulty,
                                          const Ranking& before) {
  std::optional<PredicateId> best;
  std::size_t best_rank = 0;
  for (PredicateId f : faulty) {
    const RankedPredicate* e = before.find(f);
    if (!e) continue;
    if (!best || e->best_rank < best_rank) {
      best = f;
      best_rank = e->best_rank;
    }
  }
  return best;
}

void fill_ranking_metrics(MetricsReport& m, const Ranking& before, const Ranking& after,
                          const std::set<PredicateId>& faulty) {
  if (faulty.empty()) return;
  m.faulty = resolve_faulty(faulty, before);
  m.exam_before = exam(before, faulty, m.n_statements);
  m.exam_after = exam(after, faulty, m.n_statements);
  if (m.faulty) m.delta = safety_precision(before, after, *m.faulty);
}

int error_exit(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  return static_cast<int>(e.code());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coincidental-correctness detection and fault localization toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes (module errors):\n"
      "  10 parse error        11 domain error       12 duplicate test id\n"
      "  13 not found          14 invalid flip       15 invalid trace\n"
      "  20 training error     21 contract violation 30 unknown formula\n"
      "  31 undefined test     40 config error       50 i/o error\n"
      "Usage errors exit with the CLI parser's own nonzero codes.");

  const std::vector<std::string> formulas{"tarantula", "ochiai", "naish"};

  // synth
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic suite");
  SynthConfig synth_cfg;
  std::string synth_out = "-";
  synth->add_option("--predicates", synth_cfg.n_predicates, "predicate count");
  synth->add_option("--tests", synth_cfg.n_tests, "test count");
  synth->add_option("--fail-rate", synth_cfg.fail_rate, "fraction of failing tests");
  synth->add_option("--cc-rate", synth_cfg.cc_rate,
                    "fraction of passing tests that execute the fault");
  synth->add_option("--len-min", synth_cfg.trace_len_range.first, "minimum trace length");
  synth->add_option("--len-max", synth_cfg.trace_len_range.second, "maximum trace length");
  synth->add_option("--noise", synth_cfg.noise, "per-element substitution probability");
  synth->add_option("--seed", synth_cfg.seed, "rng seed");
  synth->add_option("--out", synth_out, "output trace file ('-' for stdout)");
  synth->callback([&] {
    const TestSuite suite = generate(synth_cfg);
    with_output(synth_out, [&](std::ostream& out) {
      out << "# generator mt19937_64 seed=" << synth_cfg.seed << "\n";
      serialize_suite(suite, out);
    });
  });

  // gram
  auto* gram_cmd = app.add_subcommand("gram", "emit the pairwise similarity matrix as csv");
  std::string gram_in = "-", gram_out = "-";
  gram_cmd->add_option("--in", gram_in, "trace file ('-' for stdin)");
  gram_cmd->add_option("--out", gram_out, "csv output ('-' for stdout)");
  gram_cmd->callback([&] {
    const GramMatrix gram = build_gram(read_suite(gram_in));
    with_output(gram_out, [&](std::ostream& out) { write_gram_csv(gram, out); });
  });

  // rank
  auto* rank_cmd = app.add_subcommand("rank", "rank predicates by suspiciousness");
  std::string rank_in = "-", rank_out = "-", rank_formula = "tarantula";
  rank_cmd->add_option("--in", rank_in, "trace file ('-' for stdin)");
  rank_cmd->add_option("--out", rank_out, "csv output ('-' for stdout)");
  rank_cmd->add_option("--formula", rank_formula, "suspiciousness formula")
      ->check(CLI::IsMember(formulas));
  rank_cmd->callback([&] {
    const Ranking ranking = rank(read_suite(rank_in), parse_formula(rank_formula));
    with_output(rank_out, [&](std::ostream& out) { write_ranking_csv(ranking, out); });
  });

  // detect-cc
  auto* detect = app.add_subcommand("detect-cc", "classify passing tests against the model");
  std::string det_in = "-", det_out = "-", det_flipped;
  SvmConfig det_cfg;
  double det_c = 1.0, det_tol = 1e-3;
  detect->add_option("--in", det_in, "trace file ('-' for stdin)");
  detect->add_option("--out", det_out, "report output ('-' for stdout)");
  detect->add_option("--flipped", det_flipped,
                     "flipped suite path (default: <out>.flipped when --out is a file)");
  detect->add_option("--c", det_c, "base box bound");
  detect->add_option("--kkt-tol", det_tol, "kkt tolerance");
  detect->callback([&] {
    det_cfg.c = det_c;
    det_cfg.kkt_tolerance = det_tol;
    const CCReport report = detect_cc(read_suite(det_in), det_cfg);
    with_output(det_out, [&](std::ostream& out) { write_cc_report(report, out); });
    if (det_flipped.empty() && det_out != "-") det_flipped = det_out + ".flipped";
    if (!det_flipped.empty())
      with_output(det_flipped,
                  [&](std::ostream& out) { serialize_suite(report.flipped_suite, out); });
  });

  // eval
  auto* eval = app.add_subcommand("eval", "compute evaluation metrics from rankings");
  std::string ev_in, ev_before, ev_after, ev_ccreport, ev_wilcoxon, ev_out = "-";
  std::string ev_report = "text", ev_formula = "tarantula";
  eval->add_option("--in", ev_in, "trace file with ground-truth sections")->required();
  eval->add_option("--before", ev_before, "ranking csv before flipping")->required();
  eval->add_option("--after", ev_after, "ranking csv after flipping")->required();
  eval->add_option("--cc-report", ev_ccreport, "detect-cc report for precision/recall");
  eval->add_option("--wilcoxon", ev_wilcoxon, "paired csv (x,y) for the signed-rank test");
  eval->add_option("--formula", ev_formula, "formula label for the report")
      ->check(CLI::IsMember(formulas));
  eval->add_option("--report", ev_report, "report format")
      ->check(CLI::IsMember({"text", "csv"}));
  eval->add_option("--out", ev_out, "report output ('-' for stdout)");
  eval->callback([&] {
    const TestSuite suite = read_suite(ev_in);
    std::ifstream before_in = open_input(ev_before);
    std::ifstream after_in = open_input(ev_after);
    const Ranking before = read_ranking_csv(before_in);
    const Ranking after = read_ranking_csv(after_in);

    MetricsReport m;
    m.formula = ev_formula;
    m.n_statements = suite.predicate_count;
    fill_ranking_metrics(m, before, after, suite.faulty_predicates);
    if (!ev_ccreport.empty()) {
      std::ifstream rep_in = open_input(ev_ccreport);
      const std::set<std::string> detected = read_cc_report_ids(rep_in);
      m.detected_cc = detected.size();
      m.truth_cc = suite.ground_truth_cc.size();
      m.detection = prf(detected, suite.ground_truth_cc);
    }
    if (!ev_wilcoxon.empty()) {
      const auto [x, y] = read_paired_csv(ev_wilcoxon);
      m.wilcoxon = wilcoxon_one_tailed(x, y);
    }
    with_output(ev_out, [&](std::ostream& out) { write_metrics(m, ev_report == "csv", out); });
  });

  // pipeline
  auto* pipe = app.add_subcommand(
      "pipeline", "parse -> detect-cc -> flip -> rank before/after -> eval");
  std::string pl_in = "-", pl_out_dir, pl_formula = "tarantula", pl_report = "text";
  double pl_c = 1.0, pl_tol = 1e-3;
  pipe->add_option("--in", pl_in, "trace file ('-' for stdin)");
  pipe->add_option("--out", pl_out_dir, "output directory for all artifacts")->required();
  pipe->add_option("--formula", pl_formula, "suspiciousness formula")
      ->check(CLI::IsMember(formulas));
  pipe->add_option("--c", pl_c, "base box bound");
  pipe->add_option("--kkt-tol", pl_tol, "kkt tolerance");
  pipe->add_option("--report", pl_report, "metrics format")
      ->check(CLI::IsMember({"text", "csv"}));
  pipe->callback([&] {
    const TestSuite suite = read_suite(pl_in);
    std::error_code ec;
    fs::create_directories(pl_out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create directory '" + pl_out_dir + "'");
    auto path = [&](const char* name) { return (fs::path(pl_out_dir) / name).string(); };

    const GramMatrix gram = build_gram(suite);
    with_output(path("gram.csv"), [&](std::ostream& out) { write_gram_csv(gram, out); });

    SvmConfig cfg;
    cfg.c = pl_c;
    cfg.kkt_tolerance = pl_tol;
    const CCReport report = detect_cc(suite, gram, cfg);
    with_output(path("cc_report.txt"),
                [&](std::ostream& out) { write_cc_report(report, out); });
    with_output(path("flipped.trace"),
                [&](std::ostream& out) { serialize_suite(report.flipped_suite, out); });

    const Formula formula = parse_formula(pl_formula);
    const Ranking before = rank(suite, formula);
    const Ranking after = rank(report.flipped_suite, formula);
    with_output(path("rank_before.csv"),
                [&](std::ostream& out) { write_ranking_csv(before, out); });
    with_output(path("rank_after.csv"),
                [&](std::ostream& out) { write_ranking_csv(after, out); });

    MetricsReport m;
    m.formula = pl_formula;
    m.n_statements = suite.predicate_count;
    fill_ranking_metrics(m, before, after, suite.faulty_predicates);
    if (!suite.ground_truth_cc.empty()) {
      m.detected_cc = report.cc_ids.size();
      m.truth_cc = suite.ground_truth_cc.size();
      m.detection = prf(report.cc_ids, suite.ground_truth_cc);
    }
    const bool csv = pl_report == "csv";
    with_output(path(csv ? "metrics.csv" : "metrics.txt"),
                [&](std::ostream& out) { write_metrics(m, csv, out); });

    std::cout << "wrote " << pl_out_dir << "/{gram.csv, cc_report.txt, flipped.trace, "
              << "rank_before.csv, rank_after.csv, " << (csv ? "metrics.csv" : "metrics.txt")
              << "}\n";
    if (!report.converged)
      std::cout << "warning: solver hit the pair-update cap before closing the kkt gap\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    return error_exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return 0;
}
