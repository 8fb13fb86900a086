#include "ccdetect/svm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ccdetect/errors.hpp"
#include "ccdetect/numfmt.hpp"

namespace ccd {

namespace {

constexpr double kStepEps = 1e-12;

class SmoSolver {
 public:
  SmoSolver(const GramMatrix& gram, double c_pos, double c_neg, double tol,
            long long max_passes)
      : gram_(gram),
        m_(gram.size()),
        c_pos_(c_pos),
        c_neg_(c_neg),
        tol_(tol),
        max_passes_(max_passes),
        alpha_(gram.size(), 0.0),
        f_(gram.size(), 0.0) {}

  // Runs the pairwise ascent; returns false if the pair-update cap was hit
  // (or ascent stalled) before the KKT gap closed.
  bool solve() {
    long long steps = 0;
    while (true) {
      const auto [i_up, i_low] = violating_pair();
      if (i_up < 0 || i_low < 0) return true;
      const double gap = -error(static_cast<std::size_t>(i_up)) +
                         error(static_cast<std::size_t>(i_low));
      if (gap <= tol_) return true;
      if (steps >= max_passes_) return false;

      const std::size_t i = static_cast<std::size_t>(i_up);
      bool progressed = false;
      const std::ptrdiff_t j = second_choice(i);
      if (j >= 0) progressed = take_step(i, static_cast<std::size_t>(j));
      if (!progressed) {
        for (std::size_t k = 0; k < m_ && !progressed; ++k)
          if (k != i && in_low(k)) progressed = take_step(i, k);
      }
      if (!progressed) return false;  // no ascent direction available
      ++steps;
    }
  }

  double compute_bias() const {
    double sum = 0.0;
    std::size_t unbound = 0;
    for (std::size_t j = 0; j < m_; ++j) {
      if (alpha_[j] > 0.0 && alpha_[j] < bound(j)) {
        sum += error(j);
        ++unbound;
      }
    }
    if (unbound > 0) return sum / static_cast<double>(unbound);

    // Midpoint of the feasible bias interval.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m_; ++j) {
      if (in_low(j)) lo = std::max(lo, error(j));
      if (in_up(j)) hi = std::min(hi, error(j));
    }
    if (!std::isfinite(lo)) return std::isfinite(hi) ? hi : 0.0;
    if (!std::isfinite(hi)) return lo;
    return 0.5 * (lo + hi);
  }

  const std::vector<double>& alphas() const { return alpha_; }

 private:
  double k(std::size_t a, std::size_t b) const { return gram_.at(a, b); }
  int y(std::size_t j) const { return gram_.labels[j]; }
  double bound(std::size_t j) const { return y(j) > 0 ? c_pos_ : c_neg_; }
  double error(std::size_t j) const { return f_[j] - y(j); }

  bool in_up(std::size_t j) const {
    return y(j) > 0 ? alpha_[j] < bound(j) : alpha_[j] > 0.0;
  }
  bool in_low(std::size_t j) const {
    return y(j) > 0 ? alpha_[j] > 0.0 : alpha_[j] < bound(j);
  }

  // Maximal-violating pair: first index maximizes -E over the up set, second
  // minimizes -E over the low set. Ties resolve to the smallest index.
  std::pair<std::ptrdiff_t, std::ptrdiff_t> violating_pair() const {
    std::ptrdiff_t up = -1, low = -1;
    for (std::size_t j = 0; j < m_; ++j) {
      if (in_up(j) && (up < 0 || -error(j) > -error(static_cast<std::size_t>(up)))) up = j;
      if (in_low(j) && (low < 0 || -error(j) < -error(static_cast<std::size_t>(low)))) low = j;
    }
    return {up, low};
  }

  // Second-order choice: maximize the estimated objective gain
  // (E_j - E_i)^2 / eta over the low set. A plain max |E_i - E_j| rule
  // oscillates indefinitely on this kernel's near-zero-curvature pairs.
  std::ptrdiff_t second_choice(std::size_t i) const {
    std::ptrdiff_t best = -1;
    double best_gain = -1.0;
    for (std::size_t j = 0; j < m_; ++j) {
      if (j == i || !in_low(j)) continue;
      const double d = error(j) - error(i);
      if (d <= 0.0) continue;
      const double eta = k(i, i) + k(j, j) - 2.0 * k(i, j);
      const double gain = d * d / std::max(eta, kStepEps);
      if (gain > best_gain) {
        best_gain = gain;
        best = static_cast<std::ptrdiff_t>(j);
      }
    }
    return best;
  }

  // Objective change from moving alpha_j to a_new (alpha_i compensates to
  // keep sum(alpha * y) constant).
  double objective_delta(std::size_t i, std::size_t j, double a_new) const {
    const double dj = a_new - alpha_[j];
    const double di = -static_cast<double>(y(i) * y(j)) * dj;
    return di + dj - di * y(i) * f_[i] - dj * y(j) * f_[j] -
           0.5 * (di * di * k(i, i) + dj * dj * k(j, j)) -
           di * dj * y(i) * y(j) * k(i, j);
  }

  bool take_step(std::size_t i, std::size_t j) {
    if (i == j) return false;
    const int yi = y(i), yj = y(j);
    const double s = yi * yj;
    const double ai = alpha_[i], aj = alpha_[j];
    const double ci = bound(i), cj = bound(j);

    double lo, hi;
    if (yi != yj) {
      lo = std::max(0.0, aj - ai);
      hi = std::min(cj, ci + aj - ai);
    } else {
      lo = std::max(0.0, ai + aj - ci);
      hi = std::min(cj, ai + aj);
    }
    if (hi <= lo) return false;

    const double ei = error(i), ej = error(j);
    const double eta = k(i, i) + k(j, j) - 2.0 * k(i, j);

    double aj_new;
    if (eta > 0.0) {
      aj_new = std::clamp(aj + yj * (ei - ej) / eta, lo, hi);
    } else {
      // Indefinite or flat curvature: step to the better box endpoint.
      const double d_lo = objective_delta(i, j, lo);
      const double d_hi = objective_delta(i, j, hi);
      if (d_lo > d_hi + kStepEps)
        aj_new = lo;
      else if (d_hi > d_lo + kStepEps)
        aj_new = hi;
      else
        return false;
      if (objective_delta(i, j, aj_new) <= kStepEps) return false;
    }
    if (std::fabs(aj_new - aj) < kStepEps * (aj_new + aj + kStepEps)) return false;

    double ai_new = ai + s * (aj - aj_new);
    ai_new = snap(ai_new, ci);
    aj_new = snap(aj_new, cj);

    const double dqi = (ai_new - ai) * yi;
    const double dqj = (aj_new - aj) * yj;
    for (std::size_t idx = 0; idx < m_; ++idx)
      f_[idx] += dqi * k(i, idx) + dqj * k(j, idx);
    alpha_[i] = ai_new;
    alpha_[j] = aj_new;
    return true;
  }

  static double snap(double a, double c) {
    const double eps = kStepEps * std::max(1.0, c);
    if (a < eps) return 0.0;
    if (a > c - eps) return c;
    return a;
  }

  const GramMatrix& gram_;
  std::size_t m_;
  double c_pos_, c_neg_, tol_;
  long long max_passes_;
  std::vector<double> alpha_;
  std::vector<double> f_;  // f_j = sum_k alpha_k y_k K_jk (no bias)
};

void validate_gram(const GramMatrix& gram) {
  const std::size_t m = gram.size();
  if (gram.values.size() != m * m || gram.trace_ids.size() != m)
    throw Error(ErrorCode::ContractViolation, "train: inconsistent gram matrix shape");
  for (std::size_t a = 0; a < m; ++a) {
    if (std::fabs(gram.at(a, a) - 1.0) > 1e-12)
      throw Error(ErrorCode::ContractViolation, "train: gram diagonal is not 1");
    for (std::size_t b = a + 1; b < m; ++b)
      if (std::fabs(gram.at(a, b) - gram.at(b, a)) > 1e-12)
        throw Error(ErrorCode::ContractViolation, "train: gram matrix is not symmetric");
  }
}

}  // namespace

SvmModel train(const GramMatrix& gram, const SvmConfig& config) {
  const std::size_t m = gram.size();
  if (m < 2) throw Error(ErrorCode::TrainingError, "train: need at least 2 points");
  validate_gram(gram);

  std::size_t n_pos = 0;
  for (int label : gram.labels)
    if (label > 0) ++n_pos;
  const std::size_t n_neg = m - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw Error(ErrorCode::TrainingError,
                "train: both passing and failing traces are required");

  if (config.c <= 0.0 || config.kkt_tolerance <= 0.0 ||
      (config.c_pos && *config.c_pos <= 0.0) || (config.c_neg && *config.c_neg <= 0.0))
    throw Error(ErrorCode::ConfigError, "train: box bounds and tolerance must be positive");

  const double c_pos = config.c_pos.value_or(config.c);
  const double c_neg = config.c_neg.value_or(
      config.c * static_cast<double>(n_pos) / static_cast<double>(n_neg));
  const long long max_passes =
      config.max_passes.value_or(10LL * static_cast<long long>(m));

  SmoSolver solver(gram, c_pos, c_neg, config.kkt_tolerance, max_passes);
  const bool converged = solver.solve();

  SvmModel model;
  model.alphas = solver.alphas();
  model.labels = gram.labels;
  model.bias = solver.compute_bias();
  model.kernel_ref = gram.kernel_id;
  model.c_pos = c_pos;
  model.c_neg = c_neg;
  model.converged = converged;
  for (std::size_t j = 0; j < m; ++j)
    if (model.alphas[j] > 0.0) model.support_indices.push_back(j);
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> sv_similarities) {
  if (sv_similarities.size() != model.support_indices.size())
    throw Error(ErrorCode::ContractViolation,
                "decision_value: similarity vector does not match support vector count");
  double sum = 0.0;
  for (std::size_t r = 0; r < model.support_indices.size(); ++r) {
    const std::size_t sv = model.support_indices[r];
    sum += model.alphas[sv] * model.labels[sv] * sv_similarities[r];
  }
  return sum - model.bias;
}

Outcome classify(double decision) {
  return decision > 0.0 ? Outcome::Pass : Outcome::Fail;
}

double dual_objective(const GramMatrix& gram, std::span<const double> alphas) {
  const std::size_t m = gram.size();
  if (alphas.size() != m)
    throw Error(ErrorCode::ContractViolation, "dual_objective: alpha size mismatch");
  double linear = 0.0, quad = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    linear += alphas[a];
    for (std::size_t b = 0; b < m; ++b)
      quad += alphas[a] * alphas[b] * gram.labels[a] * gram.labels[b] * gram.at(a, b);
  }
  return linear - 0.5 * quad;
}

void write_model(const SvmModel& model, std::ostream& out) {
  out << "svm-model v1\n";
  out << "kernel " << model.kernel_ref << "\n";
  out << "points " << model.alphas.size() << "\n";
  out << "bias " << format_sig(model.bias, 17) << "\n";
  out << "support";
  for (std::size_t sv : model.support_indices) out << ' ' << sv;
  out << "\n";
  out << "alpha";
  for (double a : model.alphas) out << ' ' << format_sig(a, 17);
  out << "\n";
  out << "label";
  for (int y : model.labels) out << ' ' << y;
  out << "\n";
}

SvmModel read_model(std::istream& in) {
  auto fail = [](const std::string& why) -> Error {
    return Error(ErrorCode::ParseError, "model record: " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != "svm-model v1") throw fail("missing 'svm-model v1'");

  SvmModel model;
  std::size_t points = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "kernel") {
      ss >> model.kernel_ref;
    } else if (key == "points") {
      ss >> points;
    } else if (key == "bias") {
      ss >> model.bias;
    } else if (key == "support") {
      std::size_t idx;
      while (ss >> idx) model.support_indices.push_back(idx);
    } else if (key == "alpha") {
      double a;
      while (ss >> a) model.alphas.push_back(a);
    } else if (key == "label") {
      int y;
      while (ss >> y) model.labels.push_back(y);
    } else if (!key.empty()) {
      throw fail("unknown field '" + key + "'");
    }
  }
  if (model.alphas.size() != points || model.labels.size() != points)
    throw fail("field lengths disagree with point count");
  std::vector<std::size_t> derived;
  for (std::size_t j = 0; j < points; ++j)
    if (model.alphas[j] > 0.0) derived.push_back(j);
  if (derived != model.support_indices)
    throw fail("support indices disagree with alpha values");
  return model;
}

}  // namespace ccd
