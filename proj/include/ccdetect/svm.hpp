#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccdetect/seqkernel.hpp"
#include "ccdetect/trace_model.hpp"

namespace ccd {

struct SvmConfig {
  double c = 1.0;                       // base box bound
  std::optional<double> c_pos;          // default: c
  std::optional<double> c_neg;          // default: c * (n_pass / n_fail)
  double kkt_tolerance = 1e-3;
  std::optional<long long> max_passes;  // pair-update cap, default 10 * m
};

struct SvmModel {
  std::vector<double> alphas;                // per training point
  std::vector<int> labels;                   // +1 / -1
  std::vector<std::size_t> support_indices;  // {j : alpha_j > 0}
  double bias = 0.0;
  std::string kernel_ref;
  double c_pos = 0.0;     // resolved box bounds used in training
  double c_neg = 0.0;
  bool converged = true;  // false: pair-update cap hit before KKT satisfaction

  double box_bound(std::size_t j) const { return labels[j] > 0 ? c_pos : c_neg; }
};

// Soft-margin dual solver over a precomputed Gram matrix. Pairwise
// coordinate ascent with deterministic working-pair selection: first choice
// is the point with the largest KKT violation, second choice maximizes the
// second-order gain estimate. Non-positive pair curvature (the kernel is
// not proven PSD) steps to the better box endpoint instead.
SvmModel train(const GramMatrix& gram, const SvmConfig& config);

// Pre-sign decision value: sum over support vectors of alpha * label * k
// minus bias. sv_similarities must align with model.support_indices.
double decision_value(const SvmModel& model, std::span<const double> sv_similarities);

// Positive decision values classify as Pass; zero resolves to Fail.
Outcome classify(double decision);

// Dual objective sum(alpha) - 1/2 sum_jk alpha_j alpha_k y_j y_k K_jk.
double dual_objective(const GramMatrix& gram, std::span<const double> alphas);

// Text record round trip for reproducibility checks.
void write_model(const SvmModel& model, std::ostream& out);
SvmModel read_model(std::istream& in);

}  // namespace ccd
