#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ccdetect/trace_model.hpp"

namespace ccd {

// One maximal diagonal run of equal elements between two sequences:
// s[row + q] == t[col + q] for 0 <= q < len, not extendable at either end.
struct DiagonalRun {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t len = 0;

  bool operator==(const DiagonalRun&) const = default;
};

struct MatchSelection {
  std::vector<DiagonalRun> runs;  // in selection order
  std::size_t matched_length() const;
};

inline constexpr const char* kKernelId = "maximal-nonoverlap-seq-v1";

// All maximal diagonal runs of the conceptual |s| x |t| match matrix,
// enumerated diagonal by diagonal without materializing the matrix.
std::vector<DiagonalRun> find_runs(std::span<const PredicateId> s,
                                   std::span<const PredicateId> t);

// Greedy selection: repeatedly take the longest remaining run (ties: smallest
// row-col, then smallest row) and subtract its row and column intervals from
// every other run, re-inserting the surviving fragments.
MatchSelection select_nonoverlapping(std::vector<DiagonalRun> runs);

// Directed greedy similarity; argument order can matter in degenerate tie
// cases, so callers wanting a symmetric value use similarity().
double directed_similarity(std::span<const PredicateId> s, std::span<const PredicateId> t);

// Symmetrized: (directed(s,t) + directed(t,s)) / 2. In [0, 1]; 1 for s == t;
// 0 when the sequences share no elements.
double similarity(std::span<const PredicateId> s, std::span<const PredicateId> t);

struct GramMatrix {
  std::vector<double> values;  // row-major m x m, symmetric, unit diagonal
  std::vector<int> labels;     // +1 pass, -1 fail
  std::vector<std::string> trace_ids;
  std::string kernel_id = kKernelId;

  std::size_t size() const { return labels.size(); }
  double at(std::size_t a, std::size_t b) const { return values[a * size() + b]; }
};

// Pairwise similarities over a suite. build_gram evaluates the upper
// triangle in parallel when compiled with OpenMP; build_gram_serial is the
// single-threaded reference kept for testing and benchmarking.
GramMatrix build_gram(const TestSuite& suite);
GramMatrix build_gram_serial(const TestSuite& suite);

// CSV: header row of test ids, then one row of entries per trace.
void write_gram_csv(const GramMatrix& gram, std::ostream& out);

}  // namespace ccd
