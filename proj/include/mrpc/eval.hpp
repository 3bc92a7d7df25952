#ifndef MRPC_EVAL_HPP
#define MRPC_EVAL_HPP

#include <chrono>
#include <span>
#include <utility>
#include <vector>

#include "mrpc/errors.hpp"

namespace mrpc {

// Co-occurrence counts between a predicted and a reference labeling; the
// shared substrate for all four external metrics.
struct Contingency {
  std::vector<std::vector<long long>> table;  // [pred cluster][true class]
  std::vector<long long> pred_sizes;
  std::vector<long long> true_sizes;
  long long n = 0;

  static Contingency from_labels(std::span<const int> pred, std::span<const int> truth);
};

// Fraction of point pairs on which the two labelings agree (co-clustered in
// both or separated in both).
double rand_index(std::span<const int> pred, std::span<const int> truth);

// Mean over predicted clusters of the dominant true-class fraction.
double purity(std::span<const int> pred, std::span<const int> truth);

// Pairwise F1 over co-clustered pairs; 0 when there are no true positives.
double f_measure(std::span<const int> pred, std::span<const int> truth);

// Mutual information normalized by the geometric mean of the entropies
// (natural logs); 1 when both entropies vanish, 0 when exactly one does.
double nmi(std::span<const int> pred, std::span<const int> truth);

struct QualityReport {
  double ri = 0.0;
  double cp = 0.0;
  double f_measure = 0.0;
  double nmi = 0.0;
  double runtime_s = 0.0;
};

QualityReport make_quality_report(std::span<const int> pred, std::span<const int> truth,
                                  double runtime_s);

// Wall-clock wrapper (monotonic clock) around an arbitrary task.
template <typename F>
auto timed_run(F&& task) {
  const auto t0 = std::chrono::steady_clock::now();
  auto result = std::forward<F>(task)();
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  return std::pair{std::move(result), dt.count()};
}

}  // namespace mrpc

#endif  // MRPC_EVAL_HPP
