#include "mrpc/eval.hpp"

#include <array>
#include <cmath>
#include <unordered_map>
#include <vector>

namespace mrpc {

namespace {

void require_same_length(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size())
    throw LengthMismatch("label lists of length " + std::to_string(pred.size()) +
                         " and " + std::to_string(truth.size()));
}

// Condensed contingency table. The buffers live in thread-local scratch so
// the metric functions stay allocation-free on the hot path (the exhaustive
// oracles call them tens of millions of times).
struct Tabulated {
  int np = 0;
  int nt = 0;
  long long n = 0;
  std::vector<long long> cells;  // row-major np x nt
  std::vector<long long> pred_sizes;
  std::vector<long long> true_sizes;
  std::vector<int> pred_ids;
  std::vector<int> true_ids;
};

constexpr int kDirectRemap = 4096;

// Maps arbitrary labels to dense ids 0..count-1 in first-appearance order.
void remap_labels(std::span<const int> labels, std::vector<int>& out, int& count) {
  thread_local std::vector<int> direct(kDirectRemap, -1);
  thread_local std::vector<int> touched;
  out.resize(labels.size());
  count = 0;
  bool small = true;
  for (int v : labels) {
    if (v < 0 || v >= kDirectRemap) {
      small = false;
      break;
    }
  }
  if (small) {
    touched.clear();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      int& slot = direct[labels[i]];
      if (slot < 0) {
        slot = count++;
        touched.push_back(labels[i]);
      }
      out[i] = slot;
    }
    for (int v : touched) direct[v] = -1;
  } else {
    std::unordered_map<int, int> remap;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto [it, inserted] = remap.try_emplace(labels[i], count);
      if (inserted) ++count;
      out[i] = it->second;
    }
  }
}

const Tabulated& tabulate(std::span<const int> pred, std::span<const int> truth) {
  require_same_length(pred, truth);
  thread_local Tabulated tab;
  remap_labels(pred, tab.pred_ids, tab.np);
  remap_labels(truth, tab.true_ids, tab.nt);
  tab.n = static_cast<long long>(pred.size());
  tab.cells.assign(static_cast<std::size_t>(tab.np) * tab.nt, 0);
  tab.pred_sizes.assign(tab.np, 0);
  tab.true_sizes.assign(tab.nt, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = tab.pred_ids[i];
    const int t = tab.true_ids[i];
    ++tab.cells[static_cast<std::size_t>(p) * tab.nt + t];
    ++tab.pred_sizes[p];
    ++tab.true_sizes[t];
  }
  return tab;
}

long long choose2(long long k) { return k * (k - 1) / 2; }

struct PairCounts {
  long long tp = 0, fp = 0, fn = 0, pairs = 0;
};

PairCounts pair_counts(const Tabulated& t) {
  PairCounts out;
  out.pairs = choose2(t.n);
  long long same_pred = 0, same_true = 0;
  for (long long v : t.cells) out.tp += choose2(v);
  for (long long a : t.pred_sizes) same_pred += choose2(a);
  for (long long b : t.true_sizes) same_true += choose2(b);
  out.fp = same_pred - out.tp;
  out.fn = same_true - out.tp;
  return out;
}

}  // namespace

Contingency Contingency::from_labels(std::span<const int> pred,
                                     std::span<const int> truth) {
  const Tabulated& t = tabulate(pred, truth);
  Contingency c;
  c.n = t.n;
  c.pred_sizes = t.pred_sizes;
  c.true_sizes = t.true_sizes;
  c.table.assign(t.np, std::vector<long long>(t.nt, 0));
  for (int p = 0; p < t.np; ++p)
    for (int q = 0; q < t.nt; ++q)
      c.table[p][q] = t.cells[static_cast<std::size_t>(p) * t.nt + q];
  return c;
}

double rand_index(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() < 2) {
    require_same_length(pred, truth);
    throw TooFewPoints("rand_index needs n >= 2");
  }
  const PairCounts pc = pair_counts(tabulate(pred, truth));
  const long long agreements = pc.pairs - pc.fp - pc.fn;
  return static_cast<double>(agreements) / static_cast<double>(pc.pairs);
}

double purity(std::span<const int> pred, std::span<const int> truth) {
  if (pred.empty()) {
    require_same_length(pred, truth);
    throw TooFewPoints("purity needs n >= 1");
  }
  const Tabulated& t = tabulate(pred, truth);
  long long hits = 0;
  for (int p = 0; p < t.np; ++p) {
    long long peak = 0;
    for (int q = 0; q < t.nt; ++q)
      peak = std::max(peak, t.cells[static_cast<std::size_t>(p) * t.nt + q]);
    hits += peak;
  }
  return static_cast<double>(hits) / static_cast<double>(t.n);
}

double f_measure(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() < 2) {
    require_same_length(pred, truth);
    throw TooFewPoints("f_measure needs n >= 2");
  }
  const PairCounts pc = pair_counts(tabulate(pred, truth));
  if (pc.tp == 0) return 0.0;
  const double precision =
      static_cast<double>(pc.tp) / static_cast<double>(pc.tp + pc.fp);
  const double recall = static_cast<double>(pc.tp) / static_cast<double>(pc.tp + pc.fn);
  return 2.0 * precision * recall / (precision + recall);
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
  if (pred.empty()) {
    require_same_length(pred, truth);
    throw TooFewPoints("nmi needs n >= 1");
  }
  const Tabulated& t = tabulate(pred, truth);
  const double n = static_cast<double>(t.n);
  double h_pred = 0.0, h_true = 0.0, mi = 0.0;
  for (long long a : t.pred_sizes)
    if (a > 0) h_pred -= (a / n) * std::log(a / n);
  for (long long b : t.true_sizes)
    if (b > 0) h_true -= (b / n) * std::log(b / n);
  for (int p = 0; p < t.np; ++p) {
    for (int q = 0; q < t.nt; ++q) {
      const long long v = t.cells[static_cast<std::size_t>(p) * t.nt + q];
      if (v == 0) continue;
      mi += (v / n) * std::log(n * static_cast<double>(v) /
                               (static_cast<double>(t.pred_sizes[p]) *
                                static_cast<double>(t.true_sizes[q])));
    }
  }
  if (h_pred == 0.0 && h_true == 0.0) return 1.0;
  if (h_pred == 0.0 || h_true == 0.0) return 0.0;
  return mi / std::sqrt(h_pred * h_true);
}

QualityReport make_quality_report(std::span<const int> pred, std::span<const int> truth,
                                  double runtime_s) {
  return {rand_index(pred, truth), purity(pred, truth), f_measure(pred, truth),
          nmi(pred, truth), runtime_s};
}

}  // namespace mrpc
