#include "mrpc/reference.hpp"

#include <chrono>
#include <limits>

#include "mrpc/rng.hpp"

namespace mrpc::ref {

namespace {

template <typename Point>
GramMatrix self_gram_impl(const KernelSpec& spec, const std::vector<Point>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd values(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      values(i, j) = values(j, i) = kernel_eval(spec, points[i], points[j]);
  return {std::move(values), spec};
}

template <typename Point>
GramMatrix cross_gram_impl(const KernelSpec& spec, const std::vector<Point>& rows,
                           const std::vector<Point>& cols) {
  Eigen::MatrixXd values(rows.size(), cols.size());
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      values(i, j) = kernel_eval(spec, rows[i], cols[j]);
  return {std::move(values), spec};
}

}  // namespace

GramMatrix self_gram(const KernelSpec& spec, const std::vector<SpdPoint>& points) {
  return self_gram_impl(spec, points);
}

GramMatrix self_gram(const KernelSpec& spec, const std::vector<GrassmannPoint>& points) {
  return self_gram_impl(spec, points);
}

GramMatrix cross_gram(const KernelSpec& spec, const std::vector<SpdPoint>& rows,
                      const std::vector<SpdPoint>& cols) {
  return cross_gram_impl(spec, rows, cols);
}

GramMatrix cross_gram(const KernelSpec& spec, const std::vector<GrassmannPoint>& rows,
                      const std::vector<GrassmannPoint>& cols) {
  return cross_gram_impl(spec, rows, cols);
}

ClusterResult kmeans(const Eigen::MatrixXd& data, const KmeansConfig& cfg) {
  const int n = static_cast<int>(data.rows());
  const int m = cfg.m;
  if (m < 1) throw InvalidSize("ref::kmeans: m must be >= 1");
  if (n < m) throw TooFewPoints("ref::kmeans: fewer points than clusters");
  const auto t0 = std::chrono::steady_clock::now();

  ClusterResult best;
  best.inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    const std::vector<int> init = rng.sample_without_replacement(n, m);
    Eigen::MatrixXd centroids(m, data.cols());
    for (int c = 0; c < m; ++c) centroids.row(c) = data.row(init[c]);

    std::vector<int> labels(n, 0);
    std::vector<double> dist(n, 0.0);
    std::vector<int> counts(m, 0);
    std::vector<double> trace;
    double prev = std::numeric_limits<double>::infinity();
    double inertia = prev;
    bool converged = false;
    int iterations = 0;

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
      iterations = iter;
      for (int i = 0; i < n; ++i) {
        int best_c = 0;
        double best_d = (data.row(i) - centroids.row(0)).squaredNorm();
        for (int c = 1; c < m; ++c) {
          const double d = (data.row(i) - centroids.row(c)).squaredNorm();
          if (d < best_d) {
            best_d = d;
            best_c = c;
          }
        }
        labels[i] = best_c;
        dist[i] = best_d;
      }
      std::fill(counts.begin(), counts.end(), 0);
      for (int i = 0; i < n; ++i) ++counts[labels[i]];
      for (int c = 0; c < m; ++c) {
        if (counts[c] != 0) continue;
        int donor = -1;
        double far = -1.0;
        for (int i = 0; i < n; ++i) {
          if (counts[labels[i]] < 2) continue;
          if (dist[i] > far) {
            far = dist[i];
            donor = i;
          }
        }
        if (donor < 0) break;
        --counts[labels[donor]];
        labels[donor] = c;
        counts[c] = 1;
        dist[donor] = 0.0;
      }
      centroids.setZero();
      for (int i = 0; i < n; ++i) centroids.row(labels[i]) += data.row(i);
      for (int c = 0; c < m; ++c) centroids.row(c) /= static_cast<double>(counts[c]);
      inertia = 0.0;
      for (int i = 0; i < n; ++i)
        inertia += (data.row(i) - centroids.row(labels[i])).squaredNorm();
      trace.push_back(inertia);
      if (inertia == 0.0) {
        converged = true;
        break;
      }
      if (prev != std::numeric_limits<double>::infinity() &&
          std::abs(prev - inertia) <= cfg.tol * prev) {
        converged = true;
        break;
      }
      prev = inertia;
    }

    if (inertia < best.inertia) {
      best.labels = labels;
      best.inertia = inertia;
      best.iterations = iterations;
      best.converged = converged;
      best.inertia_trace = std::move(trace);
    }
  }

  best.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return best;
}

Eigen::MatrixXd pairwise_distances(const std::vector<SpdPoint>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j)
      out(i, j) = out(j, i) = spd_distance(points[i], points[j]);
  }
  return out;
}

}  // namespace mrpc::ref
