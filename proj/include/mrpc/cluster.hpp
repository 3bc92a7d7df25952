#ifndef MRPC_CLUSTER_HPP
#define MRPC_CLUSTER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mrpc/kernel.hpp"
#include "mrpc/manifold.hpp"

namespace mrpc {

struct KmeansConfig {
  int m = 1;
  int max_iter = 300;
  double tol = 1e-7;  // relative inertia change
  int restarts = 10;
  std::uint64_t seed = 0;
  enum class Init { UniformRandomPoints } init = Init::UniformRandomPoints;
};

struct ClusterResult {
  std::vector<int> labels;
  double inertia = 0.0;
  int iterations = 0;
  bool converged = false;
  double runtime_s = 0.0;
  // Inertia after each Lloyd sweep of the winning restart.
  std::vector<double> inertia_trace;
};

// Lloyd's algorithm, best of cfg.restarts by inertia. Initial centroids are
// cfg.m distinct data points drawn uniformly; assignment ties break to the
// lowest cluster index; an empty cluster captures the point farthest from its
// assigned centroid. Deterministic for fixed (data, cfg).
ClusterResult kmeans(const Eigen::MatrixXd& vectors, const KmeansConfig& cfg);

// Lloyd's in RKHS on a full self-Gram:
// ||phi(x) - mu_c||^2 = K(x,x) - 2/|c| sum_{j in c} K(x,j) + 1/|c|^2 sum_{j,l in c} K(j,l).
// Negative distances from a slightly non-PSD Gram are clamped at zero.
ClusterResult kernel_kmeans(const GramMatrix& gram, const KmeansConfig& cfg);

// SPD: vectorized upper triangle of log(X) with off-diagonals scaled by
// sqrt(2) so Euclidean distances equal the LED exactly; D = d(d+1)/2.
Eigen::MatrixXd loge_embed(const std::vector<SpdPoint>& points);
// Grassmann: row-major flattening of the basis; D = q*d. Representative
// dependent, matching the protocol it reproduces.
Eigen::MatrixXd loge_embed(const std::vector<GrassmannPoint>& points);

// Lloyd's with geodesic assignment and Karcher-mean updates, hard-capped at
// 100 outer iterations; the converged flag reports a binding cap.
ClusterResult intrinsic_kmeans(const std::vector<SpdPoint>& points,
                               const KmeansConfig& cfg, int karcher_max_iter = 10);
ClusterResult intrinsic_kmeans(const std::vector<GrassmannPoint>& points,
                               const KmeansConfig& cfg, int karcher_max_iter = 10);

// KPCA with the full dataset as landmark set, truncated to `keep` components,
// then kmeans on the embeddings.
ClusterResult kpca_kmeans(const GramMatrix& gram, int keep, const KmeansConfig& cfg);

}  // namespace mrpc

#endif  // MRPC_CLUSTER_HPP
