#include "mrpc/cluster.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "mrpc/parallel.hpp"
#include "mrpc/rng.hpp"
#include "mrpc/rp.hpp"

namespace mrpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared Lloyd skeleton. A model provides the distance geometry:
//   int n() const
//   void init_centroids(const std::vector<int>& idx)   centroids <- data points
//   double distance(int i, int c) const                point to current centroid
//   void update(const std::vector<int>& labels)        recompute centroids
// The same skeleton drives the Euclidean, kernel and intrinsic variants so
// their restart, tie-break and empty-cluster policies match exactly.
template <typename Model>
ClusterResult run_lloyd(Model& model, const KmeansConfig& cfg, int hard_cap) {
  const int n = model.n();
  const int m = cfg.m;
  if (m < 1) throw InvalidSize("kmeans: m must be >= 1");
  if (cfg.restarts < 1) throw InvalidSize("kmeans: restarts must be >= 1");
  if (n < m) throw TooFewPoints("kmeans: " + std::to_string(n) + " points for m=" +
                                std::to_string(m));
  const auto t0 = std::chrono::steady_clock::now();

  ClusterResult best;
  best.inertia = kInf;
  const int max_iter = std::min(cfg.max_iter, hard_cap);

  std::vector<int> labels(n);
  std::vector<double> assigned_dist(n);
  std::vector<double> point_dist(n);
  std::vector<int> counts(m);

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    model.init_centroids(rng.sample_without_replacement(n, m));

    double prev = kInf;
    double inertia = kInf;
    bool converged = false;
    int iterations = 0;
    std::vector<double> trace;

    for (int iter = 1; iter <= max_iter; ++iter) {
      iterations = iter;

      // Assignment sweep; ties go to the lowest cluster index.
      par::parallel_for(n, 64, [&](std::ptrdiff_t i) {
        int best_c = 0;
        double best_d = model.distance(static_cast<int>(i), 0);
        for (int c = 1; c < m; ++c) {
          const double d = model.distance(static_cast<int>(i), c);
          if (d < best_d) {
            best_d = d;
            best_c = c;
          }
        }
        labels[i] = best_c;
        assigned_dist[i] = best_d;
      });

      // Empty-cluster repair: hand the globally farthest point over.
      std::fill(counts.begin(), counts.end(), 0);
      for (int i = 0; i < n; ++i) ++counts[labels[i]];
      for (int c = 0; c < m; ++c) {
        if (counts[c] != 0) continue;
        int donor = -1;
        double far = -1.0;
        for (int i = 0; i < n; ++i) {
          if (counts[labels[i]] < 2) continue;
          if (assigned_dist[i] > far) {
            far = assigned_dist[i];
            donor = i;
          }
        }
        if (donor < 0) break;  // cannot repair (mass of duplicates); keep going
        --counts[labels[donor]];
        labels[donor] = c;
        counts[c] = 1;
        assigned_dist[donor] = 0.0;
      }

      model.update(labels);

      // Inertia against the updated centroids, summed in index order.
      par::parallel_for(n, 64, [&](std::ptrdiff_t i) {
        point_dist[i] = model.distance(static_cast<int>(i), labels[i]);
      });
      inertia = 0.0;
      for (int i = 0; i < n; ++i) inertia += point_dist[i];
      trace.push_back(inertia);

      if (inertia == 0.0) {
        converged = true;
        break;
      }
      if (prev != kInf && std::abs(prev - inertia) <= cfg.tol * prev) {
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

class VectorModel {
 public:
  explicit VectorModel(const Eigen::MatrixXd& data, int m)
      : data_(data), centroids_(m, data.cols()) {}

  int n() const { return static_cast<int>(data_.rows()); }

  void init_centroids(const std::vector<int>& idx) {
    for (std::size_t c = 0; c < idx.size(); ++c)
      centroids_.row(static_cast<Eigen::Index>(c)) = data_.row(idx[c]);
  }

  double distance(int i, int c) const {
    return (data_.row(i) - centroids_.row(c)).squaredNorm();
  }

  void update(const std::vector<int>& labels) {
    centroids_.setZero();
    std::vector<int> counts(centroids_.rows(), 0);
    for (int i = 0; i < n(); ++i) {
      centroids_.row(labels[i]) += data_.row(i);
      ++counts[labels[i]];
    }
    for (Eigen::Index c = 0; c < centroids_.rows(); ++c)
      centroids_.row(c) /= static_cast<double>(counts[c]);
  }

 private:
  const Eigen::MatrixXd& data_;
  Eigen::MatrixXd centroids_;
};

class KernelModel {
 public:
  KernelModel(const Eigen::MatrixXd& gram, int m)
      : gram_(gram),
        rowsum_(gram.rows(), m),
        self_term_(m),
        counts_(m) {}

  int n() const { return static_cast<int>(gram_.rows()); }

  void init_centroids(const std::vector<int>& idx) {
    // Fresh clusters are the chosen singletons.
    for (std::size_t c = 0; c < idx.size(); ++c) {
      rowsum_.col(static_cast<Eigen::Index>(c)) = gram_.col(idx[c]);
      self_term_[c] = gram_(idx[c], idx[c]);
      counts_[c] = 1;
    }
  }

  double distance(int i, int c) const {
    const double inv = 1.0 / counts_[c];
    const double d = gram_(i, i) - 2.0 * inv * rowsum_(i, c) +
                     inv * inv * self_term_[c];
    return d > 0.0 ? d : 0.0;  // clamp tiny negatives from non-PSD roundoff
  }

  void update(const std::vector<int>& labels) {
    const int m = static_cast<int>(counts_.size());
    std::fill(counts_.begin(), counts_.end(), 0);
    for (int j = 0; j < n(); ++j) ++counts_[labels[j]];
    par::parallel_for(n(), 16, [&](std::ptrdiff_t i) {
      for (int c = 0; c < m; ++c) rowsum_(i, c) = 0.0;
      for (int j = 0; j < n(); ++j) rowsum_(i, labels[j]) += gram_(i, j);
    });
    std::fill(self_term_.begin(), self_term_.end(), 0.0);
    for (int i = 0; i < n(); ++i) self_term_[labels[i]] += rowsum_(i, labels[i]);
  }

 private:
  const Eigen::MatrixXd& gram_;
  Eigen::MatrixXd rowsum_;          // rowsum_(i, c) = sum_{j in c} K(i, j)
  std::vector<double> self_term_;   // sum_{j,l in c} K(j, l)
  std::vector<int> counts_;
};

template <typename Point>
double geodesic(const Point& a, const Point& b);

template <>
double geodesic(const SpdPoint& a, const SpdPoint& b) {
  return spd_distance(a, b);
}

template <>
double geodesic(const GrassmannPoint& a, const GrassmannPoint& b) {
  return grassmann_distance(a, b);
}

template <typename Point>
class IntrinsicModel {
 public:
  IntrinsicModel(const std::vector<Point>& points, int m, int karcher_max_iter)
      : points_(points), centroids_(m), karcher_max_iter_(karcher_max_iter) {}

  int n() const { return static_cast<int>(points_.size()); }

  void init_centroids(const std::vector<int>& idx) {
    for (std::size_t c = 0; c < idx.size(); ++c) centroids_[c] = points_[idx[c]];
  }

  double distance(int i, int c) const { return geodesic(points_[i], centroids_[c]); }

  void update(const std::vector<int>& labels) {
    const auto m = static_cast<std::ptrdiff_t>(centroids_.size());
    std::vector<std::vector<Point>> members(m);
    for (int i = 0; i < n(); ++i) members[labels[i]].push_back(points_[i]);
    par::parallel_for(m, 1, [&](std::ptrdiff_t c) {
      centroids_[c] = karcher_mean(members[c], karcher_max_iter_).mean;
    });
  }

 private:
  const std::vector<Point>& points_;
  std::vector<Point> centroids_;
  int karcher_max_iter_;
};

constexpr int kIntrinsicIterationCap = 100;

}  // namespace

ClusterResult kmeans(const Eigen::MatrixXd& vectors, const KmeansConfig& cfg) {
  VectorModel model(vectors, cfg.m);
  return run_lloyd(model, cfg, std::numeric_limits<int>::max());
}

ClusterResult kernel_kmeans(const GramMatrix& gram, const KmeansConfig& cfg) {
  if (gram.rows() != gram.cols())
    throw ShapeMismatch("kernel_kmeans needs a square self-Gram");
  KernelModel model(gram.values, cfg.m);
  return run_lloyd(model, cfg, std::numeric_limits<int>::max());
}

Eigen::MatrixXd loge_embed(const std::vector<SpdPoint>& points) {
  if (points.empty()) throw EmptyInput("loge_embed: no points");
  const int d = points.front().dim();
  for (const auto& p : points)
    if (p.dim() != d) throw DimensionMismatch("loge_embed: mixed dimensions");
  const int dim = d * (d + 1) / 2;
  Eigen::MatrixXd out(points.size(), dim);
  const double root2 = std::sqrt(2.0);
  par::parallel_for(static_cast<std::ptrdiff_t>(points.size()), 16,
                    [&](std::ptrdiff_t r) {
                      const Eigen::MatrixXd lg = spd_log(points[r].mat());
                      int k = 0;
                      for (int i = 0; i < d; ++i) {
                        out(r, k++) = lg(i, i);
                        for (int j = i + 1; j < d; ++j) out(r, k++) = root2 * lg(i, j);
                      }
                    });
  return out;
}

Eigen::MatrixXd loge_embed(const std::vector<GrassmannPoint>& points) {
  if (points.empty()) throw EmptyInput("loge_embed: no points");
  const int q = points.front().ambient();
  const int d = points.front().subdim();
  Eigen::MatrixXd out(points.size(), q * d);
  for (std::size_t r = 0; r < points.size(); ++r) {
    if (points[r].ambient() != q || points[r].subdim() != d)
      throw DimensionMismatch("loge_embed: mixed shapes");
    int k = 0;
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < d; ++j) out(r, k++) = points[r].basis()(i, j);
  }
  return out;
}

ClusterResult intrinsic_kmeans(const std::vector<SpdPoint>& points,
                               const KmeansConfig& cfg, int karcher_max_iter) {
  IntrinsicModel<SpdPoint> model(points, cfg.m, karcher_max_iter);
  return run_lloyd(model, cfg, kIntrinsicIterationCap);
}

ClusterResult intrinsic_kmeans(const std::vector<GrassmannPoint>& points,
                               const KmeansConfig& cfg, int karcher_max_iter) {
  IntrinsicModel<GrassmannPoint> model(points, cfg.m, karcher_max_iter);
  return run_lloyd(model, cfg, kIntrinsicIterationCap);
}

ClusterResult kpca_kmeans(const GramMatrix& gram, int keep, const KmeansConfig& cfg) {
  const int n = gram.rows();
  if (gram.rows() != gram.cols())
    throw ShapeMismatch("kpca_kmeans needs a square self-Gram");
  if (keep < 1 || keep > n - 1)
    throw InvalidSize("kpca_kmeans: need 1 <= keep <= n-1");
  LandmarkSet landmarks;
  landmarks.indices.resize(n);
  for (int i = 0; i < n; ++i) landmarks.indices[i] = i;
  landmarks.gram_s = gram;
  Projector proj = fit_kpca_rp(std::move(landmarks));
  auto& pc = std::get<KpcaRpProjection>(proj.coef);
  if (pc.alpha.cols() > keep) {
    pc.alpha = pc.alpha.leftCols(keep).eval();
    pc.eigvals = pc.eigvals.head(keep).eval();
  }
  const EmbeddedSet embedded = embed(proj, gram);
  return kmeans(embedded.vectors, cfg);
}

}  // namespace mrpc
