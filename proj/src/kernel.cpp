#include "mrpc/kernel.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "mrpc/parallel.hpp"
#include "mrpc/rng.hpp"

namespace mrpc {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::GaussianLED: return "GaussianLED";
    case KernelFamily::GaussianStein: return "GaussianStein";
    case KernelFamily::Projection: return "Projection";
  }
  return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "GaussianLED") return KernelFamily::GaussianLED;
  if (name == "GaussianStein") return KernelFamily::GaussianStein;
  if (name == "Projection") return KernelFamily::Projection;
  throw ConfigError("unknown kernel family '" + name + "'");
}

bool stein_beta_admissible(double beta, int d) {
  if (beta >= (d - 1) / 2.0 - 1e-12) return true;
  const double doubled = 2.0 * beta;
  const double rounded = std::round(doubled);
  return std::abs(doubled - rounded) <= 1e-12 && rounded >= 1.0 &&
         rounded <= static_cast<double>(d - 1);
}

void validate_spec(const KernelSpec& spec, int d) {
  if (!(spec.beta > 0.0)) throw InvalidBeta("beta must be positive");
  if (spec.family == KernelFamily::GaussianStein && !stein_beta_admissible(spec.beta, d))
    throw InvalidBeta("beta " + std::to_string(spec.beta) +
                      " is not Mercer-admissible for the Stein kernel at d=" +
                      std::to_string(d));
}

namespace {

// Shared low-level evaluators so one-off kernel_eval calls and the cached
// Gram loops produce bitwise-identical values.

double led_from_logs(const Eigen::MatrixXd& lx, const Eigen::MatrixXd& ly) {
  return (lx - ly).squaredNorm();
}

double chol_logdet(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("Cholesky factorization failed on (X+Y)/2");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double stein_from_parts(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                        double logdet_x, double logdet_y) {
  return chol_logdet(0.5 * (x + y)) - 0.5 * (logdet_x + logdet_y);
}

double projection_value(double beta, const GrassmannPoint& x, const GrassmannPoint& y) {
  return beta * (x.basis().transpose() * y.basis()).squaredNorm();
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const SpdPoint& x, const SpdPoint& y) {
  if (spec.family == KernelFamily::Projection)
    throw KindMismatch("Projection kernel expects Grassmann points");
  if (x.dim() != y.dim()) throw DimensionMismatch("SPD points of different dimension");
  validate_spec(spec, x.dim());
  if (spec.family == KernelFamily::GaussianLED)
    return std::exp(-spec.beta * led_from_logs(spd_log(x.mat()), spd_log(y.mat())));
  const double sd = stein_from_parts(x.mat(), y.mat(), chol_logdet(x.mat()),
                                     chol_logdet(y.mat()));
  return std::exp(-spec.beta * sd);
}

double kernel_eval(const KernelSpec& spec, const GrassmannPoint& x,
                   const GrassmannPoint& y) {
  if (spec.family != KernelFamily::Projection)
    throw KindMismatch("Gaussian SPD kernels expect SPD points");
  if (x.ambient() != y.ambient() || x.subdim() != y.subdim())
    throw DimensionMismatch("Grassmann points of different shape");
  validate_spec(spec, x.subdim());
  return projection_value(spec.beta, x, y);
}

namespace {

// Per-point precomputation: matrix logs for LED, log-determinants for Stein.
struct SpdCache {
  std::vector<Eigen::MatrixXd> logs;
  std::vector<double> logdets;
};

SpdCache precompute(const KernelSpec& spec, const std::vector<SpdPoint>& points) {
  SpdCache cache;
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  if (spec.family == KernelFamily::GaussianLED) {
    cache.logs.resize(points.size());
    par::parallel_for(n, 16, [&](std::ptrdiff_t i) {
      cache.logs[i] = spd_log(points[i].mat());
    });
  } else {
    cache.logdets.resize(points.size());
    par::parallel_for(n, 16, [&](std::ptrdiff_t i) {
      cache.logdets[i] = chol_logdet(points[i].mat());
    });
  }
  return cache;
}

double eval_cached(const KernelSpec& spec, const std::vector<SpdPoint>& a,
                   const SpdCache& ca, std::size_t i, const std::vector<SpdPoint>& b,
                   const SpdCache& cb, std::size_t j) {
  if (spec.family == KernelFamily::GaussianLED)
    return std::exp(-spec.beta * led_from_logs(ca.logs[i], cb.logs[j]));
  return std::exp(-spec.beta * stein_from_parts(a[i].mat(), b[j].mat(), ca.logdets[i],
                                                cb.logdets[j]));
}

void check_homogeneous(const std::vector<SpdPoint>& points) {
  for (const auto& p : points)
    if (p.dim() != points.front().dim())
      throw DimensionMismatch("SPD point list has mixed dimensions");
}

void check_homogeneous(const std::vector<GrassmannPoint>& points) {
  for (const auto& p : points)
    if (p.ambient() != points.front().ambient() ||
        p.subdim() != points.front().subdim())
      throw DimensionMismatch("Grassmann point list has mixed shapes");
}

}  // namespace

GramMatrix gram(const KernelSpec& spec, const std::vector<SpdPoint>& points) {
  if (points.empty()) throw EmptyInput("gram: no points");
  if (spec.family == KernelFamily::Projection)
    throw KindMismatch("Projection kernel expects Grassmann points");
  check_homogeneous(points);
  validate_spec(spec, points.front().dim());
  const auto n = static_cast<Eigen::Index>(points.size());
  const SpdCache cache = precompute(spec, points);
  Eigen::MatrixXd values(n, n);
  par::parallel_for(n, 4, [&](std::ptrdiff_t i) {
    values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j)
      values(i, j) = eval_cached(spec, points, cache, i, points, cache, j);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) values(i, j) = values(j, i);
  return {std::move(values), spec};
}

GramMatrix gram(const KernelSpec& spec, const std::vector<GrassmannPoint>& points) {
  if (points.empty()) throw EmptyInput("gram: no points");
  if (spec.family != KernelFamily::Projection)
    throw KindMismatch("Gaussian SPD kernels expect SPD points");
  check_homogeneous(points);
  validate_spec(spec, points.front().subdim());
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd values(n, n);
  par::parallel_for(n, 4, [&](std::ptrdiff_t i) {
    for (Eigen::Index j = i; j < n; ++j)
      values(i, j) = projection_value(spec.beta, points[i], points[j]);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) values(i, j) = values(j, i);
  return {std::move(values), spec};
}

GramMatrix gram(const KernelSpec& spec, const std::vector<SpdPoint>& rows,
                const std::vector<SpdPoint>& cols) {
  if (rows.empty() || cols.empty()) throw EmptyInput("gram: no points");
  if (spec.family == KernelFamily::Projection)
    throw KindMismatch("Projection kernel expects Grassmann points");
  check_homogeneous(rows);
  check_homogeneous(cols);
  if (rows.front().dim() != cols.front().dim())
    throw DimensionMismatch("row and column points have different dimensions");
  validate_spec(spec, rows.front().dim());
  const SpdCache row_cache = precompute(spec, rows);
  const SpdCache col_cache = precompute(spec, cols);
  Eigen::MatrixXd values(rows.size(), cols.size());
  par::parallel_for(static_cast<std::ptrdiff_t>(rows.size()), 4, [&](std::ptrdiff_t i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      values(i, j) = eval_cached(spec, rows, row_cache, i, cols, col_cache, j);
  });
  return {std::move(values), spec};
}

GramMatrix gram(const KernelSpec& spec, const std::vector<GrassmannPoint>& rows,
                const std::vector<GrassmannPoint>& cols) {
  if (rows.empty() || cols.empty()) throw EmptyInput("gram: no points");
  if (spec.family != KernelFamily::Projection)
    throw KindMismatch("Gaussian SPD kernels expect SPD points");
  check_homogeneous(rows);
  check_homogeneous(cols);
  if (rows.front().ambient() != cols.front().ambient() ||
      rows.front().subdim() != cols.front().subdim())
    throw DimensionMismatch("row and column points have different shapes");
  validate_spec(spec, rows.front().subdim());
  Eigen::MatrixXd values(rows.size(), cols.size());
  par::parallel_for(static_cast<std::ptrdiff_t>(rows.size()), 4, [&](std::ptrdiff_t i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      values(i, j) = projection_value(spec.beta, rows[i], cols[j]);
  });
  return {std::move(values), spec};
}

double median_heuristic_beta(const std::vector<SpdPoint>& points, std::uint64_t seed,
                             int pairs) {
  if (points.size() < 2) throw TooFewPoints("median heuristic needs >= 2 points");
  Rng rng(seed);
  const auto n = static_cast<std::uint64_t>(points.size());
  std::vector<double> dists;
  dists.reserve(pairs);
  for (int k = 0; k < pairs; ++k) {
    const auto i = static_cast<std::size_t>(rng.uniform_below(n));
    auto j = static_cast<std::size_t>(rng.uniform_below(n));
    while (j == i) j = static_cast<std::size_t>(rng.uniform_below(n));
    dists.push_back(led_distance(points[i], points[j]));
  }
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
  const double median = dists[dists.size() / 2];
  if (median <= 0.0) return 1.0;
  return 1.0 / (2.0 * median);
}

double default_beta(KernelFamily family, const std::vector<SpdPoint>& points,
                    std::uint64_t seed) {
  if (points.empty()) throw EmptyInput("default_beta: no points");
  switch (family) {
    case KernelFamily::GaussianLED: return median_heuristic_beta(points, seed);
    case KernelFamily::GaussianStein: return (points.front().dim() - 1) / 2.0;
    case KernelFamily::Projection:
      throw KindMismatch("Projection kernel expects Grassmann points");
  }
  return 1.0;
}

double default_beta(KernelFamily family, const std::vector<GrassmannPoint>& points,
                    std::uint64_t seed) {
  (void)seed;
  if (points.empty()) throw EmptyInput("default_beta: no points");
  if (family != KernelFamily::Projection)
    throw KindMismatch("Gaussian SPD kernels expect SPD points");
  return 1.0;
}

}  // namespace mrpc
