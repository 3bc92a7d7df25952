#include "mrpc/manifold.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>

#include "mrpc/parallel.hpp"

namespace mrpc {

namespace {

void require_same_dim(const SpdPoint& x, const SpdPoint& y) {
  if (x.dim() != y.dim())
    throw DimensionMismatch("SPD points have dimensions " + std::to_string(x.dim()) +
                            " and " + std::to_string(y.dim()));
}

void require_same_shape(const GrassmannPoint& x, const GrassmannPoint& y) {
  if (x.ambient() != y.ambient() || x.subdim() != y.subdim())
    throw DimensionMismatch("Grassmann points live on different G(q,d)");
}

// Eigendecomposition with the SPD checks and clamping shared by all powers.
struct SpdEig {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;  // clamped below at min_eig
};

SpdEig spd_eig(const Eigen::MatrixXd& x, double min_eig) {
  if (x.rows() != x.cols()) throw DimensionMismatch("matrix is not square");
  if (!is_symmetric(x)) throw NonSymmetric("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  Eigen::VectorXd vals = es.eigenvalues();
  if (vals.minCoeff() < -1e-8)
    throw NotPositiveDefinite("smallest eigenvalue " + std::to_string(vals.minCoeff()));
  return {es.eigenvectors(), vals.cwiseMax(min_eig)};
}

}  // namespace

SpdPoint::SpdPoint(Eigen::MatrixXd mat) : mat_(std::move(mat)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
    throw DimensionMismatch("SpdPoint requires a nonempty square matrix");
  if (!is_symmetric(mat_)) throw NonSymmetric("SpdPoint matrix is not symmetric");
}

void SpdPoint::validate(double min_eig) const {
  if (!is_symmetric(mat_)) throw NonSymmetric("SpdPoint matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < min_eig * (1.0 - 1e-6) - 1e-15)
    throw NotPositiveDefinite("smallest eigenvalue " + std::to_string(lo) +
                              " below floor " + std::to_string(min_eig));
}

GrassmannPoint::GrassmannPoint(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  if (basis_.rows() == 0 || basis_.cols() == 0 || basis_.cols() > basis_.rows())
    throw DimensionMismatch("GrassmannPoint requires q x d with d <= q");
  validate();
}

void GrassmannPoint::validate() const {
  const Eigen::MatrixXd gram = basis_.transpose() * basis_;
  const Eigen::MatrixXd err =
      gram - Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols());
  if (err.cwiseAbs().maxCoeff() > 1e-8)
    throw InvariantViolation("Grassmann basis columns are not orthonormal");
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol * std::max(1.0, std::abs(m(i, j))))
        return false;
  return true;
}

Eigen::MatrixXd spd_power(const Eigen::MatrixXd& x, double alpha, double min_eig) {
  SpdEig eig = spd_eig(x, min_eig);
  const Eigen::ArrayXd powered = eig.values.array().pow(alpha);
  return eig.vectors * powered.matrix().asDiagonal() * eig.vectors.transpose();
}

Eigen::MatrixXd spd_log(const Eigen::MatrixXd& x, double min_eig) {
  SpdEig eig = spd_eig(x, min_eig);
  const Eigen::ArrayXd logged = eig.values.array().log();
  return eig.vectors * logged.matrix().asDiagonal() * eig.vectors.transpose();
}

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw DimensionMismatch("matrix is not square");
  if (!is_symmetric(s)) throw NonSymmetric("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::ArrayXd exped = es.eigenvalues().array().exp();
  return es.eigenvectors() * exped.matrix().asDiagonal() * es.eigenvectors().transpose();
}

double spd_distance(const SpdPoint& x, const SpdPoint& y) {
  require_same_dim(x, y);
  const Eigen::MatrixXd xis = spd_power(x.mat(), -0.5);
  const Eigen::MatrixXd inner = xis * y.mat() * xis;
  // Symmetrize away the roundoff of the congruence before taking the log.
  return spd_log(0.5 * (inner + inner.transpose())).squaredNorm();
}

double led_distance(const SpdPoint& x, const SpdPoint& y) {
  require_same_dim(x, y);
  return (spd_log(x.mat()) - spd_log(y.mat())).squaredNorm();
}

namespace {

double chol_logdet(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("Cholesky factorization failed");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

double stein_divergence(const SpdPoint& x, const SpdPoint& y) {
  require_same_dim(x, y);
  const double mid = chol_logdet(0.5 * (x.mat() + y.mat()));
  return mid - 0.5 * (chol_logdet(x.mat()) + chol_logdet(y.mat()));
}

Eigen::VectorXd principal_angles(const GrassmannPoint& x, const GrassmannPoint& y) {
  require_same_shape(x, y);
  const Eigen::MatrixXd xty = x.basis().transpose() * y.basis();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(xty);
  const Eigen::VectorXd cosines = svd.singularValues();  // nonincreasing
  const Eigen::Index d = cosines.size();
  Eigen::VectorXd angles(d);
  for (Eigen::Index i = 0; i < d; ++i)
    angles[i] = std::acos(std::clamp(cosines[i], 0.0, 1.0));
  // acos loses half the working precision near 1; recover small angles from
  // the sines, the singular values of (I - X X^T) Y (Bjorck-Golub).
  if (cosines.maxCoeff() > std::numbers::sqrt2 / 2.0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> sine_svd(y.basis() - x.basis() * xty);
    const Eigen::VectorXd sines = sine_svd.singularValues();  // nonincreasing
    for (Eigen::Index i = 0; i < d; ++i)
      if (cosines[i] > std::numbers::sqrt2 / 2.0)
        angles[i] = std::asin(std::clamp(sines[d - 1 - i], 0.0, 1.0));
  }
  return angles;
}

double grassmann_distance(const GrassmannPoint& x, const GrassmannPoint& y) {
  return principal_angles(x, y).norm();
}

TangentVector log_map(const SpdPoint& base, const SpdPoint& target) {
  require_same_dim(base, target);
  const Eigen::MatrixXd bs = spd_power(base.mat(), 0.5);
  const Eigen::MatrixXd bis = spd_power(base.mat(), -0.5);
  const Eigen::MatrixXd inner = bis * target.mat() * bis;
  Eigen::MatrixXd v = bs * spd_log(0.5 * (inner + inner.transpose())) * bs;
  v = 0.5 * (v + v.transpose());
  return {ManifoldKind::Spd, std::move(v)};
}

TangentVector log_map(const GrassmannPoint& base, const GrassmannPoint& target) {
  require_same_shape(base, target);
  const int q = base.ambient();
  const Eigen::MatrixXd xty = base.basis().transpose() * target.basis();
  const Eigen::MatrixXd proj =
      (Eigen::MatrixXd::Identity(q, q) - base.basis() * base.basis().transpose()) *
      target.basis();
  // M = (I - X X^T) Y (X^T Y)^{-1}; tangent = U atan(Sigma) V^T.
  const Eigen::MatrixXd m =
      proj * xty.partialPivLu().solve(Eigen::MatrixXd::Identity(xty.rows(), xty.cols()));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) sv[i] = std::atan(sv[i]);
  return {ManifoldKind::Grassmann,
          svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose()};
}

SpdPoint exp_map(const SpdPoint& base, const TangentVector& tangent) {
  if (tangent.kind != ManifoldKind::Spd)
    throw KindMismatch("tangent vector is not an SPD tangent");
  if (tangent.mat.rows() != base.dim() || tangent.mat.cols() != base.dim())
    throw DimensionMismatch("tangent dimensions do not match base point");
  const Eigen::MatrixXd bs = spd_power(base.mat(), 0.5);
  const Eigen::MatrixXd bis = spd_power(base.mat(), -0.5);
  const Eigen::MatrixXd inner = bis * tangent.mat * bis;
  Eigen::MatrixXd result = bs * sym_exp(0.5 * (inner + inner.transpose())) * bs;
  result = 0.5 * (result + result.transpose());
  return SpdPoint(std::move(result));
}

GrassmannPoint exp_map(const GrassmannPoint& base, const TangentVector& tangent) {
  if (tangent.kind != ManifoldKind::Grassmann)
    throw KindMismatch("tangent vector is not a Grassmann tangent");
  if (tangent.mat.rows() != base.ambient() || tangent.mat.cols() != base.subdim())
    throw DimensionMismatch("tangent dimensions do not match base point");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(tangent.mat,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const Eigen::MatrixXd moved =
      base.basis() * svd.matrixV() * sv.array().cos().matrix().asDiagonal() *
          svd.matrixV().transpose() +
      svd.matrixU() * sv.array().sin().matrix().asDiagonal() * svd.matrixV().transpose();
  // Re-orthonormalize against roundoff; QR changes the representative only.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(moved);
  Eigen::MatrixXd thin_q = qr.householderQ() *
                           Eigen::MatrixXd::Identity(base.ambient(), base.subdim());
  return GrassmannPoint(std::move(thin_q));
}

namespace {

template <typename Point>
KarcherResult<Point> karcher_impl(const std::vector<Point>& points, int max_iter,
                                  double tol) {
  if (points.empty()) throw EmptyInput("karcher_mean: no points");
  KarcherResult<Point> result{points.front(), 0, false};
  const double n = static_cast<double>(points.size());
  for (int iter = 1; iter <= max_iter; ++iter) {
    result.iterations = iter;
    TangentVector mean = log_map(result.mean, points.front());
    mean.mat /= n;
    for (std::size_t i = 1; i < points.size(); ++i)
      mean.mat += log_map(result.mean, points[i]).mat / n;
    if (mean.norm() <= tol) {
      result.converged = true;
      return result;
    }
    result.mean = exp_map(result.mean, mean);
  }
  return result;
}

}  // namespace

KarcherResult<SpdPoint> karcher_mean(const std::vector<SpdPoint>& points, int max_iter,
                                     double tol) {
  return karcher_impl(points, max_iter, tol);
}

KarcherResult<GrassmannPoint> karcher_mean(const std::vector<GrassmannPoint>& points,
                                           int max_iter, double tol) {
  return karcher_impl(points, max_iter, tol);
}

namespace {

template <typename Point, typename Dist>
Eigen::MatrixXd pairwise_impl(const std::vector<Point>& points, Dist dist) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd out(n, n);
  par::parallel_for(n, 8, [&](std::ptrdiff_t i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) out(i, j) = dist(points[i], points[j]);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) out(i, j) = out(j, i);
  return out;
}

}  // namespace

Eigen::MatrixXd pairwise_distances(const std::vector<SpdPoint>& points) {
  return pairwise_impl(points, [](const SpdPoint& a, const SpdPoint& b) {
    return spd_distance(a, b);
  });
}

Eigen::MatrixXd pairwise_distances(const std::vector<GrassmannPoint>& points) {
  return pairwise_impl(points, [](const GrassmannPoint& a, const GrassmannPoint& b) {
    return grassmann_distance(a, b);
  });
}

}  // namespace mrpc
