#ifndef MRPC_MANIFOLD_HPP
#define MRPC_MANIFOLD_HPP

#include <Eigen/Dense>
#include <vector>

#include "mrpc/errors.hpp"

namespace mrpc {

// Eigenvalue floor applied before matrix logs/powers; covariance descriptors
// of flat patches are near-singular.
inline constexpr double kSpdMinEig = 1e-10;

enum class ManifoldKind { Spd, Grassmann };

// A d x d symmetric positive-definite matrix.
class SpdPoint {
 public:
  SpdPoint() = default;
  // Checks squareness and symmetry; the eigenvalue floor is checked by
  // validate() (loaders and generators call it).
  explicit SpdPoint(Eigen::MatrixXd mat);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& mat() const { return mat_; }

  // Full type invariants: symmetry and smallest eigenvalue >= min_eig.
  void validate(double min_eig = kSpdMinEig) const;

 private:
  Eigen::MatrixXd mat_;
};

// A point on the Grassmannian G(q, d): a q x d matrix with orthonormal columns.
class GrassmannPoint {
 public:
  GrassmannPoint() = default;
  explicit GrassmannPoint(Eigen::MatrixXd basis);

  int ambient() const { return static_cast<int>(basis_.rows()); }
  int subdim() const { return static_cast<int>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

  void validate() const;

 private:
  Eigen::MatrixXd basis_;
};

// Tangent vector at some base point: symmetric d x d for SPD, q x d
// (horizontal, base^T * mat = 0) for the Grassmannian.
struct TangentVector {
  ManifoldKind kind;
  Eigen::MatrixXd mat;

  double norm() const { return mat.norm(); }
};

// Symmetry check shared by the SPD routines: |a_ij - a_ji| <= tol * max(1, |a_ij|).
bool is_symmetric(const Eigen::MatrixXd& m, double tol = 1e-10);

// V diag(lambda_i^alpha) V^T with eigenvalues clamped below at min_eig before
// powering. Throws NonSymmetric / NotPositiveDefinite (eigenvalue < -1e-8).
Eigen::MatrixXd spd_power(const Eigen::MatrixXd& x, double alpha,
                          double min_eig = kSpdMinEig);

// Principal matrix logarithm of an SPD matrix (eigenvalues clamped as above).
Eigen::MatrixXd spd_log(const Eigen::MatrixXd& x, double min_eig = kSpdMinEig);

// Matrix exponential of a symmetric matrix.
Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s);

// Affine-invariant geodesic distance ||log(X^{-1/2} Y X^{-1/2})||_F^2.
// Note this is the squared Frobenius norm; downstream kernels consume it as is.
double spd_distance(const SpdPoint& x, const SpdPoint& y);

// Log-Euclidean distance ||log X - log Y||_F^2 (squared, as above).
double led_distance(const SpdPoint& x, const SpdPoint& y);

// Stein divergence log det((X+Y)/2) - 1/2 log det(XY), via Cholesky
// log-determinants.
double stein_divergence(const SpdPoint& x, const SpdPoint& y);

// Principal angles theta_i = acos(xi_i), xi_i the singular values of X^T Y
// clamped into [0, 1]; returned in nonincreasing xi order.
Eigen::VectorXd principal_angles(const GrassmannPoint& x, const GrassmannPoint& y);

// Geodesic distance sqrt(theta_1^2 + ... + theta_d^2).
double grassmann_distance(const GrassmannPoint& x, const GrassmannPoint& y);

TangentVector log_map(const SpdPoint& base, const SpdPoint& target);
TangentVector log_map(const GrassmannPoint& base, const GrassmannPoint& target);

SpdPoint exp_map(const SpdPoint& base, const TangentVector& tangent);
GrassmannPoint exp_map(const GrassmannPoint& base, const TangentVector& tangent);

template <typename Point>
struct KarcherResult {
  Point mean;
  int iterations = 0;
  bool converged = false;
};

// Iterated tangent-space averaging, initialized at the first point, full step.
// Running out of iterations is not an error; the flag reports it.
KarcherResult<SpdPoint> karcher_mean(const std::vector<SpdPoint>& points,
                                     int max_iter = 50, double tol = 1e-6);
KarcherResult<GrassmannPoint> karcher_mean(const std::vector<GrassmannPoint>& points,
                                           int max_iter = 50, double tol = 1e-6);

// Pairwise geodesic distance matrix, evaluated in parallel over rows.
Eigen::MatrixXd pairwise_distances(const std::vector<SpdPoint>& points);
Eigen::MatrixXd pairwise_distances(const std::vector<GrassmannPoint>& points);

}  // namespace mrpc

#endif  // MRPC_MANIFOLD_HPP
