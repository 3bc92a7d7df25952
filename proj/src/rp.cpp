#include "mrpc/rp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "mrpc/parallel.hpp"
#include "mrpc/rng.hpp"

namespace mrpc {

std::vector<int> select_landmarks(int n, int p, std::uint64_t seed) {
  if (p < 1 || p > n)
    throw InvalidSize("select_landmarks: need 1 <= p <= n, got p=" + std::to_string(p) +
                      " n=" + std::to_string(n));
  Rng rng(seed);
  return rng.sample_without_replacement(n, p);
}

Eigen::MatrixXd psd_invsqrt(const Eigen::MatrixXd& k, double floor) {
  if (k.rows() != k.cols()) throw DimensionMismatch("matrix is not square");
  if (!is_symmetric(k)) throw NonSymmetric("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw NotPositiveDefinite("matrix is not PSD, smallest eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
  const Eigen::ArrayXd inv_sqrt = es.eigenvalues().array().max(floor).rsqrt();
  return es.eigenvectors() * inv_sqrt.matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

int Projector::out_dim() const {
  if (const auto* g = std::get_if<KgrpProjection>(&coef))
    return static_cast<int>(g->coef.cols());
  if (std::holds_alternative<KorpProjection>(coef)) return p();
  return static_cast<int>(std::get<KpcaRpProjection>(coef).alpha.cols());
}

Projector fit_kgrp(LandmarkSet landmarks, int b, int t, std::uint64_t seed) {
  const int p = landmarks.p();
  if (b < 1) throw InvalidSize("fit_kgrp: b must be >= 1");
  if (t < 1 || t > p) throw InvalidSize("fit_kgrp: need 1 <= t <= p");
  const Eigen::MatrixXd inv_sqrt = psd_invsqrt(landmarks.gram_s.values);
  const double scale = std::sqrt(static_cast<double>(p - 1) / t);
  Rng rng(seed);
  Eigen::MatrixXd indicators = Eigen::MatrixXd::Zero(p, b);
  for (int col = 0; col < b; ++col)
    for (int idx : rng.sample_without_replacement(p, t)) indicators(idx, col) = 1.0;
  KgrpProjection proj{scale * (inv_sqrt * indicators), t};
  return {std::move(proj), std::move(landmarks)};
}

Projector fit_korp(LandmarkSet landmarks, double jitter) {
  const int p = landmarks.p();
  const Eigen::MatrixXd& k = landmarks.gram_s.values;
  if (jitter < 0.0) jitter = 1e-10 * k.trace() / p;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  for (int attempt = 0; attempt < 3 && llt.info() != Eigen::Success; ++attempt) {
    llt.compute(k + jitter * Eigen::MatrixXd::Identity(p, p));
    jitter *= 2.0;
  }
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("Cholesky of landmark Gram failed after jitter retries");
  // K_S = R^T R with R upper triangular; Eigen's LLT yields the lower factor.
  const Eigen::MatrixXd r = llt.matrixL().toDenseMatrix().transpose();
  const Eigen::MatrixXd rinv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  return {KorpProjection{rinv}, std::move(landmarks)};
}

Projector fit_kpca_rp(LandmarkSet landmarks, double eig_floor) {
  const int p = landmarks.p();
  const Eigen::MatrixXd& k = landmarks.gram_s.values;
  if (!is_symmetric(k)) throw NonSymmetric("landmark Gram is not symmetric");
  const Eigen::VectorXd col_means = k.colwise().mean();
  const double grand_mean = k.mean();
  Eigen::MatrixXd centered = k;
  centered.rowwise() -= col_means.transpose();
  centered.colwise() -= col_means;
  centered.array() += grand_mean;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centered);
  const Eigen::VectorXd& vals = es.eigenvalues();  // ascending
  const double lambda_max = vals(p - 1);
  if (!(lambda_max > 0.0))
    throw DegenerateSpectrum("centered landmark Gram has no positive eigenvalues");
  const double threshold =
      lambda_max * std::max(eig_floor, p * std::numeric_limits<double>::epsilon());

  int keep = 0;
  while (keep < p && vals(p - 1 - keep) > threshold) ++keep;
  if (keep == 0)
    throw DegenerateSpectrum("all eigenvalues below the relative floor");

  KpcaRpProjection proj;
  proj.alpha.resize(p, keep);
  proj.eigvals.resize(keep);
  for (int j = 0; j < keep; ++j) {
    const double lambda = vals(p - 1 - j);
    proj.eigvals(j) = lambda;
    // alpha^T K_centered alpha = 1 => the component has unit RKHS norm.
    proj.alpha.col(j) = es.eigenvectors().col(p - 1 - j) / std::sqrt(lambda);
  }
  proj.col_means = col_means;
  proj.grand_mean = grand_mean;
  return {std::move(proj), std::move(landmarks)};
}

EmbeddedSet embed(const Projector& proj, const GramMatrix& cross) {
  if (!(cross.spec == proj.spec()))
    throw SpecMismatch("cross-Gram kernel spec differs from the projector's");
  if (cross.cols() != proj.p())
    throw ShapeMismatch("cross-Gram has " + std::to_string(cross.cols()) +
                        " columns, projector expects " + std::to_string(proj.p()));
  if (const auto* g = std::get_if<KgrpProjection>(&proj.coef))
    return {cross.values * g->coef};
  if (const auto* o = std::get_if<KorpProjection>(&proj.coef))
    return {cross.values * o->rinv};
  const auto& pc = std::get<KpcaRpProjection>(proj.coef);
  Eigen::MatrixXd centered = cross.values;
  const Eigen::VectorXd row_means = centered.rowwise().mean();
  centered.colwise() -= row_means;
  centered.rowwise() -= pc.col_means.transpose();
  centered.array() += pc.grand_mean;
  return {centered * pc.alpha};
}

int default_kgrp_t(int p) {
  return std::min(30, (p + 1) / 2);
}

}  // namespace mrpc
