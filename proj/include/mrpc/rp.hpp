#ifndef MRPC_RP_HPP
#define MRPC_RP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "mrpc/kernel.hpp"

namespace mrpc {

// The p randomly chosen points whose kernel rows define the projection
// hyperplanes, together with their p x p self-Gram.
struct LandmarkSet {
  std::vector<int> indices;
  GramMatrix gram_s;

  int p() const { return static_cast<int>(indices.size()); }
};

// p distinct indices drawn uniformly without replacement; deterministic for
// fixed (n, p, seed).
std::vector<int> select_landmarks(int n, int p, std::uint64_t seed);

// V diag(max(lambda, floor)^{-1/2}) V^T for a symmetric PSD matrix.
Eigen::MatrixXd psd_invsqrt(const Eigen::MatrixXd& k, double floor = kSpdMinEig);

// Gaussian hyperplanes: column i is sqrt((p-1)/t) * K_S^{-1/2} * e_{S1,i},
// with S1,i a fresh random t-subset of the landmarks.
struct KgrpProjection {
  Eigen::MatrixXd coef;  // p x b
  int t = 0;
};

// Orthonormal hyperplanes via Cholesky K_S = R^T R; stores R^{-1}.
struct KorpProjection {
  Eigen::MatrixXd rinv;  // p x p upper triangular
};

// Principal-component hyperplanes from the double-centered K_S.
struct KpcaRpProjection {
  Eigen::MatrixXd alpha;     // p x k, columns scaled to unit RKHS norm
  Eigen::VectorXd eigvals;   // k, strictly positive, nonincreasing
  Eigen::VectorXd col_means; // column means of the uncentered K_S
  double grand_mean = 0.0;
};

struct Projector {
  std::variant<KgrpProjection, KorpProjection, KpcaRpProjection> coef;
  LandmarkSet landmarks;

  const KernelSpec& spec() const { return landmarks.gram_s.spec; }
  int p() const { return landmarks.p(); }
  int out_dim() const;
};

Projector fit_kgrp(LandmarkSet landmarks, int b, int t, std::uint64_t seed);

// jitter < 0 selects the default 1e-10 * trace(K_S) / p; on Cholesky failure
// the jitter is added to the diagonal and doubled, up to 3 retries.
Projector fit_korp(LandmarkSet landmarks, double jitter = -1.0);

Projector fit_kpca_rp(LandmarkSet landmarks, double eig_floor = 1e-12);

struct EmbeddedSet {
  Eigen::MatrixXd vectors;  // n x dim

  int n() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
};

// Applies the fitted projector to an n x p cross-Gram between dataset points
// and the landmarks.
EmbeddedSet embed(const Projector& proj, const GramMatrix& cross);

// KGRP default subset size: the CLT wants at least ~30 samples, capped for
// small landmark sets.
int default_kgrp_t(int p);

inline constexpr int kDefaultLandmarks = 100;
inline constexpr int kDefaultKgrpDim = 300;

}  // namespace mrpc

#endif  // MRPC_RP_HPP
