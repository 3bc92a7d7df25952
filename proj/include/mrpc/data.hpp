#ifndef MRPC_DATA_HPP
#define MRPC_DATA_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mrpc/manifold.hpp"
#include "mrpc/rp.hpp"

namespace mrpc {

struct LabeledDataset {
  ManifoldKind kind = ManifoldKind::Spd;
  std::vector<SpdPoint> spd;
  std::vector<GrassmannPoint> grassmann;
  std::vector<int> labels;
  std::map<std::string, std::string> meta;

  int size() const { return static_cast<int>(labels.size()); }
  int num_classes() const;
};

struct SpdClusterParams {
  int m = 2;
  int per_cluster = 10;
  int d = 3;
  double center_spread = 1.0;  // scale of the random cluster centers
  double noise_sigma = 0.1;    // tangent-space Gaussian std
  std::uint64_t seed = 0;
};

struct GrassmannClusterParams {
  int m = 2;
  int per_cluster = 10;
  int q = 10;
  int d = 2;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

// Cluster centers C_k = exp(center_spread * Sym(G_k)); members are
// exp_map(C_k, noise_sigma * Sym(G)). Zero noise copies the center exactly.
LabeledDataset gen_spd_clusters(const SpdClusterParams& params);

// Centers are thin-QR orthonormalizations of Gaussian q x d matrices; members
// re-orthonormalize center + noise_sigma * Gaussian.
LabeledDataset gen_grassmann_clusters(const GrassmannClusterParams& params);

// 5x5 covariance of per-pixel [I, |dI/dx|, |dI/dy|, |d2I/dx2|, |d2I/dy2|]
// (central differences, replicated borders), regularized by spd_min_eig * I.
SpdPoint covariance_descriptor(const Eigen::MatrixXd& image);

// Vectorizes each frame to a column, stacks, and returns the first d left
// singular vectors as a Grassmann point.
GrassmannPoint image_set_to_grassmann(const std::vector<Eigen::MatrixXd>& frames, int d);

// JSON-lines dataset container; see README for the schema.
void save_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

// Single-object JSON projector container (landmark identities + coefficients).
void save_projector(const Projector& proj, const std::string& path);
Projector load_projector(const std::string& path);

}  // namespace mrpc

#endif  // MRPC_DATA_HPP
