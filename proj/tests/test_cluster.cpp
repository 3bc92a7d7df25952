#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mrpc/cluster.hpp"
#include "mrpc/data.hpp"
#include "mrpc/eval.hpp"
#include "mrpc/parallel.hpp"
#include "mrpc/reference.hpp"
#include "test_support.hpp"

using namespace mrpc;
using test_support::random_matrix;
using test_support::random_spd;

namespace {

// Two well-separated blocks: within-block kernel 0.99, across 0.01. PSD by
// construction (sum of scaled all-ones blocks plus a diagonal bump).
GramMatrix block_gram(int per_block) {
  const int n = 2 * per_block;
  Eigen::MatrixXd k = Eigen::MatrixXd::Constant(n, n, 0.01);
  k.topLeftCorner(per_block, per_block).array() += 0.98;
  k.bottomRightCorner(per_block, per_block).array() += 0.98;
  k.diagonal().array() += 0.01;
  return {k, {KernelFamily::GaussianLED, 1.0}};
}

std::vector<int> block_labels(int per_block) {
  std::vector<int> labels(2 * per_block, 0);
  std::fill(labels.begin() + per_block, labels.end(), 1);
  return labels;
}

}  // namespace

TEST_CASE("kmeans separates two 1-D pairs with the derived inertia") {
  Eigen::MatrixXd data(4, 1);
  data << 0.0, 0.1, 10.0, 10.1;
  KmeansConfig cfg;
  cfg.m = 2;
  cfg.seed = 1;
  const ClusterResult result = kmeans(data, cfg);
  CHECK(result.labels[0] == result.labels[1]);
  CHECK(result.labels[2] == result.labels[3]);
  CHECK(result.labels[0] != result.labels[2]);
  // centroids 0.05 and 10.05; each point contributes 0.05^2
  CHECK(result.inertia == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(result.converged);
}

TEST_CASE("kmeans with m = n and m = 1 closed forms") {
  std::mt19937_64 gen(80);
  const Eigen::MatrixXd data = random_matrix(gen, 8, 3);
  KmeansConfig cfg;
  cfg.m = 8;
  cfg.seed = 2;
  const ClusterResult own = kmeans(data, cfg);
  CHECK(own.inertia == doctest::Approx(0.0));
  std::vector<int> sorted = own.labels;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 8; ++i) CHECK(sorted[i] == i);

  cfg.m = 1;
  const ClusterResult single = kmeans(data, cfg);
  const Eigen::RowVectorXd mean = data.colwise().mean();
  double expected = 0.0;
  for (int i = 0; i < 8; ++i) expected += (data.row(i) - mean).squaredNorm();
  CHECK(single.inertia == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kmeans guards and determinism") {
  Eigen::MatrixXd data(2, 1);
  data << 0.0, 1.0;
  KmeansConfig cfg;
  cfg.m = 3;
  CHECK_THROWS_AS(kmeans(data, cfg), TooFewPoints);

  std::mt19937_64 gen(81);
  const Eigen::MatrixXd big = random_matrix(gen, 50, 4);
  cfg.m = 4;
  cfg.seed = 77;
  const ClusterResult a = kmeans(big, cfg);
  const ClusterResult b = kmeans(big, cfg);
  CHECK(a.labels == b.labels);
  CHECK(a.inertia == b.inertia);
  CHECK(a.iterations == b.iterations);

  cfg.restarts = 1;
  const ClusterResult one = kmeans(big, cfg);
  CHECK(a.inertia <= one.inertia);
}

TEST_CASE("kmeans inertia trace is nonincreasing") {
  std::mt19937_64 gen(82);
  for (int seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd data = random_matrix(gen, 60, 3);
    KmeansConfig cfg;
    cfg.m = 5;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.restarts = 3;
    const ClusterResult result = kmeans(data, cfg);
    REQUIRE(!result.inertia_trace.empty());
    for (std::size_t i = 1; i < result.inertia_trace.size(); ++i)
      CHECK(result.inertia_trace[i] <= result.inertia_trace[i - 1] * (1 + 1e-12));
    CHECK(result.inertia == doctest::Approx(result.inertia_trace.back()));
  }
}

TEST_CASE("kmeans labels are invariant under positive scaling") {
  std::mt19937_64 gen(83);
  const Eigen::MatrixXd data = random_matrix(gen, 40, 3);
  KmeansConfig cfg;
  cfg.m = 3;
  cfg.seed = 11;
  const ClusterResult base = kmeans(data, cfg);
  const ClusterResult scaled = kmeans(4.0 * data, cfg);
  CHECK(base.labels == scaled.labels);
  CHECK(scaled.inertia == doctest::Approx(16.0 * base.inertia).epsilon(1e-12));
}

TEST_CASE("kmeans agrees with the serial reference implementation") {
  std::mt19937_64 gen(84);
  for (int seed = 0; seed < 4; ++seed) {
    const Eigen::MatrixXd data = random_matrix(gen, 45, 3);
    KmeansConfig cfg;
    cfg.m = 4;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.restarts = 5;
    const ClusterResult fast = kmeans(data, cfg);
    const ClusterResult slow = ref::kmeans(data, cfg);
    CHECK(fast.labels == slow.labels);
    CHECK(fast.inertia == doctest::Approx(slow.inertia).epsilon(1e-12));
    CHECK(fast.iterations == slow.iterations);
  }
}

TEST_CASE("kmeans parallel path matches serial path bitwise") {
  std::mt19937_64 gen(85);
  const Eigen::MatrixXd data = random_matrix(gen, 120, 4);
  KmeansConfig cfg;
  cfg.m = 5;
  cfg.seed = 3;
  par::set_enabled(false);
  const ClusterResult serial = kmeans(data, cfg);
  par::set_enabled(true);
  const ClusterResult parallel = kmeans(data, cfg);
  CHECK(serial.labels == parallel.labels);
  CHECK(serial.inertia == parallel.inertia);
}

TEST_CASE("kernel_kmeans recovers the block structure") {
  const GramMatrix gram = block_gram(10);
  KmeansConfig cfg;
  cfg.m = 2;
  cfg.seed = 5;
  const ClusterResult result = kernel_kmeans(gram, cfg);
  CHECK(purity(result.labels, block_labels(10)) == doctest::Approx(1.0));
}

TEST_CASE("kernel_kmeans with m = n drives inertia to zero") {
  std::mt19937_64 gen(86);
  const Eigen::MatrixXd x = random_matrix(gen, 6, 2);
  const GramMatrix gram{x * x.transpose(), {KernelFamily::GaussianLED, 1.0}};
  KmeansConfig cfg;
  cfg.m = 6;
  cfg.seed = 1;
  CHECK(kernel_kmeans(gram, cfg).inertia == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("kernel_kmeans on a linear kernel equals kmeans on the raw vectors") {
  std::mt19937_64 gen(87);
  for (int seed = 0; seed < 6; ++seed) {
    const Eigen::MatrixXd x = random_matrix(gen, 20, 3);
    const GramMatrix gram{x * x.transpose(), {KernelFamily::GaussianLED, 1.0}};
    KmeansConfig cfg;
    cfg.m = 3;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.restarts = 3;
    const ClusterResult euclid = kmeans(x, cfg);
    const ClusterResult kernel = kernel_kmeans(gram, cfg);
    CHECK(euclid.labels == kernel.labels);
    CHECK(euclid.inertia == doctest::Approx(kernel.inertia).epsilon(1e-8));
  }
}

TEST_CASE("loge_embed SPD examples and LED isometry") {
  const std::vector<SpdPoint> id{SpdPoint(Eigen::MatrixXd::Identity(2, 2))};
  const Eigen::MatrixXd zero = loge_embed(id);
  CHECK(zero.cols() == 3);
  CHECK(zero.cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd d(2, 2);
  d << std::exp(1.0), 0, 0, 1;
  const Eigen::MatrixXd row = loge_embed(std::vector<SpdPoint>{SpdPoint(d)});
  CHECK(row(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(row(0, 1)) < 1e-12);
  CHECK(std::abs(row(0, 2)) < 1e-12);

  std::mt19937_64 gen(88);
  for (int rep = 0; rep < 10; ++rep) {
    const SpdPoint x = random_spd(gen, 3);
    const SpdPoint y = random_spd(gen, 3);
    const Eigen::MatrixXd emb = loge_embed(std::vector<SpdPoint>{x, y});
    CHECK((emb.row(0) - emb.row(1)).squaredNorm() ==
          doctest::Approx(led_distance(x, y)).epsilon(1e-8));
  }
}

TEST_CASE("loge_embed Grassmann flattening is row-major") {
  Eigen::MatrixXd basis(3, 2);
  basis << 1, 0, 0, 1, 0, 0;
  const Eigen::MatrixXd emb =
      loge_embed(std::vector<GrassmannPoint>{GrassmannPoint(basis)});
  REQUIRE(emb.cols() == 6);
  CHECK(emb(0, 0) == 1.0);  // (0,0)
  CHECK(emb(0, 3) == 1.0);  // (1,1)
  CHECK(emb(0, 1) + emb(0, 2) + emb(0, 4) + emb(0, 5) == 0.0);
}

TEST_CASE("intrinsic_kmeans trivial cases") {
  std::mt19937_64 gen(89);
  const SpdPoint x = random_spd(gen, 3);
  const std::vector<SpdPoint> same{x, x, x, x};
  KmeansConfig cfg;
  cfg.m = 1;
  cfg.seed = 1;
  cfg.restarts = 1;
  const ClusterResult result = intrinsic_kmeans(same, cfg);
  CHECK(result.inertia == doctest::Approx(0.0));
  CHECK(result.iterations <= 2);
  CHECK(result.converged);
}

TEST_CASE("intrinsic_kmeans separates tight SPD clusters") {
  SpdClusterParams params;
  params.m = 2;
  params.per_cluster = 8;
  params.d = 2;
  params.center_spread = 1.5;
  params.noise_sigma = 0.05;
  params.seed = 21;
  const LabeledDataset ds = gen_spd_clusters(params);
  KmeansConfig cfg;
  cfg.m = 2;
  cfg.seed = 3;
  cfg.restarts = 4;
  const ClusterResult result = intrinsic_kmeans(ds.spd, cfg);
  CHECK(purity(result.labels, ds.labels) == doctest::Approx(1.0));
}

TEST_CASE("intrinsic_kmeans honors the 100-iteration cap") {
  SpdClusterParams params;
  params.m = 3;
  params.per_cluster = 5;
  params.d = 2;
  params.center_spread = 0.5;
  params.noise_sigma = 0.6;
  params.seed = 4;
  const LabeledDataset ds = gen_spd_clusters(params);
  KmeansConfig cfg;
  cfg.m = 3;
  cfg.seed = 9;
  cfg.restarts = 1;
  cfg.max_iter = 500;
  cfg.tol = -1.0;  // unsatisfiable: force the cap to bind
  const ClusterResult result = intrinsic_kmeans(ds.spd, cfg, 3);
  CHECK(result.iterations == 100);
  CHECK_FALSE(result.converged);
}

TEST_CASE("intrinsic_kmeans works on the Grassmannian") {
  GrassmannClusterParams params;
  params.m = 2;
  params.per_cluster = 6;
  params.q = 6;
  params.d = 2;
  params.noise_sigma = 0.05;
  params.seed = 13;
  const LabeledDataset ds = gen_grassmann_clusters(params);
  KmeansConfig cfg;
  cfg.m = 2;
  cfg.seed = 2;
  cfg.restarts = 3;
  const ClusterResult result = intrinsic_kmeans(ds.grassmann, cfg);
  CHECK(purity(result.labels, ds.labels) == doctest::Approx(1.0));
}

TEST_CASE("kpca_kmeans with a full-rank embedding tracks kernel_kmeans") {
  std::mt19937_64 gen(90);
  int matches = 0;
  for (int seed = 0; seed < 10; ++seed) {
    std::vector<SpdPoint> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(random_spd(gen, 3));
    const GramMatrix g = gram({KernelFamily::GaussianLED, 0.5}, pts);
    KmeansConfig cfg;
    cfg.m = 2;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.restarts = 2;
    const ClusterResult a = kpca_kmeans(g, 19, cfg);
    const ClusterResult b = kernel_kmeans(g, cfg);
    if (a.labels == b.labels) ++matches;
  }
  CHECK(matches >= 9);
}

TEST_CASE("kpca_kmeans block Gram and degenerate input") {
  const GramMatrix g = block_gram(10);
  KmeansConfig cfg;
  cfg.m = 2;
  cfg.seed = 8;
  const ClusterResult result = kpca_kmeans(g, 2, cfg);
  CHECK(purity(result.labels, block_labels(10)) == doctest::Approx(1.0));

  const GramMatrix ones{Eigen::MatrixXd::Ones(6, 6), {KernelFamily::GaussianLED, 1.0}};
  CHECK_THROWS_AS(kpca_kmeans(ones, 3, cfg), DegenerateSpectrum);
  CHECK_THROWS_AS(kpca_kmeans(g, 20, cfg), InvalidSize);
}

TEST_CASE("cluster results carry well-formed labels") {
  std::mt19937_64 gen(91);
  const Eigen::MatrixXd data = random_matrix(gen, 30, 2);
  KmeansConfig cfg;
  cfg.m = 4;
  cfg.seed = 5;
  const ClusterResult result = kmeans(data, cfg);
  REQUIRE(result.labels.size() == 30);
  for (int label : result.labels) {
    CHECK(label >= 0);
    CHECK(label < 4);
  }
  CHECK(result.runtime_s >= 0.0);
}
