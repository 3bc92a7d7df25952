#ifndef MRPC_REFERENCE_HPP
#define MRPC_REFERENCE_HPP

#include "mrpc/cluster.hpp"
#include "mrpc/kernel.hpp"

// Plain serial reference implementations of the parallel kernels. They trade
// every optimization (precomputation, threading) for obviousness; tests check
// the production kernels against them and the benchmark tool times both.
namespace mrpc::ref {

GramMatrix self_gram(const KernelSpec& spec, const std::vector<SpdPoint>& points);
GramMatrix self_gram(const KernelSpec& spec, const std::vector<GrassmannPoint>& points);

GramMatrix cross_gram(const KernelSpec& spec, const std::vector<SpdPoint>& rows,
                      const std::vector<SpdPoint>& cols);
GramMatrix cross_gram(const KernelSpec& spec, const std::vector<GrassmannPoint>& rows,
                      const std::vector<GrassmannPoint>& cols);

// Textbook serial Lloyd with the same init/tie/repair policy as mrpc::kmeans.
ClusterResult kmeans(const Eigen::MatrixXd& vectors, const KmeansConfig& cfg);

Eigen::MatrixXd pairwise_distances(const std::vector<SpdPoint>& points);

}  // namespace mrpc::ref

#endif  // MRPC_REFERENCE_HPP
