#ifndef MRPC_KERNEL_HPP
#define MRPC_KERNEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mrpc/manifold.hpp"

namespace mrpc {

enum class KernelFamily { GaussianLED, GaussianStein, Projection };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

struct KernelSpec {
  KernelFamily family = KernelFamily::GaussianLED;
  double beta = 1.0;

  bool operator==(const KernelSpec& other) const {
    return family == other.family && beta == other.beta;
  }
};

// The Stein-divergence Gaussian kernel is Mercer only for
// beta in {1/2, 1, ..., (d-1)/2} or beta >= (d-1)/2.
bool stein_beta_admissible(double beta, int d);

// Throws InvalidBeta if the spec cannot serve data of point dimension d.
void validate_spec(const KernelSpec& spec, int d);

double kernel_eval(const KernelSpec& spec, const SpdPoint& x, const SpdPoint& y);
double kernel_eval(const KernelSpec& spec, const GrassmannPoint& x,
                   const GrassmannPoint& y);

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

// Self-Gram: symmetric by construction, each unordered pair evaluated once.
GramMatrix gram(const KernelSpec& spec, const std::vector<SpdPoint>& points);
GramMatrix gram(const KernelSpec& spec, const std::vector<GrassmannPoint>& points);

// Rectangular Gram between two point lists.
GramMatrix gram(const KernelSpec& spec, const std::vector<SpdPoint>& rows,
                const std::vector<SpdPoint>& cols);
GramMatrix gram(const KernelSpec& spec, const std::vector<GrassmannPoint>& rows,
                const std::vector<GrassmannPoint>& cols);

// Median-heuristic default for the LED Gaussian: beta = 1 / (2 sigma^2) with
// sigma^2 the median led_distance over a 200-pair sample.
double median_heuristic_beta(const std::vector<SpdPoint>& points, std::uint64_t seed,
                             int pairs = 200);

// Default beta per family: median heuristic (LED), (d-1)/2 (Stein), 1 (Projection).
double default_beta(KernelFamily family, const std::vector<SpdPoint>& points,
                    std::uint64_t seed);
double default_beta(KernelFamily family, const std::vector<GrassmannPoint>& points,
                    std::uint64_t seed);

}  // namespace mrpc

#endif  // MRPC_KERNEL_HPP
