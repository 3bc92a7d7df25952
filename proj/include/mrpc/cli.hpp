#ifndef MRPC_CLI_HPP
#define MRPC_CLI_HPP

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mrpc/cluster.hpp"
#include "mrpc/data.hpp"
#include "mrpc/eval.hpp"

namespace mrpc::cli {

enum class Method { Kgrp, Korp, KpcaRp, LogE, KernelKmeans, Kpca, Intrinsic };

Method method_from_string(const std::string& name);
std::string to_string(Method method);
bool is_projection_method(Method method);
bool uses_kernel(Method method);

struct RunConfig {
  Method method = Method::Korp;
  std::optional<KernelFamily> kernel_family;  // default: LED on SPD, Projection on G
  std::optional<double> beta;                 // default per family
  int m = 0;
  std::optional<int> p;  // default min(n, 100); doubles as `keep` for kpca
  int b = kDefaultKgrpDim;
  std::optional<int> t;  // default min(30, ceil(p/2))
  std::uint64_t seed = 0;
  int restarts = 10;
  int repeats_projection = 10;
  int repeats_kmeans = 10;
};

struct GenConfig {
  ManifoldKind kind = ManifoldKind::Spd;
  int m = 2;
  int per_cluster = 10;
  int d = 3;
  int q = 10;  // Grassmann ambient dimension
  double center_spread = 1.0;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

// Strict parsers: unknown keys are rejected by name.
RunConfig parse_run_config(const nlohmann::json& j);
GenConfig parse_gen_config(const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

struct BenchRecord {
  std::string method;
  std::uint64_t seed_projection = 0;
  std::uint64_t seed_kmeans = 0;
  double ri = 0, cp = 0, f_measure = 0, nmi = 0, runtime_s = 0;
  int n = 0, m = 0, p = 0;
};

void cmd_gen(const GenConfig& config, const std::string& out_path, std::ostream& log);

// Full pipeline for one (projection seed, kmeans seed) cell; the runtime
// window spans Gram/feature computation through clustering.
QualityReport cmd_run(const RunConfig& config, const LabeledDataset& ds);

// 10x10 protocol for projection methods (repeats_projection x repeats_kmeans
// derived-seed runs); kmeans-seed repeats only for the baselines.
std::vector<BenchRecord> cmd_bench(const RunConfig& config, const LabeledDataset& ds);

void write_csv(const std::vector<BenchRecord>& records, const std::string& path);
std::string aggregate_table(const std::vector<BenchRecord>& records);

inline constexpr char kCsvHeader[] =
    "method,seed_projection,seed_kmeans,ri,cp,f_measure,nmi,runtime_s,n,m,p";

}  // namespace mrpc::cli

#endif  // MRPC_CLI_HPP
