#include "mrpc/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "mrpc/rng.hpp"

namespace mrpc::cli {

using nlohmann::json;

namespace {

// Independent child-seed streams derived from the master seed.
constexpr std::uint64_t kStreamBeta = 0xbe7a;
constexpr std::uint64_t kStreamProjection = 0x9801;
constexpr std::uint64_t kStreamKmeans = 0x3c15;

std::uint64_t projection_seed(std::uint64_t master, int i) {
  return mix_seed(mix_seed(master, kStreamProjection), static_cast<std::uint64_t>(i));
}

std::uint64_t kmeans_seed(std::uint64_t master, int i, int j, int repeats_kmeans) {
  return mix_seed(mix_seed(master, kStreamKmeans),
                  static_cast<std::uint64_t>(i) * repeats_kmeans + j);
}

}  // namespace

Method method_from_string(const std::string& name) {
  if (name == "kgrp") return Method::Kgrp;
  if (name == "korp") return Method::Korp;
  if (name == "kpca_rp") return Method::KpcaRp;
  if (name == "loge") return Method::LogE;
  if (name == "kernel_kmeans") return Method::KernelKmeans;
  if (name == "kpca") return Method::Kpca;
  if (name == "intrinsic") return Method::Intrinsic;
  throw ConfigError("unknown method '" + name + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Kgrp: return "kgrp";
    case Method::Korp: return "korp";
    case Method::KpcaRp: return "kpca_rp";
    case Method::LogE: return "loge";
    case Method::KernelKmeans: return "kernel_kmeans";
    case Method::Kpca: return "kpca";
    case Method::Intrinsic: return "intrinsic";
  }
  return "?";
}

bool is_projection_method(Method method) {
  return method == Method::Kgrp || method == Method::Korp || method == Method::KpcaRp;
}

bool uses_kernel(Method method) {
  return is_projection_method(method) || method == Method::KernelKmeans ||
         method == Method::Kpca;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
T get_field(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + key + "' has the wrong type");
  }
}

int require_positive(int value, const std::string& field) {
  if (value < 1) throw ConfigError("field '" + field + "' must be >= 1");
  return value;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  reject_unknown(j,
                 {"method", "kernel", "m", "p", "b", "t", "seed", "restarts",
                  "repeats_projection", "repeats_kmeans"},
                 "run config");
  RunConfig cfg;
  if (!j.contains("method")) throw ConfigError("field 'method' is required");
  cfg.method = method_from_string(j.at("method").get<std::string>());
  if (!j.contains("m")) throw ConfigError("field 'm' is required");
  cfg.m = require_positive(get_field<int>(j, "m", 0), "m");
  if (j.contains("kernel")) {
    const json& k = j.at("kernel");
    reject_unknown(k, {"family", "beta"}, "kernel");
    if (k.contains("family"))
      cfg.kernel_family = kernel_family_from_string(k.at("family").get<std::string>());
    if (k.contains("beta")) {
      cfg.beta = k.at("beta").get<double>();
      if (!(*cfg.beta > 0.0)) throw ConfigError("field 'beta' must be positive");
    }
  }
  if (j.contains("p")) cfg.p = require_positive(get_field<int>(j, "p", 0), "p");
  cfg.b = require_positive(get_field<int>(j, "b", cfg.b), "b");
  if (j.contains("t")) cfg.t = require_positive(get_field<int>(j, "t", 0), "t");
  cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
  cfg.restarts = require_positive(get_field<int>(j, "restarts", cfg.restarts), "restarts");
  cfg.repeats_projection = require_positive(
      get_field<int>(j, "repeats_projection", cfg.repeats_projection),
      "repeats_projection");
  cfg.repeats_kmeans = require_positive(
      get_field<int>(j, "repeats_kmeans", cfg.repeats_kmeans), "repeats_kmeans");
  return cfg;
}

GenConfig parse_gen_config(const json& j) {
  reject_unknown(
      j, {"kind", "m", "per_cluster", "d", "q", "center_spread", "noise_sigma", "seed"},
      "gen config");
  GenConfig cfg;
  const std::string kind = get_field<std::string>(j, "kind", "spd");
  if (kind == "spd") {
    cfg.kind = ManifoldKind::Spd;
  } else if (kind == "grassmann") {
    cfg.kind = ManifoldKind::Grassmann;
  } else {
    throw ConfigError("field 'kind' must be 'spd' or 'grassmann'");
  }
  cfg.m = require_positive(get_field<int>(j, "m", cfg.m), "m");
  cfg.per_cluster =
      require_positive(get_field<int>(j, "per_cluster", cfg.per_cluster), "per_cluster");
  cfg.d = require_positive(get_field<int>(j, "d", cfg.d), "d");
  cfg.q = require_positive(get_field<int>(j, "q", cfg.q), "q");
  if (cfg.kind == ManifoldKind::Grassmann && cfg.d > cfg.q)
    throw ConfigError("field 'd' must satisfy d <= q");
  cfg.center_spread = get_field<double>(j, "center_spread", cfg.center_spread);
  cfg.noise_sigma = get_field<double>(j, "noise_sigma", cfg.noise_sigma);
  if (cfg.noise_sigma < 0.0) throw ConfigError("field 'noise_sigma' must be >= 0");
  cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void cmd_gen(const GenConfig& config, const std::string& out_path, std::ostream& log) {
  LabeledDataset ds;
  if (config.kind == ManifoldKind::Spd) {
    ds = gen_spd_clusters({config.m, config.per_cluster, config.d, config.center_spread,
                           config.noise_sigma, config.seed});
  } else {
    ds = gen_grassmann_clusters({config.m, config.per_cluster, config.q, config.d,
                                 config.noise_sigma, config.seed});
  }
  save_dataset(ds, out_path);
  log << "wrote " << out_path << ": kind=" << (ds.kind == ManifoldKind::Spd ? "spd" : "grassmann")
      << " n=" << ds.size() << " dim="
      << (ds.kind == ManifoldKind::Spd
              ? std::to_string(ds.spd.front().dim())
              : std::to_string(ds.grassmann.front().ambient()) + "x" +
                    std::to_string(ds.grassmann.front().subdim()))
      << " classes=" << ds.num_classes() << "\n";
}

namespace {

// Per-dataset resolution of kernel spec and size parameters.
struct Resolved {
  KernelSpec spec;
  int p = 0;
  int t = 0;
  int keep = 0;  // kpca baseline component count
};

Resolved resolve(const RunConfig& cfg, const LabeledDataset& ds) {
  Resolved r;
  const int n = ds.size();
  if (n < 1) throw EmptyInput("dataset is empty");
  r.p = cfg.p.value_or(std::min(n, kDefaultLandmarks));
  if (r.p > n) throw InvalidSize("p=" + std::to_string(r.p) + " exceeds n=" +
                                 std::to_string(n));
  r.t = cfg.t.value_or(default_kgrp_t(r.p));
  if (r.t > r.p) throw InvalidSize("t=" + std::to_string(r.t) + " exceeds p");
  r.keep = std::min(r.p, n - 1);
  if (uses_kernel(cfg.method)) {
    const KernelFamily family = cfg.kernel_family.value_or(
        ds.kind == ManifoldKind::Spd ? KernelFamily::GaussianLED
                                     : KernelFamily::Projection);
    if (ds.kind == ManifoldKind::Spd && family == KernelFamily::Projection)
      throw KindMismatch("Projection kernel on SPD data");
    if (ds.kind == ManifoldKind::Grassmann && family != KernelFamily::Projection)
      throw KindMismatch(to_string(family) + " kernel on Grassmann data");
    r.spec.family = family;
    if (cfg.beta) {
      r.spec.beta = *cfg.beta;
    } else if (ds.kind == ManifoldKind::Spd) {
      r.spec.beta = default_beta(family, ds.spd, mix_seed(cfg.seed, kStreamBeta));
    } else {
      r.spec.beta = default_beta(family, ds.grassmann, mix_seed(cfg.seed, kStreamBeta));
    }
    validate_spec(r.spec, ds.kind == ManifoldKind::Spd
                              ? ds.spd.front().dim()
                              : ds.grassmann.front().subdim());
  }
  return r;
}

// Everything ahead of the kmeans stage, with its wall time.
struct Prepared {
  Eigen::MatrixXd vectors;  // projection methods and loge
  GramMatrix full_gram;     // kernel_kmeans and kpca
  double seconds = 0.0;
};

template <typename Point>
Eigen::MatrixXd project_points(Method method, const std::vector<Point>& points,
                               const Resolved& r, int b, std::uint64_t seed_proj) {
  const int n = static_cast<int>(points.size());
  const std::vector<int> idx = select_landmarks(n, r.p, mix_seed(seed_proj, 0));
  std::vector<Point> landmarks;
  landmarks.reserve(idx.size());
  for (int i : idx) landmarks.push_back(points[i]);
  LandmarkSet set{idx, gram(r.spec, landmarks)};
  Projector proj;
  switch (method) {
    case Method::Kgrp:
      proj = fit_kgrp(std::move(set), b, r.t, mix_seed(seed_proj, 1));
      break;
    case Method::Korp:
      proj = fit_korp(std::move(set));
      break;
    default:
      proj = fit_kpca_rp(std::move(set));
      break;
  }
  const GramMatrix cross = gram(r.spec, points, landmarks);
  return embed(proj, cross).vectors;
}

Prepared prepare(Method method, const LabeledDataset& ds, const Resolved& r, int b,
                 std::uint64_t seed_proj) {
  Prepared out;
  const auto t0 = std::chrono::steady_clock::now();
  switch (method) {
    case Method::Kgrp:
    case Method::Korp:
    case Method::KpcaRp:
      out.vectors = ds.kind == ManifoldKind::Spd
                        ? project_points(method, ds.spd, r, b, seed_proj)
                        : project_points(method, ds.grassmann, r, b, seed_proj);
      break;
    case Method::LogE:
      out.vectors = ds.kind == ManifoldKind::Spd ? loge_embed(ds.spd)
                                                 : loge_embed(ds.grassmann);
      break;
    case Method::KernelKmeans:
    case Method::Kpca:
      out.full_gram = ds.kind == ManifoldKind::Spd ? gram(r.spec, ds.spd)
                                                   : gram(r.spec, ds.grassmann);
      break;
    case Method::Intrinsic:
      break;  // works on the raw points
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

ClusterResult cluster_prepared(Method method, const LabeledDataset& ds,
                               const Prepared& prep, const Resolved& r,
                               const KmeansConfig& kcfg) {
  switch (method) {
    case Method::Kgrp:
    case Method::Korp:
    case Method::KpcaRp:
    case Method::LogE:
      return kmeans(prep.vectors, kcfg);
    case Method::KernelKmeans:
      return kernel_kmeans(prep.full_gram, kcfg);
    case Method::Kpca:
      return kpca_kmeans(prep.full_gram, r.keep, kcfg);
    case Method::Intrinsic:
      return ds.kind == ManifoldKind::Spd ? intrinsic_kmeans(ds.spd, kcfg)
                                          : intrinsic_kmeans(ds.grassmann, kcfg);
  }
  throw ConfigError("unreachable method");
}

BenchRecord make_record(const RunConfig& cfg, const Resolved& r,
                        const LabeledDataset& ds, std::uint64_t seed_proj,
                        std::uint64_t seed_km, const QualityReport& q) {
  BenchRecord rec;
  rec.method = to_string(cfg.method);
  rec.seed_projection = seed_proj;
  rec.seed_kmeans = seed_km;
  rec.ri = q.ri;
  rec.cp = q.cp;
  rec.f_measure = q.f_measure;
  rec.nmi = q.nmi;
  rec.runtime_s = q.runtime_s;
  rec.n = ds.size();
  rec.m = cfg.m;
  rec.p = is_projection_method(cfg.method) || cfg.method == Method::Kpca ? r.p : 0;
  return rec;
}

}  // namespace

QualityReport cmd_run(const RunConfig& cfg, const LabeledDataset& ds) {
  const Resolved r = resolve(cfg, ds);
  const std::uint64_t seed_proj = projection_seed(cfg.seed, 0);
  const std::uint64_t seed_km = kmeans_seed(cfg.seed, 0, 0, cfg.repeats_kmeans);
  const Prepared prep = prepare(cfg.method, ds, r, cfg.b, seed_proj);
  KmeansConfig kcfg;
  kcfg.m = cfg.m;
  kcfg.restarts = cfg.restarts;
  kcfg.seed = seed_km;
  const ClusterResult result = cluster_prepared(cfg.method, ds, prep, r, kcfg);
  return make_quality_report(result.labels, ds.labels, prep.seconds + result.runtime_s);
}

std::vector<BenchRecord> cmd_bench(const RunConfig& cfg, const LabeledDataset& ds) {
  const Resolved r = resolve(cfg, ds);
  std::vector<BenchRecord> records;
  const int outer = is_projection_method(cfg.method) ? cfg.repeats_projection : 1;
  for (int i = 0; i < outer; ++i) {
    const std::uint64_t seed_proj =
        is_projection_method(cfg.method) ? projection_seed(cfg.seed, i) : cfg.seed;
    const Prepared prep = prepare(cfg.method, ds, r, cfg.b, seed_proj);
    for (int j = 0; j < cfg.repeats_kmeans; ++j) {
      const std::uint64_t seed_km = kmeans_seed(cfg.seed, i, j, cfg.repeats_kmeans);
      KmeansConfig kcfg;
      kcfg.m = cfg.m;
      kcfg.restarts = cfg.restarts;
      kcfg.seed = seed_km;
      const ClusterResult result = cluster_prepared(cfg.method, ds, prep, r, kcfg);
      const QualityReport q = make_quality_report(result.labels, ds.labels,
                                                  prep.seconds + result.runtime_s);
      records.push_back(make_record(cfg, r, ds, seed_proj, seed_km, q));
    }
  }
  return records;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.method << ',' << r.seed_projection << ',' << r.seed_kmeans << ','
        << fmt(r.ri) << ',' << fmt(r.cp) << ',' << fmt(r.f_measure) << ','
        << fmt(r.nmi) << ',' << fmt(r.runtime_s) << ',' << r.n << ',' << r.m << ','
        << r.p << "\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string aggregate_table(const std::vector<BenchRecord>& records) {
  if (records.empty()) return "no runs\n";
  const auto stat = [&](auto getter) {
    double mean = 0.0;
    for (const auto& r : records) mean += getter(r);
    mean /= static_cast<double>(records.size());
    double var = 0.0;
    for (const auto& r : records) {
      const double d = getter(r) - mean;
      var += d * d;
    }
    if (records.size() > 1) var /= static_cast<double>(records.size() - 1);
    return std::pair{mean, std::sqrt(var)};
  };
  std::ostringstream out;
  out << "runs=" << records.size() << " method=" << records.front().method
      << " n=" << records.front().n << " m=" << records.front().m
      << " p=" << records.front().p << "\n";
  const auto line = [&](const char* name, auto getter) {
    const auto [mean, sd] = stat(getter);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-10s mean=%.6f std=%.6f\n", name, mean, sd);
    out << buf;
  };
  line("ri", [](const BenchRecord& r) { return r.ri; });
  line("cp", [](const BenchRecord& r) { return r.cp; });
  line("f_measure", [](const BenchRecord& r) { return r.f_measure; });
  line("nmi", [](const BenchRecord& r) { return r.nmi; });
  line("runtime_s", [](const BenchRecord& r) { return r.runtime_s; });
  return out.str();
}

}  // namespace mrpc::cli
