#include "mrpc/data.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "mrpc/rng.hpp"

namespace mrpc {

using nlohmann::json;

int LabeledDataset::num_classes() const {
  std::set<int> classes(labels.begin(), labels.end());
  return static_cast<int>(classes.size());
}

namespace {

Eigen::MatrixXd gaussian_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& g) {
  return 0.5 * (g + g.transpose());
}

Eigen::MatrixXd thin_orthonormal(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

}  // namespace

LabeledDataset gen_spd_clusters(const SpdClusterParams& params) {
  if (params.m < 1 || params.per_cluster < 1 || params.d < 1)
    throw ConfigError("gen_spd_clusters: counts and dimension must be >= 1");
  if (params.noise_sigma < 0.0)
    throw ConfigError("gen_spd_clusters: noise_sigma must be >= 0");
  Rng rng(params.seed);
  LabeledDataset ds;
  ds.kind = ManifoldKind::Spd;
  // The eigenvalue floor is added unconditionally; ill-conditioned centers
  // amplify tangent noise through the congruence and can otherwise push
  // members below the SPD invariant.
  const Eigen::MatrixXd reg =
      kSpdMinEig * Eigen::MatrixXd::Identity(params.d, params.d);
  for (int k = 0; k < params.m; ++k) {
    const SpdPoint center(
        sym_exp(params.center_spread *
                symmetrized(gaussian_matrix(rng, params.d, params.d))) +
        reg);
    const Eigen::MatrixXd half = spd_power(center.mat(), 0.5);
    for (int i = 0; i < params.per_cluster; ++i) {
      if (params.noise_sigma == 0.0) {
        ds.spd.push_back(center);
      } else {
        // Tangent noise drawn in the affine-invariant inner product at the
        // center: the geodesic distance to the center is exactly
        // noise_sigma * ||Sym(G)||_F, independent of the center's conditioning.
        const Eigen::MatrixXd sym =
            params.noise_sigma * symmetrized(gaussian_matrix(rng, params.d, params.d));
        TangentVector noise{ManifoldKind::Spd, half * sym * half};
        noise.mat = 0.5 * (noise.mat + noise.mat.transpose());
        ds.spd.push_back(SpdPoint(exp_map(center, noise).mat() + reg));
      }
      ds.labels.push_back(k);
    }
  }
  ds.meta = {{"generator", "spd_clusters"},
             {"m", std::to_string(params.m)},
             {"per_cluster", std::to_string(params.per_cluster)},
             {"d", std::to_string(params.d)},
             {"center_spread", std::to_string(params.center_spread)},
             {"noise_sigma", std::to_string(params.noise_sigma)},
             {"seed", std::to_string(params.seed)}};
  return ds;
}

LabeledDataset gen_grassmann_clusters(const GrassmannClusterParams& params) {
  if (params.m < 1 || params.per_cluster < 1 || params.d < 1 || params.q < params.d)
    throw ConfigError("gen_grassmann_clusters: need counts >= 1 and d <= q");
  if (params.noise_sigma < 0.0)
    throw ConfigError("gen_grassmann_clusters: noise_sigma must be >= 0");
  Rng rng(params.seed);
  LabeledDataset ds;
  ds.kind = ManifoldKind::Grassmann;
  for (int k = 0; k < params.m; ++k) {
    const GrassmannPoint center(thin_orthonormal(gaussian_matrix(rng, params.q, params.d)));
    for (int i = 0; i < params.per_cluster; ++i) {
      if (params.noise_sigma == 0.0) {
        ds.grassmann.push_back(center);
      } else {
        ds.grassmann.push_back(GrassmannPoint(thin_orthonormal(
            center.basis() + params.noise_sigma * gaussian_matrix(rng, params.q, params.d))));
      }
      ds.labels.push_back(k);
    }
  }
  ds.meta = {{"generator", "grassmann_clusters"},
             {"m", std::to_string(params.m)},
             {"per_cluster", std::to_string(params.per_cluster)},
             {"q", std::to_string(params.q)},
             {"d", std::to_string(params.d)},
             {"noise_sigma", std::to_string(params.noise_sigma)},
             {"seed", std::to_string(params.seed)}};
  return ds;
}

SpdPoint covariance_descriptor(const Eigen::MatrixXd& image) {
  const int h = static_cast<int>(image.rows());
  const int w = static_cast<int>(image.cols());
  if (h < 3 || w < 3) throw ImageTooSmall("covariance_descriptor needs h, w >= 3");
  const long long n = static_cast<long long>(h) * w;
  Eigen::MatrixXd features(n, 5);
  auto at = [&](int y, int x) {
    return image(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
  };
  long long row = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++row) {
      const double dx = 0.5 * (at(y, x + 1) - at(y, x - 1));
      const double dy = 0.5 * (at(y + 1, x) - at(y - 1, x));
      const double dxx = at(y, x + 1) - 2.0 * at(y, x) + at(y, x - 1);
      const double dyy = at(y + 1, x) - 2.0 * at(y, x) + at(y - 1, x);
      features(row, 0) = image(y, x);
      features(row, 1) = std::abs(dx);
      features(row, 2) = std::abs(dy);
      features(row, 3) = std::abs(dxx);
      features(row, 4) = std::abs(dyy);
    }
  }
  const Eigen::RowVectorXd mean = features.colwise().mean();
  features.rowwise() -= mean;
  Eigen::MatrixXd cov =
      features.transpose() * features / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());
  cov += kSpdMinEig * Eigen::MatrixXd::Identity(5, 5);
  return SpdPoint(std::move(cov));
}

GrassmannPoint image_set_to_grassmann(const std::vector<Eigen::MatrixXd>& frames,
                                      int d) {
  if (d < 1) throw InvalidSize("image_set_to_grassmann: d must be >= 1");
  if (static_cast<int>(frames.size()) < d)
    throw TooFewFrames("need at least d=" + std::to_string(d) + " frames, got " +
                       std::to_string(frames.size()));
  const auto rows = frames.front().rows();
  const auto cols = frames.front().cols();
  Eigen::MatrixXd stacked(rows * cols, frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (frames[f].rows() != rows || frames[f].cols() != cols)
      throw ShapeMismatch("frame " + std::to_string(f) + " has a different shape");
    long long k = 0;
    for (Eigen::Index y = 0; y < rows; ++y)
      for (Eigen::Index x = 0; x < cols; ++x) stacked(k++, f) = frames[f](y, x);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU);
  return GrassmannPoint(svd.matrixU().leftCols(d));
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string kind_name(ManifoldKind kind) {
  return kind == ManifoldKind::Spd ? "spd" : "grassmann";
}

json parse_line(const std::string& line, int line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         int line_no) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw SchemaError("line " + std::to_string(line_no) + ": unknown key '" + key +
                        "'");
}

std::vector<double> matrix_to_rowmajor(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

Eigen::MatrixXd rowmajor_to_matrix(const std::vector<double>& flat, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = flat[k++];
  return m;
}

}  // namespace

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const bool is_spd = ds.kind == ManifoldKind::Spd;
  std::string dim;
  if (is_spd) {
    if (ds.spd.empty()) throw EmptyInput("save_dataset: empty dataset");
    dim = "[" + std::to_string(ds.spd.front().dim()) + "]";
  } else {
    if (ds.grassmann.empty()) throw EmptyInput("save_dataset: empty dataset");
    dim = "[" + std::to_string(ds.grassmann.front().ambient()) + "," +
          std::to_string(ds.grassmann.front().subdim()) + "]";
  }
  out << "{\"format\":\"manifold-ds\",\"version\":1,\"kind\":\"" << kind_name(ds.kind)
      << "\",\"dim\":" << dim << ",\"n\":" << ds.size() << "}\n";
  for (int i = 0; i < ds.size(); ++i) {
    const Eigen::MatrixXd& m = is_spd ? ds.spd[i].mat() : ds.grassmann[i].basis();
    out << "{\"label\":" << ds.labels[i] << ",\"data\":[";
    bool first = true;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (!first) out << ',';
        out << format_double(m(r, c));
        first = false;
      }
    }
    out << "]}\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("line 1: missing header");
  const json header = parse_line(line, 1);
  reject_unknown_keys(header, {"format", "version", "kind", "dim", "n"}, 1);
  for (const char* key : {"format", "version", "kind", "dim", "n"})
    if (!header.contains(key))
      throw SchemaError(std::string("line 1: missing header key '") + key + "'");
  if (header["format"] != "manifold-ds")
    throw SchemaError("line 1: format is not 'manifold-ds'");
  if (header["version"] != 1) throw SchemaError("line 1: unsupported version");

  LabeledDataset ds;
  const std::string kind = header["kind"].get<std::string>();
  int rows = 0, cols = 0;
  const auto& dim = header["dim"];
  if (kind == "spd") {
    ds.kind = ManifoldKind::Spd;
    if (!dim.is_array() || dim.size() != 1 || !dim[0].is_number_integer())
      throw SchemaError("line 1: spd dim must be [d]");
    rows = cols = dim[0].get<int>();
  } else if (kind == "grassmann") {
    ds.kind = ManifoldKind::Grassmann;
    if (!dim.is_array() || dim.size() != 2)
      throw SchemaError("line 1: grassmann dim must be [q,d]");
    rows = dim[0].get<int>();
    cols = dim[1].get<int>();
  } else {
    throw SchemaError("line 1: unknown kind '" + kind + "'");
  }
  if (rows < 1 || cols < 1 || cols > rows)
    throw SchemaError("line 1: invalid dim");
  const int n = header["n"].get<int>();
  if (n < 0) throw SchemaError("line 1: negative n");

  for (int i = 0; i < n; ++i) {
    const int line_no = i + 2;
    if (!std::getline(in, line))
      throw SchemaError("line " + std::to_string(line_no) + ": unexpected end of file");
    const json rec = parse_line(line, line_no);
    reject_unknown_keys(rec, {"label", "data"}, line_no);
    if (!rec.contains("label") || !rec.contains("data") ||
        !rec["label"].is_number_integer() || !rec["data"].is_array())
      throw SchemaError("line " + std::to_string(line_no) +
                        ": record needs integer 'label' and array 'data'");
    const auto flat = rec["data"].get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != rows * cols)
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(rows * cols) + " floats, got " +
                        std::to_string(flat.size()));
    Eigen::MatrixXd m = rowmajor_to_matrix(flat, rows, cols);
    try {
      if (ds.kind == ManifoldKind::Spd) {
        SpdPoint p(std::move(m));
        p.validate();
        ds.spd.push_back(std::move(p));
      } else {
        ds.grassmann.push_back(GrassmannPoint(std::move(m)));
      }
    } catch (const Error& e) {
      throw InvariantViolation("point " + std::to_string(i) + " (line " +
                               std::to_string(line_no) + "): " + e.what());
    }
    ds.labels.push_back(rec["label"].get<int>());
  }
  ds.meta["path"] = path;
  return ds;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", matrix_to_rowmajor(m)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != rows * cols)
    throw SchemaError("matrix payload size mismatch");
  return rowmajor_to_matrix(flat, rows, cols);
}

}  // namespace

void save_projector(const Projector& proj, const std::string& path) {
  json j;
  j["format"] = "mrpc-projector";
  j["version"] = 1;
  j["kernel"] = {{"family", to_string(proj.spec().family)}, {"beta", proj.spec().beta}};
  j["landmark_indices"] = proj.landmarks.indices;
  j["gram_s"] = matrix_to_json(proj.landmarks.gram_s.values);
  if (const auto* g = std::get_if<KgrpProjection>(&proj.coef)) {
    j["variant"] = "kgrp";
    j["coef"] = matrix_to_json(g->coef);
    j["t"] = g->t;
  } else if (const auto* o = std::get_if<KorpProjection>(&proj.coef)) {
    j["variant"] = "korp";
    j["rinv"] = matrix_to_json(o->rinv);
  } else {
    const auto& pc = std::get<KpcaRpProjection>(proj.coef);
    j["variant"] = "kpca_rp";
    j["alpha"] = matrix_to_json(pc.alpha);
    j["eigvals"] = std::vector<double>(pc.eigvals.data(),
                                       pc.eigvals.data() + pc.eigvals.size());
    j["col_means"] = std::vector<double>(pc.col_means.data(),
                                         pc.col_means.data() + pc.col_means.size());
    j["grand_mean"] = pc.grand_mean;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump() << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

Projector load_projector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("projector file: ") + e.what());
  }
  if (j.value("format", "") != "mrpc-projector" || j.value("version", 0) != 1)
    throw SchemaError("not an mrpc-projector v1 file");
  Projector proj;
  proj.landmarks.indices = j.at("landmark_indices").get<std::vector<int>>();
  KernelSpec spec;
  spec.family = kernel_family_from_string(j.at("kernel").at("family").get<std::string>());
  spec.beta = j.at("kernel").at("beta").get<double>();
  proj.landmarks.gram_s = {matrix_from_json(j.at("gram_s")), spec};
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "kgrp") {
    proj.coef = KgrpProjection{matrix_from_json(j.at("coef")), j.at("t").get<int>()};
  } else if (variant == "korp") {
    proj.coef = KorpProjection{matrix_from_json(j.at("rinv"))};
  } else if (variant == "kpca_rp") {
    KpcaRpProjection pc;
    pc.alpha = matrix_from_json(j.at("alpha"));
    const auto eig = j.at("eigvals").get<std::vector<double>>();
    const auto means = j.at("col_means").get<std::vector<double>>();
    pc.eigvals = Eigen::Map<const Eigen::VectorXd>(eig.data(), eig.size());
    pc.col_means = Eigen::Map<const Eigen::VectorXd>(means.data(), means.size());
    pc.grand_mean = j.at("grand_mean").get<double>();
    proj.coef = std::move(pc);
  } else {
    throw SchemaError("unknown projector variant '" + variant + "'");
  }
  return proj;
}

}  // namespace mrpc
