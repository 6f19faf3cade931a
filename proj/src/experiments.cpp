#include "plateshape/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "plateshape/atlas.hpp"
#include "plateshape/fem.hpp"
#include "plateshape/maps.hpp"
#include "plateshape/mesh.hpp"
#include "plateshape/oracles.hpp"
#include "plateshape/shape.hpp"
#include "plateshape/types.hpp"

namespace plateshape {
namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string hex64(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(path).parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

// Strict flat-object reader: every key must be consumed by the driver, every
// value must be a scalar. Lists travel as comma-separated number strings.
class ConfigReader {
 public:
  explicit ConfigReader(const json& j) : j_(j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a flat JSON object");
    for (const auto& item : j.items())
      if (item.value().is_object() || item.value().is_array())
        throw std::invalid_argument("config: key '" + item.key() +
                                    "' is not a scalar (flat configs only)");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double num(const std::string& key) {
    require(key);
    return as_number(key);
  }
  double num(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(key);
  }
  int integer(const std::string& key) {
    const double v = num(key);
    return checked_int(key, v);
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    return checked_int(key, as_number(key));
  }
  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    used_.insert(key);
    const json& v = j_.at(key);
    if (!v.is_boolean())
      throw std::invalid_argument("config: key '" + key + "' must be true/false");
    return v.get<bool>();
  }
  std::string str(const std::string& key) {
    require(key);
    return as_string(key);
  }
  std::string str(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return as_string(key);
  }
  // comma-separated numbers
  std::vector<double> list(const std::string& key, const std::string& fallback) {
    const std::string text = has(key) ? as_string(key) : fallback;
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
        if (pos != item.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' holds a non-number '" +
                                    item + "'");
      }
    }
    if (out.empty())
      throw std::invalid_argument("config: key '" + key + "' lists no values");
    return out;
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key()))
        throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }

 private:
  void require(const std::string& key) {
    if (!has(key)) throw std::invalid_argument("config: missing key '" + key + "'");
  }
  double as_number(const std::string& key) {
    used_.insert(key);
    const json& v = j_.at(key);
    if (!v.is_number())
      throw std::invalid_argument("config: key '" + key + "' must be a number");
    return v.get<double>();
  }
  std::string as_string(const std::string& key) {
    used_.insert(key);
    const json& v = j_.at(key);
    if (!v.is_string())
      throw std::invalid_argument("config: key '" + key + "' must be a string");
    return v.get<std::string>();
  }
  int checked_int(const std::string& key, double v) {
    if (v != std::floor(v) || std::abs(v) > 1e9)
      throw std::invalid_argument("config: key '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  const json& j_;
  std::set<std::string> used_;
};

struct Ctx {
  json cfg;
  std::string out_dir;
  std::uint64_t seed = 0;
};

std::string standard_header(const Ctx& ctx, const std::string& tests_tag) {
  const std::string dump = ctx.cfg.dump();  // json objects iterate sorted by key
  const std::uint64_t h = fnv1a64(dump + "|seed=" + std::to_string(ctx.seed));
  std::string out;
  out += "# config: " + dump + "\n";
  out += "# inputs-hash: " + hex64(h) + "\n";
  out += "# tests: " + tests_tag + "\n";
  return out;
}

std::string material_header(const MaterialParams& p) {
  return "# material: t=" + fmt(p.t) + " lambda=" + fmt(p.lambda) +
         " mu=" + fmt(p.mu) + " k=" + fmt(p.k) + "\n";
}

std::string mesh_header(const Mesh& mesh) {
  return "# mesh: " + hex64(mesh_hash(mesh)) + " nodes=" +
         std::to_string(mesh.node_count()) + " triangles=" +
         std::to_string(mesh.triangle_count()) + "\n";
}

Mesh mesh_from_config(ConfigReader& r) {
  const std::string d = r.str("domain", "disk");
  if (d == "disk")
    return generate_disk(r.num("radius", 1.0), r.integer("refine", 3));
  if (d == "square" || d == "rectangle") {
    const double w = r.num("width", 1.0);
    const double h = r.num("height", 1.0);
    const int nx = r.integer("nx", 16);
    const int ny = r.integer("ny", nx);
    return generate_rectangle(w, h, nx, ny);
  }
  throw std::invalid_argument("config: unknown domain '" + d + "'");
}

MaterialParams material_from_config(ConfigReader& r) {
  MaterialParams p;
  if (r.has("young") || r.has("poisson")) {
    p = material_from_engineering(r.num("young"), r.num("poisson"),
                                  r.num("t", 0.1), r.num("k", 5.0 / 6.0));
  } else {
    p.t = r.num("t", 0.1);
    p.lambda = r.num("lambda", 1.0);
    p.mu = r.num("mu", 1.0);
    p.k = r.num("k", 5.0 / 6.0);
  }
  validate_material(p);
  return p;
}

PerturbationField field_from_tag(const std::string& tag, double bump_width,
                                 double bump_amp) {
  if (tag == "position") return field_position();
  if (tag == "elliptical") return field_elliptical();
  if (tag == "sine") return field_sine();
  if (tag == "radial-bump") return field_radial_bump(bump_width, bump_amp);
  throw std::invalid_argument("config: unknown perturbation field '" + tag + "'");
}

std::vector<std::string> split_tags(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("config: empty field list");
  return out;
}

void require_descending(const std::vector<double>& values, const std::string& key) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0))
      throw std::invalid_argument("config: '" + key + "' values must be positive");
    if (i > 0 && !(values[i] < values[i - 1]))
      throw std::invalid_argument("config: '" + key + "' values must be descending");
  }
}

std::string out_path(const Ctx& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

double rel_err_against(double value, double reference, double scale) {
  return std::abs(value - reference) / std::max(std::abs(scale), 1e-300);
}

/* --------------------------------------------------------------- drivers */

std::vector<std::string> run_spectrum(const Ctx& ctx) {
  ConfigReader r(ctx.cfg);
  Mesh mesh = mesh_from_config(r);
  const MaterialParams params = material_from_config(r);
  const int count = r.integer("count", 6);
  const bool reduced = r.flag("reduced", false);
  const double tol = r.num("tol", 1e-9);
  r.finish();

  const auto space = make_space(std::make_shared<Mesh>(std::move(mesh)));
  const auto forms = assemble_forms(space, params, reduced);
  const Spectrum spec = solve_smallest(forms, count, tol);

  std::string body = standard_header(ctx, "clamped plate eigenvalues with residuals");
  body += material_header(params);
  body += mesh_header(*space.mesh);
  body += "n,gamma,residual\n";
  for (int n = 0; n < spec.values.size(); ++n)
    body += std::to_string(n + 1) + "," + fmt(spec.values[n]) + "," +
            fmt(spec.residuals[n]) + "\n";
  const std::string path = out_path(ctx, "spectrum.csv");
  write_atomic(path, body);
  return {path};
}

std::vector<std::string> run_stability(const Ctx& ctx) {
  ConfigReader r(ctx.cfg);
  Mesh base = mesh_from_config(r);
  const MaterialParams params = material_from_config(r);
  const int count = r.integer("count", 5);
  const double tol = r.num("tol", 1e-9);
  const std::string family = r.str("family", "dilation");
  const auto amps = r.list("amps", "0.08,0.04,0.02,0.01");
  require_descending(amps, "amps");
  r.finish();

  auto make_map = [&family](double a) {
    if (family == "dilation") return map_dilation(a);
    if (family == "shear") return map_shear(a);
    if (family == "elliptical") return map_elliptical(a);
    throw std::invalid_argument("config: unknown map family '" + family + "'");
  };

  const auto space = make_space(std::make_shared<Mesh>(std::move(base)));
  const Spectrum ref = solve_smallest(assemble_forms(space, params), count, tol);

  std::string body =
      standard_header(ctx, "eigenvalue stability under diffeomorphisms, ratio "
                           "|delta gamma| / (gamma delta(phi))");
  body += material_header(params);
  body += mesh_header(*space.mesh);
  body += "family,amp,delta,n,gamma_base,gamma_mapped,abs_diff,ratio\n";
  for (double a : amps) {
    const ParametricMap map = make_map(a);
    const double delta =
        delta_measure(map, grid_samples(Vec2(-2.0, -2.0), Vec2(2.0, 2.0), 9));
    const auto mapped_space =
        make_space(std::make_shared<Mesh>(map_mesh(*space.mesh, map)));
    const Spectrum got =
        solve_smallest(assemble_forms(mapped_space, params), count, tol);
    for (int n = 0; n < count; ++n) {
      const double diff = std::abs(got.values[n] - ref.values[n]);
      body += family + "," + fmt(a) + "," + fmt(delta) + "," +
              std::to_string(n + 1) + "," + fmt(ref.values[n]) + "," +
              fmt(got.values[n]) + "," + fmt(diff) + "," +
              fmt(diff / (ref.values[n] * delta)) + "\n";
    }
  }
  const std::string path = out_path(ctx, "stability.csv");
  write_atomic(path, body);
  return {path};
}

std::vector<std::string> run_atlas_stability(const Ctx& ctx) {
  ConfigReader r(ctx.cfg);
  const double width = r.num("width", 1.0);
  const double h0 = r.num("h0", 0.7);
  const double rho = r.num("rho", 0.1);
  const int nx = r.integer("nx", 32);
  const int count = r.integer("count", 5);
  const double tol = r.num("tol", 1e-9);
  const MaterialParams params = material_from_config(r);
  // sine amplitudes; the corner charts see a 45-degree-inflated deviation,
  // so amp = target_distance / sqrt(2) lands the atlas distance on target
  const auto amps = r.list(
      "amps", "0.028284271247461904,0.014142135623730952,0.007071067811865476");
  require_descending(amps, "amps");
  r.finish();

  auto atlas = std::make_shared<const Atlas>(make_box_atlas(width, h0, rho));
  const AtlasDomain base =
      make_box_domain(atlas, [h0](double) { return h0; });
  {
    const DomainReport rep = validate_domain(base);
    if (!rep.ok)
      throw NumericalError("atlas-stability: base domain failed validation: " +
                           rep.issues.front());
  }
  const Mesh base_mesh = domain_to_mesh(base, nx);
  const auto base_space = make_space(std::make_shared<Mesh>(base_mesh));
  const Spectrum ref = solve_smallest(assemble_forms(base_space, params), count, tol);

  std::string body = standard_header(
      ctx, "eigenvalue stability in atlas distance, ratio "
           "|delta gamma| / (max gamma * d_atlas)");
  body += material_header(params);
  body += mesh_header(base_mesh);
  body += "amp,d_atlas,n,gamma_base,gamma_perturbed,abs_diff,ratio\n";
  const double pi = std::acos(-1.0);
  for (double amp : amps) {
    const AtlasDomain pert = make_box_domain(
        atlas, [h0, amp, pi](double x) { return h0 + amp * std::sin(2.0 * pi * x); });
    const double d_atlas = atlas_distance(base, pert);
    const Mesh mesh = domain_to_mesh(pert, nx);
    const auto space = make_space(std::make_shared<Mesh>(mesh));
    const Spectrum got = solve_smallest(assemble_forms(space, params), count, tol);
    for (int n = 0; n < count; ++n) {
      const double diff = std::abs(got.values[n] - ref.values[n]);
      const double scale = std::max(ref.values[n], got.values[n]) * d_atlas;
      body += fmt(amp) + "," + fmt(d_atlas) + "," + std::to_string(n + 1) + "," +
              fmt(ref.values[n]) + "," + fmt(got.values[n]) + "," + fmt(diff) +
              "," + fmt(diff / scale) + "\n";
    }
  }
  const std::string path = out_path(ctx, "atlas_stability.csv");
  write_atomic(path, body);
  return {path};
}

std::vector<std::string> run_hadamard(const Ctx& ctx) {
  ConfigReader r(ctx.cfg);
  Mesh mesh = mesh_from_config(r);
  const MaterialParams params = material_from_config(r);
  const int index = r.integer("index", 0);
  const double fd_eps = r.num("fd_eps", 1e-3);
  const double tol = r.num("tol", 1e-9);
  const double bump_width = r.num("bump_width", 0.6);
  const double bump_amp = r.num("bump_amp", 1.0);
  const auto tags = split_tags(r.str("fields", "position,radial-bump"));
  r.finish();
  if (index < 0) throw std::invalid_argument("config: 'index' must be >= 0");

  const auto space = make_space(std::make_shared<Mesh>(std::move(mesh)));
  const auto forms = assemble_forms(space, params);
  const Spectrum spec = solve_smallest(forms, std::max(index + 2, 2), tol);
  const BoundaryTrace trace = boundary_trace(*space.mesh);

  FdOptions opts;
  opts.eps = fd_eps;
  opts.solver_tol = tol;

  std::string body = standard_header(
      ctx, "boundary-integral shape derivative of a simple eigenvalue vs "
           "central finite differences");
  body += material_header(params);
  body += mesh_header(*space.mesh);
  body += "quantity,n_or_F,s,psi_tag,value,fd_value,rel_err\n";
  for (const std::string& tag : tags) {
    const PerturbationField field = field_from_tag(tag, bump_width, bump_amp);
    const double value =
        hadamard_derivative(space, params, spec, index, field, trace);
    const double fd = eigen_fd_derivative(*space.mesh, params, index, field, opts);
    body += "dgamma," + std::to_string(index + 1) + ",0," + field.tag + "," +
            fmt(value) + "," + fmt(fd) + "," + fmt(rel_err_against(value, fd, fd)) +
            "\n";
  }
  const std::string path = out_path(ctx, "hadamard.csv");
  write_atomic(path, body);
  return {path};
}

EigenCluster cluster_from_range(const Spectrum& spec, int first, int size) {
  if (first < 0 || size < 1 || first + size > spec.values.size())
    throw std::invalid_argument("config: cluster range outside the computed spectrum");
  EigenCluster c;
  c.first = first;
  c.size = size;
  const auto seg = spec.values.segment(first, size);
  c.gamma = seg.mean();
  c.spread = (seg.maxCoeff() - seg.minCoeff()) / std::abs(c.gamma);
  return c;
}

std::string cluster_label(const EigenCluster& c) {
  return "F" + std::to_string(c.first + 1) + "-" +
         std::to_string(c.first + c.size);
}

std::vector<std::string> run_gamma_deriv(const Ctx& ctx) {
  ConfigReader r(ctx.cfg);
  Mesh mesh = mesh_from_config(r);
  const MaterialParams params = material_from_config(r);
  const int first = r.integer("first", 1);
  const int size = r.integer("size", 2);
  const double fd_eps = r.num("fd_eps", 1e-3);
  const double tol = r.num("tol", 1e-9);
  const double bump_width = r.num("bump_width", 0.6);
  const double bump_amp = r.num("bump_amp", 1.0);
  const auto s_values = r.list("s_values", "1,2");
  const std::string tag = r.str("field", "elliptical");
  r.finish();

  const auto space = make_space(std::make_shared<Mesh>(std::move(mesh)));
  const auto forms = assemble_forms(space, params);
  const Spectrum spec = solve_smallest(forms, first + size + 2, tol);
  const EigenCluster cluster = cluster_from_range(spec, first, size);
  const BoundaryTrace trace = boundary_trace(*space.mesh);
  const PerturbationField field = field_from_tag(tag, bump_width, bump_amp);

  FdOptions opts;
  opts.eps = fd_eps;
  opts.solver_tol = tol;

  std::string body = standard_header(
      ctx, "derivatives of elementary symmetric functions of a cluster vs "
           "central finite differences");
  body += material_header(params);
  body += mesh_header(*space.mesh);
  body += "quantity,n_or_F,s,psi_tag,value,fd_value,rel_err\n";
  for (double s_raw : s_values) {
    const int s = static_cast<int>(s_raw);
    if (s != s_raw || s < 1 || s > cluster.size)
      throw std::invalid_argument("config: 's_values' entries must be 1..cluster size");
    const double value =
        symmetric_function_derivative(space, params, spec, cluster, s, field, trace);
    const double fd =
        fd_symmetric_function_derivative(*space.mesh, params, cluster, s, field, opts);
    body += "dF," + cluster_label(cluster) + "," + std::to_string(s) + "," +
            field.tag + "," + fmt(value) + "," + fmt(fd) + "," +
            fmt(rel_err_against(value, fd, fd)) + "\n";
  }
  const std::string path = out_path(ctx, "gamma_deriv.csv");
  write_atomic(path, body);
  return {path};
}

std::vector<std::string> run_splitting(const Ctx& ctx) {
  ConfigReader r(ctx.cfg);
  Mesh mesh = mesh_from_config(r);
  const MaterialParams params = material_from_config(r);
  const int first = r.integer("first", 1);
  const int size = r.integer("size", 2);
  const double fd_eps = r.num("fd_eps", 1e-3);
  const double tol = r.num("tol", 1e-9);
  const double bump_width = r.num("bump_width", 0.6);
  const double bump_amp = r.num("bump_amp", 1.0);
  const std::string tag = r.str("field", "elliptical");
  r.finish();

  const auto space = make_space(std::make_shared<Mesh>(std::move(mesh)));
  const auto forms = assemble_forms(space, params);
  const Spectrum spec = solve_smallest(forms, first + size + 2, tol);
  const EigenCluster cluster = cluster_from_range(spec, first, size);
  const BoundaryTrace trace = boundary_trace(*space.mesh);
  const PerturbationField field = field_from_tag(tag, bump_width, bump_amp);

  const MatX D = splitting_matrix(space, params, spec, cluster, field, trace);
  Eigen::SelfAdjointEigenSolver<MatX> es(D);
  if (es.info() != Eigen::Success)
    throw NumericalError("splitting: dense eigensolve on the interaction matrix failed");
  const VecX predicted = es.eigenvalues();

  FdOptions opts;
  opts.eps = fd_eps;
  opts.solver_tol = tol;
  const VecX slopes = fd_branch_slopes(*space.mesh, params, cluster, field, opts);

  const double branch_scale = slopes.cwiseAbs().maxCoeff();
  std::string body = standard_header(
      ctx, "first-order eigenvalue splitting of a degenerate cluster: "
           "interaction-matrix eigenvalues vs branch-matched finite differences");
  body += material_header(params);
  body += mesh_header(*space.mesh);
  body += "quantity,n_or_F,s,psi_tag,value,fd_value,rel_err\n";
  for (int k = 0; k < cluster.size; ++k)
    body += "branch-slope," + cluster_label(cluster) + "," + std::to_string(k + 1) +
            "," + field.tag + "," + fmt(predicted[k]) + "," + fmt(slopes[k]) +
            "," + fmt(rel_err_against(predicted[k], slopes[k], branch_scale)) + "\n";
  const double tr = D.trace();
  const double fd_sum = slopes.sum();
  const double trace_scale =
      std::max(std::abs(fd_sum), predicted.cwiseAbs().maxCoeff());
  body += "trace," + cluster_label(cluster) + ",0," + field.tag + "," + fmt(tr) +
          "," + fmt(fd_sum) + "," + fmt(rel_err_against(tr, fd_sum, trace_scale)) +
          "\n";
  const std::string path = out_path(ctx, "splitting.csv");
  write_atomic(path, body);
  return {path};
}

std::vector<std::string> run_ball_criticality(const Ctx& ctx) {
  ConfigReader r(ctx.cfg);
  Mesh mesh = mesh_from_config(r);
  const MaterialParams params = material_from_config(r);
  const int count = r.integer("count", 6);
  const double tol = r.num("tol", 1e-9);
  const double cluster_tol = r.num("cluster_tol", 1e-3);
  r.finish();

  const auto space = make_space(std::make_shared<Mesh>(std::move(mesh)));
  const auto forms = assemble_forms(space, params);
  const Spectrum spec = solve_smallest(forms, count, tol);
  const BoundaryTrace trace = boundary_trace(*space.mesh);
  const auto clusters = cluster_eigenvalues(spec.values, cluster_tol);

  std::vector<std::string> files;
  std::string summary = standard_header(
      ctx, "volume-constrained criticality: flatness of the boundary "
           "eigen-density profile, cluster by cluster");
  summary += material_header(params);
  summary += mesh_header(*space.mesh);
  summary += "cluster,first,size,gamma,cv\n";
  for (size_t c = 0; c < clusters.size(); ++c) {
    const BoundaryProfile profile = criticality_profile(
        space, params, spec, clusters[c], trace, ctx.seed == 0 ? 7 : ctx.seed);
    summary += std::to_string(c + 1) + "," + std::to_string(clusters[c].first + 1) +
               "," + std::to_string(clusters[c].size) + "," +
               fmt(clusters[c].gamma) + "," + fmt(profile.cv) + "\n";
    std::string body = standard_header(
        ctx, "boundary criticality profile of cluster " + std::to_string(c + 1));
    body += material_header(params);
    body += mesh_header(*space.mesh);
    body += "arclength,value\n";
    for (int i = 0; i < profile.values.size(); ++i)
      body += fmt(profile.arclength[i]) + "," + fmt(profile.values[i]) + "\n";
    const std::string path =
        out_path(ctx, "profile_" + std::to_string(c + 1) + ".csv");
    write_atomic(path, body);
    files.push_back(path);
  }
  const std::string path = out_path(ctx, "criticality.csv");
  write_atomic(path, summary);
  files.insert(files.begin(), path);
  return files;
}

std::vector<std::string> run_biharmonic_limit(const Ctx& ctx) {
  ConfigReader r(ctx.cfg);
  const double radius = r.num("radius", 1.0);
  const int refine = r.integer("refine", 4);
  const double lambda = r.num("lambda", 1.0);
  const double mu = r.num("mu", 1.0);
  const double k = r.num("k", 5.0 / 6.0);
  const bool reduced = r.flag("reduced", true);
  const double tol = r.num("tol", 1e-9);
  const auto ts = r.list("ts", "0.2,0.1,0.05");
  require_descending(ts, "ts");
  r.finish();

  const double oracle = clamped_plate_disk_spectrum(radius, mu, lambda, 1).front();
  const Mesh mesh = generate_disk(radius, refine);
  const auto space = make_space(std::make_shared<Mesh>(mesh));

  std::string body = standard_header(
      ctx, "thin-plate limit: smallest eigenvalue vs the clamped biharmonic "
           "disk value from the Bessel characteristic roots");
  body += "# oracle: gamma0=" + fmt(oracle) + "\n";
  body += mesh_header(mesh);
  body += "t,gamma,oracle,rel_gap\n";
  for (double t : ts) {
    MaterialParams params;
    params.t = t;
    params.lambda = lambda;
    params.mu = mu;
    params.k = k;
    const auto forms = assemble_forms(space, params, reduced);
    const Spectrum spec = solve_smallest(forms, 1, tol);
    const double gamma = spec.values[0];
    body += fmt(t) + "," + fmt(gamma) + "," + fmt(oracle) + "," +
            fmt((oracle - gamma) / oracle) + "\n";
  }
  const std::string path = out_path(ctx, "biharmonic_limit.csv");
  write_atomic(path, body);
  return {path};
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "spectrum",       "stability", "atlas-stability",  "hadamard",
      "gamma-deriv",    "splitting", "ball-criticality", "biharmonic-limit"};
  return names;
}

std::vector<std::string> run_experiment(const std::string& name,
                                        const std::string& config_text,
                                        const std::string& out_dir,
                                        std::uint64_t seed) {
  json cfg;
  try {
    cfg = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse failure: ") + e.what());
  }
  Ctx ctx{std::move(cfg), out_dir, seed};
  if (name == "spectrum") return run_spectrum(ctx);
  if (name == "stability") return run_stability(ctx);
  if (name == "atlas-stability") return run_atlas_stability(ctx);
  if (name == "hadamard") return run_hadamard(ctx);
  if (name == "gamma-deriv") return run_gamma_deriv(ctx);
  if (name == "splitting") return run_splitting(ctx);
  if (name == "ball-criticality") return run_ball_criticality(ctx);
  if (name == "biharmonic-limit") return run_biharmonic_limit(ctx);
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

}  // namespace plateshape
