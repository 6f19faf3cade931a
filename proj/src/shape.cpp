#include "plateshape/shape.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

namespace plateshape {

namespace {

Vec2 newton_preimage(const ParametricMap& map, const Vec2& target, Vec2 x) {
  const double tol = 1e-13 * (1.0 + target.norm());
  for (int it = 0; it < 50; ++it) {
    const Vec2 r = map.value(x) - target;
    if (r.norm() <= tol) return x;
    const Mat2 J = map.jacobian(x);
    const double det = J.determinant();
    if (std::abs(det) < 1e-14)
      throw DegenerateMapError("push_forward: singular jacobian in preimage iteration");
    x -= J.inverse() * r;
  }
  throw DegenerateMapError("push_forward: preimage iteration did not converge");
}

double min_barycentric(const Mesh& mesh, int ti, const Vec2& x) {
  const auto& t = mesh.triangles[static_cast<size_t>(ti)];
  const Vec2 p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]], p2 = mesh.nodes[t[2]];
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                     (p2.x() - p0.x()) * (p1.y() - p0.y());
  const double l1 =
      ((x.x() - p0.x()) * (p2.y() - p0.y()) - (x.y() - p0.y()) * (p2.x() - p0.x())) / det;
  const double l2 =
      ((x.y() - p0.y()) * (p1.x() - p0.x()) - (x.x() - p0.x()) * (p1.y() - p0.y())) / det;
  return std::min({l1, l2, 1.0 - l1 - l2});
}

// Best triangle containing x, preferring the ones adjacent to edge e.
int locate_point(const FeSpace& sp, int edge, const Vec2& x) {
  int best = -1;
  double best_m = -std::numeric_limits<double>::infinity();
  for (int ti : sp.edge_tris[static_cast<size_t>(edge)]) {
    if (ti < 0) continue;
    const double m = min_barycentric(*sp.mesh, ti, x);
    if (m > best_m) {
      best_m = m;
      best = ti;
    }
  }
  if (best_m >= -1e-6) return best;
  for (int ti = 0; ti < sp.mesh->triangle_count(); ++ti) {
    const double m = min_barycentric(*sp.mesh, ti, x);
    if (m > best_m) {
      best_m = m;
      best = ti;
    }
  }
  return best;
}

// Per-sample boundary integrand for a pair of modes. The diagonal (i = i)
// version is the Hadamard density; off-diagonal entries couple the branches
// of a degenerate cluster.
VecX pair_density(const MaterialParams& p, const BoundaryTrace& trace,
                  const NormalDerivatives& a, const NormalDerivatives& b) {
  const double c_grad = p.mu / 12.0;
  const double c_div = (p.mu + p.lambda) / 12.0;
  const double c_shear = p.mu * p.k / (p.t * p.t);
  VecX d(trace.size());
  for (int s = 0; s < trace.size(); ++s) {
    d[s] = c_grad * a.dbeta_dn[static_cast<size_t>(s)].dot(
                        b.dbeta_dn[static_cast<size_t>(s)]) +
           c_div * a.dbeta_dn_dot_n[s] * b.dbeta_dn_dot_n[s] +
           c_shear * a.dw_dn[s] * b.dw_dn[s];
  }
  return d;
}

VecX normal_component(const PerturbationField& field, const BoundaryTrace& trace) {
  VecX zn(trace.size());
  for (int s = 0; s < trace.size(); ++s)
    zn[s] = field.value(trace.points[static_cast<size_t>(s)])
                .dot(trace.normals[static_cast<size_t>(s)]);
  return zn;
}

void check_cluster(const Spectrum& spec, const EigenCluster& cluster) {
  if (cluster.first < 0 || cluster.size < 1 ||
      cluster.first + cluster.size > spec.values.size())
    throw InvalidClusterError("cluster indices fall outside the computed spectrum");
  const auto seg = spec.values.segment(cluster.first, cluster.size);
  const double mean = seg.mean();
  const double spread = (seg.maxCoeff() - seg.minCoeff()) / std::abs(mean);
  if (spread > 1e-2)
    throw InvalidClusterError(
        "requested indices are not a tight eigenvalue cluster (spread " +
        std::to_string(spread) + ")");
  if (std::abs(cluster.gamma - mean) > 1e-6 * std::abs(mean))
    throw InvalidClusterError("cluster record is stale for this spectrum");
}

std::vector<NormalDerivatives> cluster_normal_data(const FeSpace& space,
                                                   const Spectrum& spec,
                                                   const EigenCluster& cluster,
                                                   const BoundaryTrace& trace) {
  std::vector<NormalDerivatives> nd;
  nd.reserve(static_cast<size_t>(cluster.size));
  for (int l = 0; l < cluster.size; ++l)
    nd.push_back(boundary_normal_derivatives(
        space, spec.vectors.col(cluster.first + l), trace));
  return nd;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

struct FamilySolve {
  VecX base, plus, minus;
};

FamilySolve fd_family(const Mesh& mesh, const MaterialParams& params,
                      const PerturbationField& field, const FdOptions& opts,
                      int count) {
  auto solve_one = [&](const Mesh& m) {
    auto ptr = std::make_shared<Mesh>(m);
    const FeSpace sp = make_space(ptr);
    const int c = std::min(count, sp.dof_count());
    return solve_smallest(assemble_forms(sp, params, opts.reduced_shear), c,
                          opts.solver_tol)
        .values;
  };
  FamilySolve out;
  out.base = solve_one(mesh);
  out.plus = solve_one(map_mesh(mesh, map_from_field(field, opts.eps)));
  out.minus = solve_one(map_mesh(mesh, map_from_field(field, -opts.eps)));
  return out;
}

// Rejects steps large enough to shuffle the cluster against its neighbors:
// every tracked value must move by less than a third of the bracketing gap.
void crossing_guard(const FamilySolve& s, int first, int size) {
  const int n = static_cast<int>(s.base.size());
  double gap = std::numeric_limits<double>::infinity();
  if (first > 0) gap = std::min(gap, s.base[first] - s.base[first - 1]);
  if (first + size < n)
    gap = std::min(gap, s.base[first + size] - s.base[first + size - 1]);
  double shift = 0.0;
  for (int i = std::max(0, first - 1); i < std::min(n, first + size + 1); ++i)
    shift = std::max({shift, std::abs(s.plus[i] - s.base[i]),
                      std::abs(s.minus[i] - s.base[i])});
  if (!(3.0 * shift < gap)) {
    std::ostringstream msg;
    msg << "finite-difference step moves eigenvalues by " << shift
        << " against a bracketing gap of " << gap
        << "; branches cannot be matched reliably";
    throw BranchAmbiguityError(msg.str());
  }
}

}  // namespace

VecX push_forward(const FeSpace& src, const VecX& coeffs, const ParametricMap& map,
                  const FeSpace& dst) {
  if (coeffs.size() != src.dof_count())
    throw std::invalid_argument("push_forward: coefficient size mismatch");
  if (src.mesh->triangles != dst.mesh->triangles ||
      src.n_interior != dst.n_interior)
    throw std::invalid_argument(
        "push_forward: target space does not share the source connectivity");

  const int nv = src.mesh->node_count();
  std::vector<int> vertex_tri(static_cast<size_t>(nv), -1);
  for (int ti = 0; ti < src.mesh->triangle_count(); ++ti)
    for (int v : src.mesh->triangles[static_cast<size_t>(ti)])
      vertex_tri[static_cast<size_t>(v)] = ti;

  const int n = dst.n_interior;
  VecX out = VecX::Zero(3 * n);
  for (int d : dst.interior_dofs) {
    Vec2 x_hat;
    int tri;
    if (d < nv) {
      x_hat = src.mesh->nodes[static_cast<size_t>(d)];
      tri = vertex_tri[static_cast<size_t>(d)];
    } else {
      const int e = d - nv;
      const auto& en = dst.edges[static_cast<size_t>(e)];
      const Vec2 target =
          0.5 * (dst.mesh->nodes[en[0]] + dst.mesh->nodes[en[1]]);
      const Vec2 start =
          0.5 * (src.mesh->nodes[en[0]] + src.mesh->nodes[en[1]]);
      x_hat = newton_preimage(map, target, start);
      tri = locate_point(src, e, x_hat);
    }
    const FieldSample f = sample_fields(src, coeffs, tri, x_hat);
    const Mat2 J = map.jacobian(x_hat);
    if (std::abs(J.determinant()) < 1e-14)
      throw DegenerateMapError("push_forward: singular jacobian at a node preimage");
    const Vec2 beta_hat = J.inverse().transpose() * f.beta;
    const int k = dst.interior_index[static_cast<size_t>(d)];
    out[k] = beta_hat.x();
    out[n + k] = beta_hat.y();
    out[2 * n + k] = f.w;
  }
  return out;
}

double form_comparison_ratio(const FeSpace& src, const MaterialParams& params,
                             const VecX& coeffs, const ParametricMap& map,
                             const std::vector<Vec2>& delta_samples) {
  const double delta = delta_measure(map, delta_samples);
  if (!(delta > 0.0))
    throw UndefinedRatioError(
        "form_comparison_ratio: map '" + map.family +
        "' has zero C^2 deviation, the normalized ratio is undefined");

  const AssembledForms f1 = assemble_forms(src, params);
  const double q1 = coeffs.dot(f1.Q * coeffs);
  if (!(std::abs(q1) > 0.0))
    throw std::invalid_argument("form_comparison_ratio: zero-energy field");

  auto mapped = std::make_shared<Mesh>(map_mesh(*src.mesh, map));
  const FeSpace dst = make_space(mapped);
  const VecX chat = push_forward(src, coeffs, map, dst);
  const AssembledForms f2 = assemble_forms(dst, params);
  const double q2 = chat.dot(f2.Q * chat);
  return std::abs(q2 - q1) / (std::abs(q1) * delta);
}

double hadamard_derivative(const FeSpace& space, const MaterialParams& params,
                           const Spectrum& spec, int idx,
                           const PerturbationField& field,
                           const BoundaryTrace& trace, double cluster_tol) {
  if (idx < 0 || idx >= spec.values.size())
    throw std::invalid_argument("hadamard_derivative: index out of range");
  for (const auto& c : cluster_eigenvalues(spec.values, cluster_tol))
    if (idx >= c.first && idx < c.first + c.size && c.size > 1)
      throw NotSimpleError(
          "hadamard_derivative: eigenvalue " + std::to_string(idx) +
          " is degenerate within tolerance; use the splitting matrix or "
          "symmetric functions of the cluster");

  const NormalDerivatives nd =
      boundary_normal_derivatives(space, spec.vectors.col(idx), trace);
  const VecX density = pair_density(params, trace, nd, nd);
  const VecX zn = normal_component(field, trace);
  return -(density.array() * zn.array() * trace.weights.array()).sum();
}

MatX splitting_matrix(const FeSpace& space, const MaterialParams& params,
                      const Spectrum& spec, const EigenCluster& cluster,
                      const PerturbationField& field, const BoundaryTrace& trace) {
  check_cluster(spec, cluster);
  const auto nd = cluster_normal_data(space, spec, cluster, trace);
  const VecX zn = normal_component(field, trace);
  MatX D(cluster.size, cluster.size);
  for (int i = 0; i < cluster.size; ++i)
    for (int j = i; j < cluster.size; ++j) {
      const VecX density = pair_density(params, trace, nd[static_cast<size_t>(i)],
                                        nd[static_cast<size_t>(j)]);
      const double v = -(density.array() * zn.array() * trace.weights.array()).sum();
      D(i, j) = v;
      D(j, i) = v;
    }
  return D;
}

double elementary_symmetric(const VecX& values, int s) {
  const int n = static_cast<int>(values.size());
  if (s < 0 || s > n)
    throw std::invalid_argument("elementary_symmetric: order out of range");
  VecX e = VecX::Zero(s + 1);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::min(s, i + 1); j >= 1; --j) e[j] += values[i] * e[j - 1];
  return e[s];
}

double symmetric_function_derivative(const FeSpace& space,
                                     const MaterialParams& params,
                                     const Spectrum& spec,
                                     const EigenCluster& cluster, int s,
                                     const PerturbationField& field,
                                     const BoundaryTrace& trace) {
  check_cluster(spec, cluster);
  if (s < 1 || s > cluster.size)
    throw std::invalid_argument(
        "symmetric_function_derivative: order must be in [1, cluster size]");
  const MatX D = splitting_matrix(space, params, spec, cluster, field, trace);
  const double mean = spec.values.segment(cluster.first, cluster.size).mean();
  return binom(cluster.size - 1, s - 1) * std::pow(mean, s - 1) * D.trace();
}

double volume_derivative(const PerturbationField& field, const BoundaryTrace& trace) {
  const VecX zn = normal_component(field, trace);
  return (zn.array() * trace.weights.array()).sum();
}

PerturbationField field_normal_extension(const BoundaryTrace& trace) {
  PerturbationField f;
  f.tag = "normal_extension";
  const auto points = trace.points;
  const auto normals = trace.normals;
  f.value = [points, normals](const Vec2& x) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < points.size(); ++i) {
      const double d = (points[i] - x).squaredNorm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return normals[best];
  };
  // Piecewise constant in nearest-sample cells; derivative zero a.e.
  f.jacobian = [](const Vec2&) { return Mat2(Mat2::Zero()); };
  f.hessians = [](const Vec2&) {
    return std::array<Mat2, 2>{Mat2::Zero(), Mat2::Zero()};
  };
  return f;
}

PerturbationField volume_preserving_project(const PerturbationField& field,
                                            const BoundaryTrace& trace) {
  const double perimeter = trace.weights.sum();
  const double c = volume_derivative(field, trace) / perimeter;
  PerturbationField g =
      field_sum(field, field_scaled(field_normal_extension(trace), -c));
  g.tag = field.tag + "|volume-projected";
  return g;
}

BoundaryProfile criticality_profile(const FeSpace& space,
                                    const MaterialParams& params,
                                    const Spectrum& spec,
                                    const EigenCluster& cluster,
                                    const BoundaryTrace& trace,
                                    std::uint64_t seed) {
  check_cluster(spec, cluster);

  auto profile_of = [&](const MatX& modes) {
    VecX p = VecX::Zero(trace.size());
    for (int l = 0; l < modes.cols(); ++l) {
      const NormalDerivatives nd =
          boundary_normal_derivatives(space, modes.col(l), trace);
      p += pair_density(params, trace, nd, nd);
    }
    return p;
  };

  const MatX modes = spec.vectors.middleCols(cluster.first, cluster.size);
  BoundaryProfile out;
  out.values = profile_of(modes);
  out.arclength = trace.arclength;

  if (cluster.size > 1) {
    // The summed profile must not depend on the orthonormal basis chosen
    // inside the cluster; re-check against a random rotation.
    const int m = cluster.size;
    const VecX raw = random_coefficients(m * m, seed);
    MatX A = Eigen::Map<const MatX>(raw.data(), m, m);
    Eigen::HouseholderQR<MatX> qr(A);
    MatX O = qr.householderQ() * MatX::Identity(m, m);
    const MatX R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j)
      if (R(j, j) < 0.0) O.col(j) *= -1.0;
    const VecX rotated = profile_of(modes * O);
    const double scale = out.values.cwiseAbs().maxCoeff();
    if ((rotated - out.values).cwiseAbs().maxCoeff() > 1e-8 * scale)
      throw NumericalError(
          "criticality_profile: profile is not invariant under a cluster "
          "basis rotation; the cluster is not numerically degenerate");
  }

  const double L = trace.weights.sum();
  out.mean = (out.values.array() * trace.weights.array()).sum() / L;
  const double var =
      ((out.values.array() - out.mean).square() * trace.weights.array()).sum() / L;
  out.cv = std::sqrt(std::max(var, 0.0)) / std::abs(out.mean);
  return out;
}

double eigen_fd_derivative(const Mesh& mesh, const MaterialParams& params,
                           int idx, const PerturbationField& field,
                           const FdOptions& opts) {
  if (idx < 0) throw std::invalid_argument("eigen_fd_derivative: bad index");
  const int count = idx + 2;
  const FamilySolve s = fd_family(mesh, params, field, opts, count);
  for (const auto& c : cluster_eigenvalues(s.base, opts.cluster_tol))
    if (idx >= c.first && idx < c.first + c.size && c.size > 1)
      throw BranchAmbiguityError(
          "eigen_fd_derivative: eigenvalue " + std::to_string(idx) +
          " is degenerate at the base shape; a single sorted index has no "
          "branch-stable derivative");
  crossing_guard(s, idx, 1);
  return (s.plus[idx] - s.minus[idx]) / (2.0 * opts.eps);
}

VecX fd_branch_slopes(const Mesh& mesh, const MaterialParams& params,
                      const EigenCluster& cluster, const PerturbationField& field,
                      const FdOptions& opts) {
  const int count = cluster.first + cluster.size + 1;
  const FamilySolve s = fd_family(mesh, params, field, opts, count);
  bool found = false;
  for (const auto& c : cluster_eigenvalues(s.base, opts.cluster_tol))
    found |= (c.first == cluster.first && c.size == cluster.size);
  if (!found)
    throw InvalidClusterError(
        "fd_branch_slopes: the requested indices do not form a cluster of the "
        "base spectrum");
  crossing_guard(s, cluster.first, cluster.size);

  // Branch matching: the common value at eps = 0 splits linearly, so the
  // ordering at -eps is the reverse of the ordering at +eps.
  VecX slopes(cluster.size);
  for (int k = 0; k < cluster.size; ++k)
    slopes[k] = (s.plus[cluster.first + k] -
                 s.minus[cluster.first + cluster.size - 1 - k]) /
                (2.0 * opts.eps);
  return slopes;
}

double fd_symmetric_function_derivative(const Mesh& mesh,
                                        const MaterialParams& params,
                                        const EigenCluster& cluster, int s,
                                        const PerturbationField& field,
                                        const FdOptions& opts) {
  if (s < 1 || s > cluster.size)
    throw std::invalid_argument(
        "fd_symmetric_function_derivative: order must be in [1, cluster size]");
  const int count = cluster.first + cluster.size + 1;
  const FamilySolve fs = fd_family(mesh, params, field, opts, count);
  crossing_guard(fs, cluster.first, cluster.size);
  const double ep =
      elementary_symmetric(fs.plus.segment(cluster.first, cluster.size), s);
  const double em =
      elementary_symmetric(fs.minus.segment(cluster.first, cluster.size), s);
  return (ep - em) / (2.0 * opts.eps);
}

}  // namespace plateshape
