#include "plateshape/fem.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace plateshape {

namespace {

constexpr int kDofCap = 50000;

struct QuadPoint {
  double l0, l1, l2, w;
};

// Degree-4 rule, exact for every product of P2 gradients and values.
const std::array<QuadPoint, 6> kRuleFull = {{
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980458, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980458, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980458, 0.109951743655322},
}};

// Degree-2 rule used for the shear term when reduced integration is on.
const std::array<QuadPoint, 3> kRuleReduced = {{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
}};

void shape_values(double l0, double l1, double l2, double N[6]) {
  N[0] = l0 * (2.0 * l0 - 1.0);
  N[1] = l1 * (2.0 * l1 - 1.0);
  N[2] = l2 * (2.0 * l2 - 1.0);
  N[3] = 4.0 * l0 * l1;
  N[4] = 4.0 * l1 * l2;
  N[5] = 4.0 * l2 * l0;
}

// Physical gradients given grad(l0), grad(l1), grad(l2).
void shape_gradients(double l0, double l1, double l2, const Vec2 gl[3],
                     Vec2 G[6]) {
  G[0] = (4.0 * l0 - 1.0) * gl[0];
  G[1] = (4.0 * l1 - 1.0) * gl[1];
  G[2] = (4.0 * l2 - 1.0) * gl[2];
  G[3] = 4.0 * (l1 * gl[0] + l0 * gl[1]);
  G[4] = 4.0 * (l2 * gl[1] + l1 * gl[2]);
  G[5] = 4.0 * (l0 * gl[2] + l2 * gl[0]);
}

// Barycentric gradients and area of one triangle.
double barycentric_gradients(const Mesh& mesh, const std::array<int, 3>& t,
                             Vec2 gl[3]) {
  const Vec2 p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]], p2 = mesh.nodes[t[2]];
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                     (p2.x() - p0.x()) * (p1.y() - p0.y());
  // grad l_i is the inward-scaled normal of the opposite edge.
  gl[0] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / det;
  gl[1] = Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / det;
  gl[2] = Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / det;
  return 0.5 * det;
}

// Local scalar dof -> global scalar dof for one triangle.
void local_scalar_dofs(const FeSpace& sp, int ti, int g[6]) {
  const auto& t = sp.mesh->triangles[static_cast<size_t>(ti)];
  const auto& e = sp.tri_edges[static_cast<size_t>(ti)];
  const int nv = sp.mesh->node_count();
  g[0] = t[0];
  g[1] = t[1];
  g[2] = t[2];
  g[3] = nv + e[0];
  g[4] = nv + e[1];
  g[5] = nv + e[2];
}

}  // namespace

MaterialParams material_from_engineering(double young, double poisson, double t,
                                         double k) {
  if (!(young > 0.0) || !(poisson >= 0.0) || !(poisson < 0.5))
    throw std::invalid_argument(
        "material_from_engineering: need E > 0 and 0 <= nu < 1/2");
  MaterialParams p;
  p.lambda = poisson * young / (1.0 - poisson * poisson);
  p.mu = young / (2.0 * (1.0 + poisson));
  p.t = t;
  p.k = k;
  validate_material(p);
  return p;
}

void validate_material(const MaterialParams& p) {
  if (!(p.t > 0.0) || !(p.mu > 0.0) || !(p.k > 0.0) || !(p.lambda >= 0.0))
    throw std::invalid_argument(
        "material: need t > 0, mu > 0, k > 0, lambda >= 0");
}

FeSpace make_space(std::shared_ptr<const Mesh> mesh) {
  if (!mesh) throw std::invalid_argument("make_space: null mesh");
  FeSpace sp;
  sp.mesh = mesh;
  sp.source_hash = mesh_hash(*mesh);
  const int nv = mesh->node_count();
  const int nt = mesh->triangle_count();

  // Unique edges in lexicographic order, so dof numbering is independent of
  // triangle ordering.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh->triangles)
    for (int k = 0; k < 3; ++k)
      edge_count[std::minmax(t[k], t[(k + 1) % 3])] += 1;

  std::map<std::pair<int, int>, int> edge_id;
  sp.edges.reserve(edge_count.size());
  for (const auto& [key, cnt] : edge_count) {
    edge_id[key] = static_cast<int>(sp.edges.size());
    sp.edges.push_back({key.first, key.second});
    (void)cnt;
  }

  sp.tri_edges.resize(static_cast<size_t>(nt));
  sp.edge_tris.assign(sp.edges.size(), {-1, -1});
  for (int ti = 0; ti < nt; ++ti) {
    const auto& t = mesh->triangles[static_cast<size_t>(ti)];
    for (int k = 0; k < 3; ++k) {
      const int e = edge_id[std::minmax(t[k], t[(k + 1) % 3])];
      sp.tri_edges[static_cast<size_t>(ti)][static_cast<size_t>(k)] = e;
      auto& adj = sp.edge_tris[static_cast<size_t>(e)];
      (adj[0] < 0 ? adj[0] : adj[1]) = ti;
    }
  }

  sp.n_scalar = nv + static_cast<int>(sp.edges.size());
  sp.scalar_on_boundary.assign(static_cast<size_t>(sp.n_scalar), 0);
  for (int i = 0; i < nv; ++i)
    sp.scalar_on_boundary[static_cast<size_t>(i)] =
        static_cast<char>(mesh->boundary_flag[static_cast<size_t>(i)]);
  for (size_t e = 0; e < sp.edges.size(); ++e)
    if (edge_count[{sp.edges[e][0], sp.edges[e][1]}] == 1)
      sp.scalar_on_boundary[static_cast<size_t>(nv) + e] = 1;

  sp.interior_index.assign(static_cast<size_t>(sp.n_scalar), -1);
  for (int d = 0; d < sp.n_scalar; ++d)
    if (!sp.scalar_on_boundary[static_cast<size_t>(d)]) {
      sp.interior_index[static_cast<size_t>(d)] = sp.n_interior++;
      sp.interior_dofs.push_back(d);
    }
  return sp;
}

AssembledForms assemble_forms(const FeSpace& sp, const MaterialParams& params,
                              bool reduced_shear) {
  validate_material(params);
  if (sp.n_interior == 0)
    throw EmptySpaceError(
        "assemble_forms: no interior dofs, the clamped space is empty");

  const int n = sp.n_interior;
  const double c_grad = params.mu / 12.0;
  const double c_div = (params.mu + params.lambda) / 12.0;
  const double c_shear = params.mu * params.k / (params.t * params.t);
  const double c_rot = params.t * params.t / 12.0;

  std::vector<Eigen::Triplet<double>> tq, tb;
  tq.reserve(static_cast<size_t>(sp.mesh->triangle_count()) * 200);
  tb.reserve(static_cast<size_t>(sp.mesh->triangle_count()) * 100);

  Eigen::Matrix<double, 18, 18> Qe, Be;
  double N[6];
  Vec2 G[6], gl[3];
  int gdof[6];

  for (int ti = 0; ti < sp.mesh->triangle_count(); ++ti) {
    const auto& t = sp.mesh->triangles[static_cast<size_t>(ti)];
    const double area = barycentric_gradients(*sp.mesh, t, gl);
    Qe.setZero();
    Be.setZero();

    for (const auto& qp : kRuleFull) {
      const double w = qp.w * area;
      shape_values(qp.l0, qp.l1, qp.l2, N);
      shape_gradients(qp.l0, qp.l1, qp.l2, gl, G);
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          const double gg = G[a].dot(G[b]);
          const double nn = N[a] * N[b];
          for (int c = 0; c < 2; ++c) {
            Qe(6 * c + a, 6 * c + b) += w * c_grad * gg;
            for (int d = 0; d < 2; ++d)
              Qe(6 * c + a, 6 * d + b) += w * c_div * G[a](c) * G[b](d);
            Be(6 * c + a, 6 * c + b) += w * c_rot * nn;
          }
          Be(12 + a, 12 + b) += w * nn;
          if (!reduced_shear) {
            Qe(12 + a, 12 + b) += w * c_shear * gg;
            for (int c = 0; c < 2; ++c) {
              Qe(6 * c + a, 12 + b) -= w * c_shear * N[a] * G[b](c);
              Qe(12 + a, 6 * c + b) -= w * c_shear * G[a](c) * N[b];
              Qe(6 * c + a, 6 * c + b) += w * c_shear * nn;
            }
          }
        }
    }
    if (reduced_shear) {
      for (const auto& qp : kRuleReduced) {
        const double w = qp.w * area;
        shape_values(qp.l0, qp.l1, qp.l2, N);
        shape_gradients(qp.l0, qp.l1, qp.l2, gl, G);
        for (int a = 0; a < 6; ++a)
          for (int b = 0; b < 6; ++b) {
            Qe(12 + a, 12 + b) += w * c_shear * G[a].dot(G[b]);
            for (int c = 0; c < 2; ++c) {
              Qe(6 * c + a, 12 + b) -= w * c_shear * N[a] * G[b](c);
              Qe(12 + a, 6 * c + b) -= w * c_shear * G[a](c) * N[b];
              Qe(6 * c + a, 6 * c + b) += w * c_shear * N[a] * N[b];
            }
          }
      }
    }

    local_scalar_dofs(sp, ti, gdof);
    for (int a = 0; a < 6; ++a) {
      const int ia = sp.interior_index[static_cast<size_t>(gdof[a])];
      if (ia < 0) continue;
      for (int b = 0; b < 6; ++b) {
        const int ib = sp.interior_index[static_cast<size_t>(gdof[b])];
        if (ib < 0) continue;
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d) {
            const double q = Qe(6 * c + a, 6 * d + b);
            if (q != 0.0) tq.emplace_back(c * n + ia, d * n + ib, q);
            const double m = Be(6 * c + a, 6 * d + b);
            if (m != 0.0) tb.emplace_back(c * n + ia, d * n + ib, m);
          }
      }
    }
  }

  AssembledForms out;
  out.params = params;
  out.reduced_shear = reduced_shear;
  out.source_hash = sp.source_hash;
  out.Q.resize(3 * n, 3 * n);
  out.B.resize(3 * n, 3 * n);
  out.Q.setFromTriplets(tq.begin(), tq.end());
  out.B.setFromTriplets(tb.begin(), tb.end());
  out.Q.makeCompressed();
  out.B.makeCompressed();
  return out;
}

VecX random_coefficients(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VecX v(size);
  for (int i = 0; i < size; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v[i] = 2.0 * u - 1.0;
  }
  return v;
}

Spectrum solve_smallest(const AssembledForms& forms, int count, double tol) {
  const int n = static_cast<int>(forms.Q.rows());
  if (count < 1) throw std::invalid_argument("solve_smallest: count must be >= 1");
  if (count > n) {
    std::ostringstream msg;
    msg << "solve_smallest: requested " << count << " pairs from a space of dimension " << n;
    throw std::invalid_argument(msg.str());
  }
  if (n > kDofCap) {
    std::ostringstream msg;
    msg << "solve_smallest: " << n << " dofs exceeds the supported cap of " << kDofCap;
    throw std::invalid_argument(msg.str());
  }

  Eigen::SimplicialLLT<SpMat> llt;
  llt.compute(forms.Q);
  if (llt.info() != Eigen::Success)
    throw NumericalError("solve_smallest: stiffness factorization failed (form not positive definite?)");

  const int m = std::min(n, std::max(2 * count + 8, count + 4));
  MatX X = MatX::Zero(n, m);
  {
    const VecX r = random_coefficients(n * m, 0x9e3779b97f4a7c15ULL);
    X = Eigen::Map<const MatX>(r.data(), n, m);
  }

  Spectrum out;
  VecX theta;
  MatX QX, BX;
  const int max_iter = 500;
  for (int it = 1; it <= max_iter; ++it) {
    const MatX Z = forms.B * X;
    const MatX Y = llt.solve(Z);
    const MatX BY = forms.B * Y;
    MatX As = Y.transpose() * Z;   // = Y^T Q Y
    MatX Bs = Y.transpose() * BY;
    As = 0.5 * (As + As.transpose()).eval();
    Bs = 0.5 * (Bs + Bs.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<MatX> small(As, Bs);
    if (small.info() != Eigen::Success) {
      // Rank loss in the block: restart the offending directions.
      X = Eigen::HouseholderQR<MatX>(Y).householderQ() * MatX::Identity(n, m);
      continue;
    }
    const MatX& W = small.eigenvectors();  // Bs-orthonormal
    theta = small.eigenvalues();
    X = Y * W;
    QX = Z * W;  // Q X = Q Y W = Z W
    BX = BY * W;

    out.iterations = it;
    double worst = 0.0;
    for (int kk = 0; kk < count; ++kk) {
      const double res = (QX.col(kk) - theta[kk] * BX.col(kk)).norm() /
                         BX.col(kk).norm();
      worst = std::max(worst, res / std::max(1.0, std::abs(theta[kk])));
    }
    if (worst <= tol) break;
    if (it == max_iter)
      throw NumericalError(
          "solve_smallest: subspace iteration did not converge (residual " +
          std::to_string(worst) + ")");
  }

  out.values = theta.head(count);
  out.vectors = X.leftCols(count);
  out.residuals.resize(count);
  for (int kk = 0; kk < count; ++kk) {
    int imax = 0;
    out.vectors.col(kk).cwiseAbs().maxCoeff(&imax);
    if (out.vectors(imax, kk) < 0.0) out.vectors.col(kk) *= -1.0;
    out.residuals[kk] =
        (forms.Q * out.vectors.col(kk) - out.values[kk] * (forms.B * out.vectors.col(kk))).norm() /
        (forms.B * out.vectors.col(kk)).norm();
  }
  return out;
}

std::vector<EigenCluster> cluster_eigenvalues(const VecX& values, double rel_tol) {
  if (values.size() == 0) return {};
  if (!(rel_tol > 0.0))
    throw std::invalid_argument("cluster_eigenvalues: rel_tol must be positive");
  std::vector<EigenCluster> out;
  int first = 0;
  auto flush = [&](int next) {
    EigenCluster c;
    c.first = first;
    c.size = next - first;
    const auto seg = values.segment(first, c.size);
    c.gamma = seg.mean();
    c.spread = (seg.maxCoeff() - seg.minCoeff()) /
               std::max(std::abs(c.gamma), 1e-300);
    out.push_back(c);
    first = next;
  };
  for (int i = 1; i < values.size(); ++i) {
    const double gap = (values[i] - values[i - 1]) /
                       std::max(std::abs(values[i - 1]), 1e-300);
    if (gap > rel_tol) flush(i);
  }
  flush(static_cast<int>(values.size()));
  return out;
}

FieldSample sample_fields(const FeSpace& sp, const VecX& coeffs, int ti,
                          const Vec2& x) {
  if (coeffs.size() != sp.dof_count())
    throw std::invalid_argument("sample_fields: coefficient size mismatch");
  if (ti < 0 || ti >= sp.mesh->triangle_count())
    throw std::invalid_argument("sample_fields: triangle index out of range");

  const auto& t = sp.mesh->triangles[static_cast<size_t>(ti)];
  Vec2 gl[3];
  barycentric_gradients(*sp.mesh, t, gl);
  const Vec2 p0 = sp.mesh->nodes[t[0]];
  // Affine barycentric coordinates of x.
  const double l1 = gl[1].dot(x - p0);
  const double l2 = gl[2].dot(x - p0);
  const double l0 = 1.0 - l1 - l2;

  double N[6];
  Vec2 G[6];
  shape_values(l0, l1, l2, N);
  shape_gradients(l0, l1, l2, gl, G);

  int gdof[6];
  local_scalar_dofs(sp, ti, gdof);
  const int n = sp.n_interior;
  FieldSample s;
  for (int a = 0; a < 6; ++a) {
    const int ia = sp.interior_index[static_cast<size_t>(gdof[a])];
    if (ia < 0) continue;  // clamped dof, value 0
    const double b1 = coeffs[ia], b2 = coeffs[n + ia], wc = coeffs[2 * n + ia];
    s.beta.x() += b1 * N[a];
    s.beta.y() += b2 * N[a];
    s.w += wc * N[a];
    s.grad_beta.row(0) += b1 * G[a].transpose();
    s.grad_beta.row(1) += b2 * G[a].transpose();
    s.grad_w += wc * G[a];
  }
  return s;
}

NormalDerivatives boundary_normal_derivatives(const FeSpace& sp,
                                              const VecX& coeffs,
                                              const BoundaryTrace& trace) {
  if (trace.source_hash != sp.source_hash)
    throw std::invalid_argument(
        "boundary_normal_derivatives: trace built from a different mesh");
  const int m = trace.size();
  NormalDerivatives nd;
  nd.dbeta_dn.resize(static_cast<size_t>(m));
  nd.dbeta_dn_dot_n.resize(m);
  nd.dw_dn.resize(m);
  nd.div_beta.resize(m);
  for (int s = 0; s < m; ++s) {
    const FieldSample f = sample_fields(sp, coeffs, trace.tri[s], trace.points[s]);
    const Vec2& nrm = trace.normals[static_cast<size_t>(s)];
    const Vec2 dbdn = f.grad_beta * nrm;
    nd.dbeta_dn[static_cast<size_t>(s)] = dbdn;
    nd.dbeta_dn_dot_n[s] = dbdn.dot(nrm);
    nd.dw_dn[s] = f.grad_w.dot(nrm);
    nd.div_beta[s] = f.grad_beta(0, 0) + f.grad_beta(1, 1);
  }
  return nd;
}

double korn_identity_residual(const FeSpace& sp, const VecX& u, const VecX& v) {
  const int n = sp.n_interior;
  if (u.size() != 2 * n || v.size() != 2 * n)
    throw std::invalid_argument(
        "korn_identity_residual: fields must stack two constrained components");

  double sym = 0.0, grad = 0.0, div = 0.0, nu = 0.0, nv = 0.0;
  double N[6];
  Vec2 G[6], gl[3];
  int gdof[6];
  for (int ti = 0; ti < sp.mesh->triangle_count(); ++ti) {
    const auto& t = sp.mesh->triangles[static_cast<size_t>(ti)];
    const double area = barycentric_gradients(*sp.mesh, t, gl);
    local_scalar_dofs(sp, ti, gdof);
    for (const auto& qp : kRuleFull) {
      const double w = qp.w * area;
      shape_values(qp.l0, qp.l1, qp.l2, N);
      shape_gradients(qp.l0, qp.l1, qp.l2, gl, G);
      Mat2 Gu = Mat2::Zero(), Gv = Mat2::Zero();
      for (int a = 0; a < 6; ++a) {
        const int ia = sp.interior_index[static_cast<size_t>(gdof[a])];
        if (ia < 0) continue;
        for (int c = 0; c < 2; ++c) {
          Gu.row(c) += u[c * n + ia] * G[a].transpose();
          Gv.row(c) += v[c * n + ia] * G[a].transpose();
        }
      }
      const Mat2 Eu = 0.5 * (Gu + Gu.transpose());
      const Mat2 Ev = 0.5 * (Gv + Gv.transpose());
      sym += w * 2.0 * (Eu.array() * Ev.array()).sum();
      grad += w * (Gu.array() * Gv.array()).sum();
      div += w * Gu.trace() * Gv.trace();
      nu += w * Gu.squaredNorm();
      nv += w * Gv.squaredNorm();
    }
  }
  const double scale = std::sqrt(std::max(nu, 0.0) * std::max(nv, 0.0));
  return std::abs(sym - grad - div) / std::max(scale, 1e-300);
}

}  // namespace plateshape
