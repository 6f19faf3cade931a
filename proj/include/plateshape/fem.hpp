#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "plateshape/mesh.hpp"
#include "plateshape/types.hpp"

namespace plateshape {

// Lamé-style coefficients of the bending/shear energy. t is the thickness,
// k the shear correction factor. The spectral parameter produced by the
// solvers is gamma = omega^2 / t (frequency normalized by thickness).
struct MaterialParams {
  double t = 0.1;
  double lambda = 1.0;
  double mu = 1.0;
  double k = 5.0 / 6.0;
};

// Plane-stress reduction of Young's modulus / Poisson ratio.
MaterialParams material_from_engineering(double young, double poisson, double t,
                                         double k = 5.0 / 6.0);

void validate_material(const MaterialParams& p);

// Quadratic Lagrange space on a triangle mesh with homogeneous Dirichlet
// conditions on every component. Scalar dofs are the mesh vertices followed
// by the unique edges in lexicographic (sorted node pair) order; a vector
// of constrained coefficients stacks the three fields [beta1 | beta2 | w],
// each of length n_interior.
struct FeSpace {
  std::shared_ptr<const Mesh> mesh;
  std::vector<std::array<int, 2>> edges;      // sorted node pairs, lexicographic
  std::vector<std::array<int, 3>> tri_edges;  // per triangle: edges 01, 12, 20
  std::vector<std::array<int, 2>> edge_tris;  // adjacent triangles, -1 if none
  std::vector<char> scalar_on_boundary;       // per scalar dof (vertex or edge)
  std::vector<int> interior_index;            // scalar dof -> constrained id, -1
  std::vector<int> interior_dofs;             // constrained id -> scalar dof
  int n_scalar = 0;
  int n_interior = 0;
  std::uint64_t source_hash = 0;

  int dof_count() const { return 3 * n_interior; }
};

FeSpace make_space(std::shared_ptr<const Mesh> mesh);

// Stiffness form
//   Q((b,w),(e,v)) = (mu/12) grad b : grad e + ((mu+lambda)/12) div b div e
//                  + (mu k / t^2) (grad w - b) . (grad v - e)
// and mass form B((b,w),(e,v)) = w v + (t^2/12) b . e, both integrated over
// the mesh and restricted to the constrained dofs. Exact (degree-4) rule on
// every term; reduced_shear swaps a degree-2 rule into the shear term only.
struct AssembledForms {
  SpMat Q;
  SpMat B;
  MaterialParams params;
  bool reduced_shear = false;
  std::uint64_t source_hash = 0;
};

AssembledForms assemble_forms(const FeSpace& space, const MaterialParams& params,
                              bool reduced_shear = false);

// Smallest eigenpairs of Q v = gamma B v. Vectors come back B-orthonormal,
// columnwise sign-fixed (largest entry positive), with residuals
// ||Q v - gamma B v|| / ||B v||; convergence demands residual <=
// tol * max(1, gamma) for every requested pair.
struct Spectrum {
  VecX values;     // ascending
  MatX vectors;    // dof_count x count
  VecX residuals;
  int iterations = 0;
};

Spectrum solve_smallest(const AssembledForms& forms, int count, double tol = 1e-9);

// Maximal groups of consecutive eigenvalues whose successive relative gaps
// stay below rel_tol. first indexes into the ascending value list (0-based).
struct EigenCluster {
  int first = 0;
  int size = 1;
  double gamma = 0.0;   // cluster mean
  double spread = 0.0;  // (max - min) / |mean|
};

std::vector<EigenCluster> cluster_eigenvalues(const VecX& values,
                                              double rel_tol = 1e-3);

// Point values of one discrete field triple inside a given triangle.
// grad_beta(c, j) = d beta_c / d x_j.
struct FieldSample {
  Vec2 beta = Vec2::Zero();
  double w = 0.0;
  Mat2 grad_beta = Mat2::Zero();
  Vec2 grad_w = Vec2::Zero();
};

FieldSample sample_fields(const FeSpace& space, const VecX& coeffs, int tri,
                          const Vec2& x);

// Normal-derivative data of an eigenvector along a boundary trace, the raw
// material of every boundary shape-derivative formula. div_beta carries the
// interior divergence at the same samples so the clamped-boundary identity
// div beta = (d beta / d n) . n can be checked directly.
struct NormalDerivatives {
  std::vector<Vec2> dbeta_dn;
  VecX dbeta_dn_dot_n;
  VecX dw_dn;
  VecX div_beta;
};

NormalDerivatives boundary_normal_derivatives(const FeSpace& space,
                                              const VecX& coeffs,
                                              const BoundaryTrace& trace);

// Relative defect of 2 int eps(u):eps(v) = int grad u : grad v + int div u div v,
// the clamped-boundary Korn identity. u, v hold two stacked constrained
// components each (size 2 n_interior).
double korn_identity_residual(const FeSpace& space, const VecX& u, const VecX& v);

// Deterministic uniform(-1,1) coefficients, for synthetic-field tests.
VecX random_coefficients(int size, std::uint64_t seed);

}  // namespace plateshape
