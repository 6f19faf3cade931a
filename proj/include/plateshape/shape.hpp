#pragma once

#include <cstdint>

#include "plateshape/fem.hpp"
#include "plateshape/maps.hpp"
#include "plateshape/mesh.hpp"

namespace plateshape {

// Transplants a discrete eigenvector from a mesh onto its image under a map,
// covariantly: w carries over by composition with the inverse map, the
// rotation transforms like a gradient (beta_hat = J^{-T} beta). Interior P2
// node preimages are found by Newton inversion of the map. dst must be the
// space built on map_mesh(*src.mesh, map).
VecX push_forward(const FeSpace& src, const VecX& coeffs, const ParametricMap& map,
                  const FeSpace& dst);

// |Q_mapped(c_hat) - Q(c)| / (Q(c) * delta(map)): the quantity the C^2
// perturbation theory bounds by a constant. Throws UndefinedRatioError when
// delta(map) = 0 (identity, translations).
double form_comparison_ratio(const FeSpace& src, const MaterialParams& params,
                             const VecX& coeffs, const ParametricMap& map,
                             const std::vector<Vec2>& delta_samples);

// Shape derivative of a simple eigenvalue gamma_idx in direction psi:
//   d gamma = - contour_int [ (mu/12) |dbeta/dn|^2
//                           + ((mu+lambda)/12) (dbeta/dn . n)^2
//                           + (mu k / t^2) (dw/dn)^2 ] (psi . n) dsigma
// with the B-normalized eigenvector. Throws NotSimpleError when idx sits in
// a cluster of size > 1 at cluster_tol.
double hadamard_derivative(const FeSpace& space, const MaterialParams& params,
                           const Spectrum& spec, int idx,
                           const PerturbationField& field,
                           const BoundaryTrace& trace, double cluster_tol = 1e-3);

// Interaction matrix of a degenerate cluster: same boundary integrand with
// mode pairs (i,j). Its eigenvalues are the first-order branch slopes of the
// cluster under x + eps psi.
MatX splitting_matrix(const FeSpace& space, const MaterialParams& params,
                      const Spectrum& spec, const EigenCluster& cluster,
                      const PerturbationField& field, const BoundaryTrace& trace);

// e_s of the given values (sum over s-subsets of products).
double elementary_symmetric(const VecX& values, int s);

// Derivative of the s-th elementary symmetric function of the cluster
// branches: these stay differentiable through the splitting even though the
// sorted eigenvalues do not. Equals
//   binom(size-1, s-1) * mean^(s-1) * trace(splitting_matrix).
double symmetric_function_derivative(const FeSpace& space,
                                     const MaterialParams& params,
                                     const Spectrum& spec,
                                     const EigenCluster& cluster, int s,
                                     const PerturbationField& field,
                                     const BoundaryTrace& trace);

// d/deps of the enclosed volume under x + eps psi: contour integral of psi.n.
double volume_derivative(const PerturbationField& field, const BoundaryTrace& trace);

// Nearest-sample outward normal of the trace, as a perturbation direction.
// Piecewise constant: values only, derivatives reported zero.
PerturbationField field_normal_extension(const BoundaryTrace& trace);

// Removes the volume component: psi' = psi - (dV/L) n_ext, so that
// volume_derivative(psi') = 0 at the trace samples.
PerturbationField volume_preserving_project(const PerturbationField& field,
                                            const BoundaryTrace& trace);

// Cluster-summed boundary integrand p(s) (the trace of the splitting
// integrand), with weighted mean and coefficient of variation along the
// boundary. A flat profile is the signature of a volume-constrained critical
// shape: d gamma = -int p (psi.n) vanishes for volume-preserving psi exactly
// when p is constant. The construction re-checks invariance under a random
// rotation of the cluster basis (seeded) and throws NumericalError if the
// profile moves.
struct BoundaryProfile {
  VecX values;
  VecX arclength;
  double mean = 0.0;
  double cv = 0.0;
};

BoundaryProfile criticality_profile(const FeSpace& space,
                                    const MaterialParams& params,
                                    const Spectrum& spec,
                                    const EigenCluster& cluster,
                                    const BoundaryTrace& trace,
                                    std::uint64_t seed = 7);

// Finite-difference references. Each solves the eigenproblem on meshes mapped
// by x + eps psi and x - eps psi and differences the results; a crossing
// guard rejects eps that shuffles the cluster ordering.
struct FdOptions {
  double eps = 1e-3;
  double solver_tol = 1e-9;
  double cluster_tol = 1e-3;
  bool reduced_shear = false;
};

// Central difference of the idx-th sorted eigenvalue. Requires it simple at
// the base shape (BranchAmbiguityError otherwise: single sorted indices are
// not branch-stable through a degenerate cluster).
double eigen_fd_derivative(const Mesh& mesh, const MaterialParams& params,
                           int idx, const PerturbationField& field,
                           const FdOptions& opts = {});

// Branch-matched slopes of a degenerate cluster, ascending. The k-th
// ascending value at +eps pairs with the k-th descending at -eps; sorted
// one-sided differences would cancel symmetric splittings instead.
VecX fd_branch_slopes(const Mesh& mesh, const MaterialParams& params,
                      const EigenCluster& cluster, const PerturbationField& field,
                      const FdOptions& opts = {});

// Plain central difference of e_s over the cluster (symmetric in the
// branches, so no matching is needed).
double fd_symmetric_function_derivative(const Mesh& mesh,
                                        const MaterialParams& params,
                                        const EigenCluster& cluster, int s,
                                        const PerturbationField& field,
                                        const FdOptions& opts = {});

}  // namespace plateshape
