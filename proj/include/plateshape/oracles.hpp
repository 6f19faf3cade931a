#pragma once

// Reference solutions the FE pipeline is checked against: clamped-plate disk
// eigenvalues from Bessel series, a dense generalized eigensolver that shares
// no code with the iterative one, and Richardson extrapolation.

#include <vector>

#include "plateshape/types.hpp"

namespace plateshape {

// Ascending-series Bessel functions of integer order, for x <= 20. The
// all-positive I series is relatively accurate to machine precision; the
// alternating J series cancels, so its absolute error grows with x and is
// about 3e-12 at x = 14, the top of the default root-search window.
double bessel_j(int m, double x);
double bessel_i(int m, double x);

// Characteristic function of the clamped plate on the unit disk,
//   f_m(x) = J_m(x) I_{m-1}(x) - I_m(x) J_{m-1}(x),   f_0 = J_0 I_1 + I_0 J_1,
// whose positive roots kappa give the eigenvalues gamma0 = c (kappa/R)^4 of
// c Delta^2 w = gamma0 w with w = dw/dn = 0 on the boundary.
double clamped_plate_characteristic(int m, double x);

struct CharacteristicRoot {
  int m = 0;       // angular order
  int q = 0;       // radial index, 1-based
  double kappa = 0;
  double gamma0 = 0;       // c (kappa/R)^4 with c = (2 mu + lambda) / 12
  int multiplicity = 1;    // 2 for m >= 1 (cos/sin pairs), 1 for m = 0
};

// All roots with kappa <= kappa_max for angular orders m = 0..m_max, sorted by
// gamma0. Bisection refines each bracket to 1e-12.
std::vector<CharacteristicRoot> clamped_plate_disk_eigenvalues(
    double radius, double mu, double lambda, int m_max = 6,
    double kappa_max = 14.0);

// The roots expanded to an ascending eigenvalue list (multiplicity repeats).
std::vector<double> clamped_plate_disk_spectrum(double radius, double mu,
                                                double lambda, int count);

// Textbook dense route for Q v = gamma B v with B SPD: Cholesky congruence to
// a standard symmetric problem, full eigen-decomposition, all eigenvalues
// ascending. Kept deliberately independent of solve_smallest.
VecX dense_generalized_eig_reference(const MatX& Q, const MatX& B);

// (2^p v_h2 - v_h) / (2^p - 1): eliminates the leading O(h^p) error term from
// two values computed at mesh widths h and h/2.
double richardson_extrapolate(double v_h, double v_h2, int p);

}  // namespace plateshape
