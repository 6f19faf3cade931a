#include "plateshape/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace plateshape {

namespace {

// Shared series kernel: sum_k s^k (x/2)^{m+2k} / (k! (m+k)!) with s = -1 for J
// and s = +1 for I. Terms are accumulated until they stop contributing.
double bessel_series(int m, double x, double sign) {
  if (x < 0 || m < 0) throw std::invalid_argument("bessel: need m >= 0, x >= 0");
  if (x > 20.0) throw OutOfRangeError("bessel: series validated for x <= 20");
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  const double h = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= m; ++i) term *= h / i;  // (x/2)^m / m!
  double sum = term;
  const double h2 = h * h;
  for (int k = 1; k < 400; ++k) {
    term *= sign * h2 / (static_cast<double>(k) * (m + k));
    sum += term;
    if (k > 3 && std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double bessel_j(int m, double x) { return bessel_series(m, x, -1.0); }
double bessel_i(int m, double x) { return bessel_series(m, x, +1.0); }

double clamped_plate_characteristic(int m, double x) {
  if (m == 0) return bessel_j(0, x) * bessel_i(1, x) + bessel_i(0, x) * bessel_j(1, x);
  return bessel_j(m, x) * bessel_i(m - 1, x) - bessel_i(m, x) * bessel_j(m - 1, x);
}

std::vector<CharacteristicRoot> clamped_plate_disk_eigenvalues(
    double radius, double mu, double lambda, int m_max, double kappa_max) {
  if (radius <= 0) throw std::invalid_argument("disk oracle: radius must be positive");
  if (kappa_max > 20.0) throw OutOfRangeError("disk oracle: kappa_max above series range");
  const double coeff = (2.0 * mu + lambda) / 12.0;
  std::vector<CharacteristicRoot> roots;
  for (int m = 0; m <= m_max; ++m) {
    int q = 0;
    const double step = 0.05;
    double a = 0.5, fa = clamped_plate_characteristic(m, a);
    for (double b = a + step; b <= kappa_max + 1e-12; b += step) {
      double fb = clamped_plate_characteristic(m, b);
      if (fa == 0.0 || fa * fb < 0.0) {
        double lo = a, hi = b;
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
          double mid = 0.5 * (lo + hi);
          double fm = clamped_plate_characteristic(m, mid);
          if (fa * fm <= 0.0)
            hi = mid;
          else {
            lo = mid;
            fa = fm;
          }
        }
        const double kappa = 0.5 * (lo + hi);
        CharacteristicRoot r;
        r.m = m;
        r.q = ++q;
        r.kappa = kappa;
        r.gamma0 = coeff * std::pow(kappa / radius, 4);
        r.multiplicity = m == 0 ? 1 : 2;
        roots.push_back(r);
      }
      a = b;
      fa = fb;
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const CharacteristicRoot& x, const CharacteristicRoot& y) {
              return x.gamma0 < y.gamma0;
            });
  return roots;
}

std::vector<double> clamped_plate_disk_spectrum(double radius, double mu,
                                                double lambda, int count) {
  // Widen the scan until enough modes are found; each m contributes its first
  // root below kappa ~ m + 4, so the default window usually suffices.
  auto roots = clamped_plate_disk_eigenvalues(radius, mu, lambda,
                                              std::max(6, count), 14.0);
  std::vector<double> out;
  for (const auto& r : roots)
    for (int i = 0; i < r.multiplicity && static_cast<int>(out.size()) < count; ++i)
      out.push_back(r.gamma0);
  if (static_cast<int>(out.size()) < count)
    throw OutOfRangeError("disk oracle: scan window exhausted before count modes");
  return out;
}

VecX dense_generalized_eig_reference(const MatX& Q, const MatX& B) {
  if (Q.rows() != Q.cols() || B.rows() != B.cols() || Q.rows() != B.rows())
    throw std::invalid_argument("dense reference: need square matrices of equal size");
  const double qsym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  const double bsym = (B - B.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(Q.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
  if (qsym > 1e-10 * scale || bsym > 1e-10 * scale)
    throw std::invalid_argument("dense reference: matrices are not symmetric");
  Eigen::LLT<MatX> llt(B);
  if (llt.info() != Eigen::Success)
    throw NumericalError("dense reference: B is not positive definite");
  MatX C = llt.matrixL().solve(Q);
  C = llt.matrixL().solve(C.transpose()).transpose();
  C = 0.5 * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<MatX> es(C, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("dense reference: eigen-decomposition failed");
  return es.eigenvalues();
}

double richardson_extrapolate(double v_h, double v_h2, int p) {
  if (p < 1) throw std::invalid_argument("richardson: order p must be >= 1");
  const double f = std::pow(2.0, p);
  return (f * v_h2 - v_h) / (f - 1.0);
}

}  // namespace plateshape
