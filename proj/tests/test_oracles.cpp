#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "plateshape/oracles.hpp"

using namespace plateshape;

namespace {

// Frozen root table for the unit disk, mu = lambda = 1 (c = 1/4), digits from
// an independent desk computation. gamma0 = kappa^4 / 4.
struct FrozenRoot {
  int m, q;
  double kappa;
  double gamma0;  // 0 means "kappa only"
};
const FrozenRoot kFrozen[] = {
    {0, 1, 3.1962206166, 26.0907763897},
    {1, 1, 4.6108998790, 113.0011275333},
    {2, 1, 5.9056782354, 304.1018999275},
    {0, 2, 6.3064370477, 395.4360580116},
    {3, 1, 7.1435310235, 651.0161303688},
    {1, 2, 7.7992738008, 925.0318288468},
    {4, 1, 8.3466059388, 1213.3319916683},
    {2, 2, 9.1968825996, 0.0},
    {0, 3, 9.4394991379, 0.0},
    {5, 1, 9.5257013557, 0.0},
};

MatX random_spd(int n, std::uint64_t seed, double shift) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  MatX a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = dist(gen);
  return a * a.transpose() + shift * MatX::Identity(n, n);
}

}  // namespace

TEST_CASE("bessel three-term recurrences hold to 1e-10") {
  // J is checked over the root-search window x <= 14, where the alternating
  // series keeps roughly 1e-12 absolute accuracy; the monotone I series stays
  // relatively exact through x = 20.
  for (double x : {0.5, 1.0, 2.5, 4.0, 7.0, 11.0, 14.0}) {
    for (int m = 1; m <= 5; ++m) {
      const double jm = bessel_j(m - 1, x) + bessel_j(m + 1, x) -
                        (2.0 * m / x) * bessel_j(m, x);
      CHECK(std::abs(jm) <= 1e-10);
    }
  }
  for (double x : {0.5, 1.0, 2.5, 4.0, 7.0, 11.0, 14.0, 16.0, 19.5}) {
    for (int m = 1; m <= 5; ++m) {
      const double im = bessel_i(m - 1, x) - bessel_i(m + 1, x) -
                        (2.0 * m / x) * bessel_i(m, x);
      const double iscale = std::max(std::abs(bessel_i(m - 1, x)), 1.0);
      CHECK(std::abs(im) <= 1e-10 * iscale);
    }
  }
}

TEST_CASE("bessel small-argument leading terms") {
  // J_m(x) ~ (x/2)^m / m!, I_m likewise, for x -> 0.
  CHECK(bessel_j(0, 1e-4) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(bessel_i(0, 1e-4) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(bessel_j(2, 1e-3) == doctest::Approx(1.25e-7).epsilon(1e-6));
  CHECK(bessel_i(2, 1e-3) == doctest::Approx(1.25e-7).epsilon(1e-6));
}

TEST_CASE("characteristic function changes sign across the first m=0 root") {
  CHECK(clamped_plate_characteristic(0, 3.0) *
            clamped_plate_characteristic(0, 3.4) <
        0.0);
  // No root of f_0 below ~3.19.
  CHECK(clamped_plate_characteristic(0, 0.5) *
            clamped_plate_characteristic(0, 3.0) >
        0.0);
}

TEST_CASE("disk characteristic roots match the frozen table") {
  const auto roots = clamped_plate_disk_eigenvalues(1.0, 1.0, 1.0);
  REQUIRE(roots.size() >= 10);

  // Sorted ascending by gamma0.
  for (std::size_t i = 1; i < roots.size(); ++i)
    CHECK(roots[i - 1].gamma0 <= roots[i].gamma0);

  for (const auto& f : kFrozen) {
    auto it = std::find_if(roots.begin(), roots.end(), [&](const auto& r) {
      return r.m == f.m && r.q == f.q;
    });
    REQUIRE_MESSAGE(it != roots.end(), "missing root m=", f.m, " q=", f.q);
    CHECK(std::abs(it->kappa - f.kappa) <= 1e-9);
    CHECK(it->multiplicity == (f.m == 0 ? 1 : 2));
    if (f.gamma0 > 0)
      CHECK(std::abs(it->gamma0 - f.gamma0) <= 1e-8 * f.gamma0);
    // gamma0 is c kappa^4 with c = 1/4 here.
    CHECK(it->gamma0 ==
          doctest::Approx(std::pow(it->kappa, 4) / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("expanded spectrum repeats multiplicities in ascending order") {
  const auto g = clamped_plate_disk_spectrum(1.0, 1.0, 1.0, 6);
  REQUIRE(g.size() == 6);
  const double expect[] = {26.0907763897,  113.0011275333, 113.0011275333,
                           304.1018999275, 304.1018999275, 395.4360580116};
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(g[i] - expect[i]) <= 1e-8 * expect[i]);
}

TEST_CASE("disk spectrum scales with radius and bending modulus") {
  const double base = clamped_plate_disk_spectrum(1.0, 1.0, 1.0, 1)[0];
  // gamma0 = c (kappa/R)^4: radius 2 divides by 16.
  const double scaled = clamped_plate_disk_spectrum(2.0, 1.0, 1.0, 1)[0];
  CHECK(scaled == doctest::Approx(base / 16.0).epsilon(1e-10));
  // c = (2 mu + lambda)/12: mu=2, lambda=3 multiplies by (7/12)/(3/12).
  const double stiff = clamped_plate_disk_spectrum(1.0, 2.0, 3.0, 1)[0];
  CHECK(stiff == doctest::Approx(base * 7.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("dense reference solver on a diagonal pencil") {
  MatX q = MatX::Zero(3, 3);
  q.diagonal() << 3.0, 1.0, 2.0;
  MatX b = MatX::Identity(3, 3);
  const VecX ev = dense_generalized_eig_reference(q, b);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(ev[2] == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("dense reference solver satisfies the trace identity") {
  const int n = 24;
  const MatX q = random_spd(n, 101, 0.5);
  const MatX b = random_spd(n, 202, 1.0);
  const VecX ev = dense_generalized_eig_reference(q, b);
  REQUIRE(ev.size() == n);
  for (int i = 1; i < n; ++i) CHECK(ev[i - 1] <= ev[i]);
  const double tr = (b.ldlt().solve(q)).trace();
  CHECK(ev.sum() == doctest::Approx(tr).epsilon(1e-8));

  // Cross-check against Eigen's generalized solver.
  Eigen::GeneralizedSelfAdjointEigenSolver<MatX> ges(q, b,
                                                     Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i)
    CHECK(ev[i] == doctest::Approx(ges.eigenvalues()[i]).epsilon(1e-9));
}

TEST_CASE("richardson extrapolation removes the leading error term") {
  const double limit = 7.25, c = -3.1, h = 0.1;
  for (int p : {1, 2, 4}) {
    const double vh = limit + c * std::pow(h, p);
    const double vh2 = limit + c * std::pow(h / 2.0, p);
    CHECK(richardson_extrapolate(vh, vh2, p) ==
          doctest::Approx(limit).epsilon(1e-12));
  }
}
