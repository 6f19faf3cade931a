#include <doctest.h>

#include <cmath>

#include "plateshape/maps.hpp"

using namespace plateshape;

namespace {

// Central-difference check of jacobian and hessians against value, relative
// to the field scale. h = 1e-5 puts truncation near 1e-10 for smooth maps.
void check_derivatives(const ParametricMap& map, const Vec2& x, double tol) {
  const double h = 1e-5;
  const Mat2 jac = map.jacobian(x);
  const auto hess = map.hessians(x);
  for (int j = 0; j < 2; ++j) {
    Vec2 dx = Vec2::Zero();
    dx[j] = h;
    const Vec2 fd = (map.value(x + dx) - map.value(x - dx)) / (2 * h);
    const Mat2 jp = map.jacobian(x + dx), jm = map.jacobian(x - dx);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(jac(i, j) - fd[i]) <= tol);
      for (int c = 0; c < 2; ++c) {
        // hessians[c](i,j) should match d(jacobian(c,i))/dx_j.
        const double hfd = (jp(c, i) - jm(c, i)) / (2 * h);
        CHECK(std::abs(hess[c](i, j) - hfd) <= tol);
      }
    }
  }
  // Hessians symmetric.
  for (int c = 0; c < 2; ++c)
    CHECK(std::abs(hess[c](0, 1) - hess[c](1, 0)) <= 1e-14);
}

ParametricMap as_map(const PerturbationField& f) { return map_from_field(f, 1.0); }

}  // namespace

TEST_CASE("closed-form deviation measures") {
  const auto samples = grid_samples(Vec2(-2, -2), Vec2(2, 2), 9);
  CHECK(delta_measure(map_identity(), samples) == 0.0);
  CHECK(delta_measure(map_translation(Vec2(0.4, -0.1)), samples) == 0.0);
  CHECK(delta_measure(map_dilation(0.02), samples) == 0.02);
  CHECK(delta_measure(map_shear(0.1), samples) == 0.1);
  CHECK(delta_measure(map_elliptical(0.05), samples) == 0.05);
  CHECK(map_dilation(-0.03).closed_form_delta.value() == 0.03);
}

TEST_CASE("sampled deviation of a sinusoidal displacement") {
  // (sin x2, 0) scaled by eps: sup|d/dx2| = eps at x2 = 0, which the
  // symmetric grid contains, and all other derivative samples are smaller.
  const auto samples = grid_samples(Vec2(-2, -2), Vec2(2, 2), 9);
  const ParametricMap m = map_from_field(field_sine(), 0.01);
  CHECK_FALSE(m.closed_form_delta.has_value());
  CHECK(delta_measure(m, samples) == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("map value conventions") {
  const Vec2 x(0.3, -0.7);
  CHECK((map_dilation(0.1).value(x) - 1.1 * x).norm() <= 1e-15);
  CHECK((map_shear(0.2).value(x) - Vec2(0.3 + 0.2 * -0.7, -0.7)).norm() <= 1e-15);
  CHECK((map_elliptical(0.05).value(x) - Vec2(1.05 * 0.3, 0.95 * -0.7)).norm() <=
        1e-15);
  CHECK((map_translation(Vec2(1, 2)).value(x) - Vec2(1.3, 1.3)).norm() <= 1e-15);
}

TEST_CASE("composition applies outer after inner") {
  const ParametricMap m =
      map_compose(map_dilation(0.1), map_translation(Vec2(0.3, 0.0)));
  const Vec2 x(0.5, -0.2);
  CHECK((m.value(x) - 1.1 * (x + Vec2(0.3, 0.0))).norm() <= 1e-15);
  // Chain rule at a non-trivial composition.
  const ParametricMap c =
      map_compose(map_normal_bump(Vec2(0.2, -0.1), 0.7, 0.05), map_shear(0.15));
  check_derivatives(c, Vec2(0.4, 0.3), 1e-8);
  check_derivatives(c, Vec2(-0.6, 0.1), 1e-8);
}

TEST_CASE("analytic derivatives of the localized bump match differences") {
  const ParametricMap m = map_normal_bump(Vec2(0.2, -0.1), 0.7, 0.05);
  for (const Vec2& x : {Vec2(0.0, 0.0), Vec2(0.5, 0.4), Vec2(-0.3, -0.9)})
    check_derivatives(m, x, 1e-8);
}

TEST_CASE("perturbation fields carry consistent derivatives") {
  for (const auto& f : {field_position(), field_elliptical(), field_sine(),
                        field_radial_bump(0.6, 1.0),
                        field_sum(field_elliptical(),
                                  field_scaled(field_radial_bump(0.8, 0.3), 2.0))}) {
    const ParametricMap m = as_map(f);
    check_derivatives(m, Vec2(0.35, -0.15), 1e-7);
  }
  CHECK((field_position().value(Vec2(2, 3)) - Vec2(2, 3)).norm() == 0.0);
  CHECK((field_elliptical().value(Vec2(2, 3)) - Vec2(2, -3)).norm() == 0.0);
  CHECK((field_sine().value(Vec2(2, 0.5)) - Vec2(std::sin(0.5), 0)).norm() <= 1e-16);
  CHECK(field_zero().value(Vec2(1, 1)).norm() == 0.0);
  CHECK((field_constant(Vec2(3, -1)).value(Vec2(9, 9)) - Vec2(3, -1)).norm() == 0.0);
}

TEST_CASE("displacement scaling is linear in eps") {
  const PerturbationField f = field_radial_bump(0.5, 1.0);
  const Vec2 x(0.2, 0.1);
  const Vec2 d1 = map_from_field(f, 0.01).value(x) - x;
  const Vec2 d2 = map_from_field(f, 0.02).value(x) - x;
  CHECK((d2 - 2.0 * d1).norm() <= 1e-15);
}

TEST_CASE("grid samples cover the box inclusively") {
  const auto g = grid_samples(Vec2(-1, 0), Vec2(1, 2), 5);
  REQUIRE(g.size() == 25);
  CHECK((g.front() - Vec2(-1, 0)).norm() == 0.0);
  CHECK((g.back() - Vec2(1, 2)).norm() == 0.0);
  bool has_mid = false;
  for (const auto& p : g) has_mid = has_mid || (p - Vec2(0, 1)).norm() == 0.0;
  CHECK(has_mid);
}
