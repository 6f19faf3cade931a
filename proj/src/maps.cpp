#include "plateshape/maps.hpp"

#include <cmath>

namespace plateshape {

namespace {

std::array<Mat2, 2> zero_hessians() {
  return {Mat2::Zero(), Mat2::Zero()};
}

ParametricMap linear_map(std::string family, const Mat2& A, double delta) {
  ParametricMap m;
  m.family = std::move(family);
  m.value = [A](const Vec2& x) { return Vec2(A * x); };
  m.jacobian = [A](const Vec2&) { return A; };
  m.hessians = [](const Vec2&) { return zero_hessians(); };
  m.closed_form_delta = delta;
  return m;
}

}  // namespace

ParametricMap map_identity() {
  return linear_map("identity", Mat2::Identity(), 0.0);
}

ParametricMap map_translation(const Vec2& shift) {
  ParametricMap m;
  m.family = "translation";
  m.value = [shift](const Vec2& x) { return Vec2(x + shift); };
  m.jacobian = [](const Vec2&) { return Mat2::Identity(); };
  m.hessians = [](const Vec2&) { return zero_hessians(); };
  m.closed_form_delta = 0.0;  // derivatives of (map - id) all vanish
  return m;
}

ParametricMap map_dilation(double a) {
  return linear_map("dilation", (1.0 + a) * Mat2::Identity(), std::abs(a));
}

ParametricMap map_shear(double a) {
  Mat2 A = Mat2::Identity();
  A(0, 1) = a;
  return linear_map("shear", A, std::abs(a));
}

ParametricMap map_elliptical(double e) {
  Mat2 A = Mat2::Zero();
  A(0, 0) = 1.0 + e;
  A(1, 1) = 1.0 - e;
  return linear_map("elliptical", A, std::abs(e));
}

ParametricMap map_normal_bump(const Vec2& center, double width, double amp) {
  if (!(width > 0.0))
    throw std::invalid_argument("map_normal_bump: width must be positive");
  const PerturbationField f = field_radial_bump(width, amp);
  ParametricMap m;
  m.family = "normal_bump";
  m.value = [center, f](const Vec2& x) { return Vec2(x + f.value(x - center)); };
  m.jacobian = [center, f](const Vec2& x) {
    return Mat2(Mat2::Identity() + f.jacobian(x - center));
  };
  m.hessians = [center, f](const Vec2& x) { return f.hessians(x - center); };
  return m;
}

ParametricMap map_from_field(const PerturbationField& field, double eps) {
  ParametricMap m;
  m.family = "field:" + field.tag;
  m.value = [field, eps](const Vec2& x) { return Vec2(x + eps * field.value(x)); };
  m.jacobian = [field, eps](const Vec2& x) {
    return Mat2(Mat2::Identity() + eps * field.jacobian(x));
  };
  m.hessians = [field, eps](const Vec2& x) {
    auto h = field.hessians(x);
    h[0] *= eps;
    h[1] *= eps;
    return h;
  };
  return m;
}

ParametricMap map_compose(const ParametricMap& outer, const ParametricMap& inner) {
  ParametricMap m;
  m.family = "compose(" + outer.family + "," + inner.family + ")";
  m.value = [outer, inner](const Vec2& x) { return outer.value(inner.value(x)); };
  m.jacobian = [outer, inner](const Vec2& x) {
    return Mat2(outer.jacobian(inner.value(x)) * inner.jacobian(x));
  };
  m.hessians = [outer, inner](const Vec2& x) {
    const Vec2 y = inner.value(x);
    const Mat2 Jg = inner.jacobian(x);
    const Mat2 Jf = outer.jacobian(y);
    const auto Hf = outer.hessians(y);
    const auto Hg = inner.hessians(x);
    std::array<Mat2, 2> h;
    for (int c = 0; c < 2; ++c)
      h[c] = Jg.transpose() * Hf[c] * Jg + Jf(c, 0) * Hg[0] + Jf(c, 1) * Hg[1];
    return h;
  };
  return m;
}

PerturbationField field_zero() {
  PerturbationField f;
  f.tag = "zero";
  f.value = [](const Vec2&) { return Vec2(Vec2::Zero()); };
  f.jacobian = [](const Vec2&) { return Mat2(Mat2::Zero()); };
  f.hessians = [](const Vec2&) { return zero_hessians(); };
  return f;
}

PerturbationField field_constant(const Vec2& c) {
  PerturbationField f = field_zero();
  f.tag = "constant";
  f.value = [c](const Vec2&) { return c; };
  return f;
}

PerturbationField field_position() {
  PerturbationField f;
  f.tag = "position";
  f.value = [](const Vec2& x) { return x; };
  f.jacobian = [](const Vec2&) { return Mat2(Mat2::Identity()); };
  f.hessians = [](const Vec2&) { return zero_hessians(); };
  return f;
}

PerturbationField field_elliptical() {
  PerturbationField f;
  f.tag = "elliptical";
  f.value = [](const Vec2& x) { return Vec2(x.x(), -x.y()); };
  f.jacobian = [](const Vec2&) {
    Mat2 J = Mat2::Identity();
    J(1, 1) = -1.0;
    return J;
  };
  f.hessians = [](const Vec2&) { return zero_hessians(); };
  return f;
}

PerturbationField field_sine() {
  PerturbationField f;
  f.tag = "sine";
  f.value = [](const Vec2& x) { return Vec2(std::sin(x.y()), 0.0); };
  f.jacobian = [](const Vec2& x) {
    Mat2 J = Mat2::Zero();
    J(0, 1) = std::cos(x.y());
    return J;
  };
  f.hessians = [](const Vec2& x) {
    auto h = zero_hessians();
    h[0](1, 1) = -std::sin(x.y());
    return h;
  };
  return f;
}

PerturbationField field_radial_bump(double width, double amp) {
  if (!(width > 0.0))
    throw std::invalid_argument("field_radial_bump: width must be positive");
  PerturbationField f;
  f.tag = "radial_bump";
  const double iw2 = 1.0 / (width * width);
  // psi = amp e^{-|x|^2/w^2} x; grad(e) = -2 e x / w^2.
  f.value = [amp, iw2](const Vec2& x) {
    return Vec2(amp * std::exp(-x.squaredNorm() * iw2) * x);
  };
  f.jacobian = [amp, iw2](const Vec2& x) {
    const double e = amp * std::exp(-x.squaredNorm() * iw2);
    return Mat2(e * (Mat2::Identity() - 2.0 * iw2 * x * x.transpose()));
  };
  f.hessians = [amp, iw2](const Vec2& x) {
    const double e = amp * std::exp(-x.squaredNorm() * iw2);
    std::array<Mat2, 2> h;
    for (int c = 0; c < 2; ++c) {
      // d^2/dx_i dx_j [e * x_c] with d e/dx_k = -2 iw2 x_k e:
      // e [ -2 iw2 (delta_ic x_j + delta_jc x_i + delta_ij x_c)
      //     + 4 iw2^2 x_i x_j x_c ]
      Mat2 m;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double v = 4.0 * iw2 * iw2 * x(i) * x(j) * x(c);
          if (i == c) v += -2.0 * iw2 * x(j);
          if (j == c) v += -2.0 * iw2 * x(i);
          if (i == j) v += -2.0 * iw2 * x(c);
          m(i, j) = e * v;
        }
      h[c] = m;
    }
    return h;
  };
  return f;
}

PerturbationField field_scaled(const PerturbationField& f, double c) {
  PerturbationField g;
  g.tag = f.tag + "*scale";
  g.value = [f, c](const Vec2& x) { return Vec2(c * f.value(x)); };
  g.jacobian = [f, c](const Vec2& x) { return Mat2(c * f.jacobian(x)); };
  g.hessians = [f, c](const Vec2& x) {
    auto h = f.hessians(x);
    h[0] *= c;
    h[1] *= c;
    return h;
  };
  return g;
}

PerturbationField field_sum(const PerturbationField& f, const PerturbationField& g) {
  PerturbationField s;
  s.tag = f.tag + "+" + g.tag;
  s.value = [f, g](const Vec2& x) { return Vec2(f.value(x) + g.value(x)); };
  s.jacobian = [f, g](const Vec2& x) { return Mat2(f.jacobian(x) + g.jacobian(x)); };
  s.hessians = [f, g](const Vec2& x) {
    auto a = f.hessians(x);
    const auto b = g.hessians(x);
    a[0] += b[0];
    a[1] += b[1];
    return a;
  };
  return s;
}

double delta_measure(const ParametricMap& map, const std::vector<Vec2>& samples) {
  if (map.closed_form_delta) return *map.closed_form_delta;
  if (samples.empty())
    throw std::invalid_argument("delta_measure: no sample points given");
  double d = 0.0;
  for (const auto& x : samples) {
    const Mat2 dj = map.jacobian(x) - Mat2::Identity();
    d = std::max(d, dj.cwiseAbs().maxCoeff());
    const auto h = map.hessians(x);
    d = std::max({d, h[0].cwiseAbs().maxCoeff(), h[1].cwiseAbs().maxCoeff()});
  }
  return d;
}

std::vector<Vec2> grid_samples(const Vec2& lo, const Vec2& hi, int n) {
  if (n < 2) throw std::invalid_argument("grid_samples: need n >= 2");
  std::vector<Vec2> pts;
  pts.reserve(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      pts.emplace_back(lo.x() + (hi.x() - lo.x()) * i / (n - 1),
                       lo.y() + (hi.y() - lo.y()) * j / (n - 1));
  return pts;
}

}  // namespace plateshape
