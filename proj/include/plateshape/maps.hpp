#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plateshape/types.hpp"

namespace plateshape {

// C^2 map of the plane with analytic derivatives. jacobian(x)(i,j) is
// d value_i / d x_j; hessians(x)[c](i,j) is d^2 value_c / d x_i d x_j.
// closed_form_delta, when present, is the exact C^2 distance to the identity
// (sup over the plane); otherwise delta_measure samples it.
struct ParametricMap {
  std::string family;
  std::function<Vec2(const Vec2&)> value;
  std::function<Mat2(const Vec2&)> jacobian;
  std::function<std::array<Mat2, 2>(const Vec2&)> hessians;
  std::optional<double> closed_form_delta;
};

// Direction field for shape perturbations x -> x + eps * value(x), with the
// same derivative conventions as ParametricMap.
struct PerturbationField {
  std::string tag;
  std::function<Vec2(const Vec2&)> value;
  std::function<Mat2(const Vec2&)> jacobian;
  std::function<std::array<Mat2, 2>(const Vec2&)> hessians;
};

ParametricMap map_identity();
ParametricMap map_translation(const Vec2& shift);
ParametricMap map_dilation(double a);              // x -> (1+a) x
ParametricMap map_shear(double a);                 // (x1 + a x2, x2)
ParametricMap map_elliptical(double e);            // ((1+e) x1, (1-e) x2)
// x -> x + amp * exp(-|x-c|^2 / width^2) (x - c), a localized radial push.
ParametricMap map_normal_bump(const Vec2& center, double width, double amp);
ParametricMap map_from_field(const PerturbationField& field, double eps);
// outer after inner, derivatives by the chain rule.
ParametricMap map_compose(const ParametricMap& outer, const ParametricMap& inner);

PerturbationField field_zero();
PerturbationField field_constant(const Vec2& c);
PerturbationField field_position();                         // psi(x) = x
PerturbationField field_elliptical();                       // (x1, -x2)
PerturbationField field_sine();                             // (sin x2, 0)
PerturbationField field_radial_bump(double width, double amp);
PerturbationField field_scaled(const PerturbationField& f, double c);
PerturbationField field_sum(const PerturbationField& f, const PerturbationField& g);

// The C^2 deviation from the identity: max over orders 1 and 2, components,
// and sample points of |D^alpha (map - id)|. Uses the exact value when the
// family carries one.
double delta_measure(const ParametricMap& map, const std::vector<Vec2>& samples);

// n-by-n point grid covering [lo, hi], endpoints included.
std::vector<Vec2> grid_samples(const Vec2& lo, const Vec2& hi, int n);

}  // namespace plateshape
