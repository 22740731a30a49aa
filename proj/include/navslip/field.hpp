#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "navslip/geometry.hpp"

namespace navslip {

using GridPtr = std::shared_ptr<const ChannelGrid>;

enum class FieldRole { physical, euler, corrector, remainder, derivative, generic };

const char* role_name(FieldRole r);

struct ScalarField {
  GridPtr grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), v(grid->size(), 0.0) {}
};

struct VectorField {
  GridPtr grid;
  FieldRole role = FieldRole::generic;
  std::array<std::vector<double>, 3> c;

  VectorField() = default;
  VectorField(GridPtr g, FieldRole r);

  std::vector<double>& operator[](int i) { return c[i]; }
  const std::vector<double>& operator[](int i) const { return c[i]; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  // this += s * o
  void axpy(double s, const VectorField& o);
  double max_abs() const;
  void set_zero();
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

using PointFn = std::function<Vec3(double x, double y, double z)>;

VectorField sample_field(GridPtr g, const PointFn& fn, FieldRole role = FieldRole::generic);
ScalarField sample_scalar(GridPtr g, const std::function<double(double, double, double)>& fn);

void require_same_grid(const VectorField& a, const VectorField& b, const char* what);

}  // namespace navslip
