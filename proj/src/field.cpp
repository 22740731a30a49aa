#include "navslip/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "navslip/errors.hpp"

namespace navslip {

const char* role_name(FieldRole r) {
  switch (r) {
    case FieldRole::physical: return "physical";
    case FieldRole::euler: return "euler";
    case FieldRole::corrector: return "corrector";
    case FieldRole::remainder: return "remainder";
    case FieldRole::derivative: return "derivative";
    case FieldRole::generic: return "generic";
  }
  return "?";
}

VectorField::VectorField(GridPtr g, FieldRole r) : grid(std::move(g)), role(r) {
  for (auto& comp : c) comp.assign(grid->size(), 0.0);
}

void require_same_grid(const VectorField& a, const VectorField& b, const char* what) {
  if (!a.grid || !b.grid) throw InputError(std::string(what) + ": field without grid");
  if (a.grid != b.grid && !a.grid->same_shape(*b.grid)) {
    throw InputError(std::string(what) + ": fields live on different grids");
  }
}

VectorField& VectorField::operator+=(const VectorField& o) {
  axpy(1.0, o);
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  axpy(-1.0, o);
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& comp : c)
    for (double& x : comp) x *= s;
  return *this;
}

void VectorField::axpy(double s, const VectorField& o) {
  require_same_grid(*this, o, "VectorField arithmetic");
  for (int d = 0; d < 3; ++d) {
    auto& a = c[d];
    const auto& b = o.c[d];
    for (std::size_t n = 0; n < a.size(); ++n) a[n] += s * b[n];
  }
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& comp : c)
    for (double x : comp) m = std::max(m, std::abs(x));
  return m;
}

void VectorField::set_zero() {
  for (auto& comp : c) std::fill(comp.begin(), comp.end(), 0.0);
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

VectorField sample_field(GridPtr g, const PointFn& fn, FieldRole role) {
  VectorField f(g, role);
  for (int i = 0; i < g->Nx; ++i) {
    for (int j = 0; j < g->Ny; ++j) {
      for (int k = 0; k < g->Nz; ++k) {
        const Vec3 v = fn(g->x(i), g->y(j), g->z_nodes[k]);
        const std::size_t n = g->index(i, j, k);
        f.c[0][n] = v[0];
        f.c[1][n] = v[1];
        f.c[2][n] = v[2];
      }
    }
  }
  return f;
}

ScalarField sample_scalar(GridPtr g, const std::function<double(double, double, double)>& fn) {
  ScalarField f(g);
  for (int i = 0; i < g->Nx; ++i)
    for (int j = 0; j < g->Ny; ++j)
      for (int k = 0; k < g->Nz; ++k) f.v[g->index(i, j, k)] = fn(g->x(i), g->y(j), g->z_nodes[k]);
  return f;
}

}  // namespace navslip
