#include "navslip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "navslip/errors.hpp"
#include "navslip/spectral.hpp"
#include "navslip/stencils.hpp"

namespace navslip {

namespace {

void check_region(const ChannelGrid& g, const Region& r) {
  if (r.kind == RegionKind::whole) return;
  if (!(r.a > 0.0) || !(r.a < 0.5 * g.h)) {
    throw ConfigError("region width a must satisfy 0 < a < h/2");
  }
}

bool in_region(const ChannelGrid& g, const Region& r, double z) {
  if (r.kind == RegionKind::whole) return true;
  const double d = std::min(z, g.h - z);
  return r.kind == RegionKind::boundary_strip ? d <= r.a : d > r.a;
}

// Stencil widths for an m-th derivative with 2nd-order accuracy.
FdOperator z_operator(const std::vector<double>& z, int m) {
  const int width = (m % 2 == 1) ? m + 2 : m + 1;
  return FdOperator::lagrange(z, m, width, m + 2);
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

std::string Region::label() const {
  switch (kind) {
    case RegionKind::whole: return "whole";
    case RegionKind::boundary_strip: return "boundary_strip";
    case RegionKind::interior: return "interior";
  }
  return "?";
}

const char* time_mode_name(TimeMode m) {
  switch (m) {
    case TimeMode::instant: return "instant";
    case TimeMode::sup_over_time: return "sup_over_time";
    case TimeMode::L2_over_time: return "L2_over_time";
  }
  return "?";
}

double integrate(const ChannelGrid& g, const std::vector<double>& f) {
  double s = 0.0;
  const std::size_t plane = g.plane();
  for (std::size_t p = 0; p < plane; ++p) {
    const double* col = f.data() + p * g.Nz;
    for (int k = 0; k < g.Nz; ++k) s += g.z_weights[k] * col[k];
  }
  return s * g.dx() * g.dy();
}

double integrate_plane(const ChannelGrid& g, const std::vector<double>& f, int k) {
  double s = 0.0;
  const std::size_t plane = g.plane();
  for (std::size_t p = 0; p < plane; ++p) s += f[p * g.Nz + k];
  return s * g.dx() * g.dy();
}

void ddz(const ChannelGrid& g, const std::vector<double>& in, std::vector<double>& out, int m) {
  const FdOperator op = z_operator(g.z_nodes, m);
  out.resize(in.size());
  const std::size_t plane = g.plane();
  for (std::size_t p = 0; p < plane; ++p) op.apply(in.data() + p * g.Nz, out.data() + p * g.Nz);
}

std::array<VectorField, 3> gradient(const VectorField& f) {
  const ChannelGrid& g = *f.grid;
  std::array<VectorField, 3> out{VectorField(f.grid, FieldRole::derivative),
                                 VectorField(f.grid, FieldRole::derivative),
                                 VectorField(f.grid, FieldRole::derivative)};
  Fourier2D ft(g.Nx, g.Ny, g.Nz, g.L1, g.L2);
  for (int c = 0; c < 3; ++c) {
    ft.derivative(f.c[c].data(), out[0].c[c].data(), 1, 0);
    ft.derivative(f.c[c].data(), out[1].c[c].data(), 0, 1);
    ddz(g, f.c[c], out[2].c[c], 1);
  }
  return out;
}

std::vector<double> divergence(const VectorField& f) {
  const ChannelGrid& g = *f.grid;
  Fourier2D ft(g.Nx, g.Ny, g.Nz, g.L1, g.L2);
  std::vector<double> d(g.size()), tmp(g.size());
  ft.derivative(f.c[0].data(), d.data(), 1, 0);
  ft.derivative(f.c[1].data(), tmp.data(), 0, 1);
  for (std::size_t n = 0; n < d.size(); ++n) d[n] += tmp[n];
  ddz(g, f.c[2], tmp, 1);
  for (std::size_t n = 0; n < d.size(); ++n) d[n] += tmp[n];
  return d;
}

double norm_L2(const ChannelGrid& g, const std::vector<double>& f, Region r) {
  check_region(g, r);
  double s = 0.0;
  const std::size_t plane = g.plane();
  for (std::size_t p = 0; p < plane; ++p) {
    const double* col = f.data() + p * g.Nz;
    for (int k = 0; k < g.Nz; ++k) {
      if (in_region(g, r, g.z_nodes[k])) s += g.z_weights[k] * col[k] * col[k];
    }
  }
  return std::sqrt(s * g.dx() * g.dy());
}

double norm_L2(const VectorField& f, Region r) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double v = norm_L2(*f.grid, f.c[c], r);
    s += v * v;
  }
  return std::sqrt(s);
}

double norm_grad(const VectorField& f, Region r) {
  const auto grad = gradient(f);
  double s = 0.0;
  for (const auto& d : grad) {
    const double v = norm_L2(d, r);
    s += v * v;
  }
  return std::sqrt(s);
}

double norm_H1(const VectorField& f, Region r) {
  const double a = norm_L2(f, r), b = norm_grad(f, r);
  return std::sqrt(a * a + b * b);
}

double norm_Linf_region(const ChannelGrid& g, const std::vector<double>& f, Region r) {
  check_region(g, r);
  double m = 0.0;
  const std::size_t plane = g.plane();
  for (std::size_t p = 0; p < plane; ++p) {
    for (int k = 0; k < g.Nz; ++k) {
      if (in_region(g, r, g.z_nodes[k])) m = std::max(m, std::abs(f[p * g.Nz + k]));
    }
  }
  return m;
}

double norm_Linf_region(const VectorField& f, Region r) {
  const ChannelGrid& g = *f.grid;
  check_region(g, r);
  double m = 0.0;
  const std::size_t plane = g.plane();
  for (std::size_t p = 0; p < plane; ++p) {
    for (int k = 0; k < g.Nz; ++k) {
      if (!in_region(g, r, g.z_nodes[k])) continue;
      const std::size_t n = p * g.Nz + k;
      const double v =
          f.c[0][n] * f.c[0][n] + f.c[1][n] * f.c[1][n] + f.c[2][n] * f.c[2][n];
      m = std::max(m, v);
    }
  }
  return std::sqrt(m);
}

double conormal_norm(const ChannelGrid& g, const std::vector<double>& f, int m) {
  if (m < 0) throw ConfigError("conormal_norm: m must be >= 0");
  Fourier2D ft(g.Nx, g.Ny, g.Nz, g.L1, g.L2);
  const FdOperator dz = z_operator(g.z_nodes, 1);
  std::vector<double> phi(g.Nz);
  for (int k = 0; k < g.Nz; ++k) phi[k] = g.z_nodes[k] * (g.h - g.z_nodes[k]) / g.h;

  const int nky = ft.nky();
  const double norm_fac = g.dx() * g.dy() / (static_cast<double>(g.Nx) * g.Ny);
  std::vector<double> gc = f, tmp(f.size());
  std::vector<cplx> spec(ft.spectral_size());
  double total = 0.0;
  for (int c = 0; c <= m; ++c) {
    if (c > 0) {
      // gc <- phi * d/dz gc
      const std::size_t plane = g.plane();
      for (std::size_t p = 0; p < plane; ++p) dz.apply(gc.data() + p * g.Nz, tmp.data() + p * g.Nz);
      for (std::size_t p = 0; p < plane; ++p)
        for (int k = 0; k < g.Nz; ++k) gc[p * g.Nz + k] = phi[k] * tmp[p * g.Nz + k];
    }
    ft.forward(gc.data(), spec.data());
    for (int a = 0; a + c <= m; ++a) {
      for (int b = 0; a + b + c <= m; ++b) {
        double s = 0.0;
        for (int i = 0; i < g.Nx; ++i) {
          for (int j = 0; j < nky; ++j) {
            const double mult = std::norm(ft.multiplier(i, j, a, b));
            if (mult == 0.0) continue;
            const double herm = (j == 0 || 2 * j == g.Ny) ? 1.0 : 2.0;
            const cplx* col = spec.data() + (static_cast<std::size_t>(i) * nky + j) * g.Nz;
            double zs = 0.0;
            for (int k = 0; k < g.Nz; ++k) zs += g.z_weights[k] * std::norm(col[k]);
            s += herm * mult * zs;
          }
        }
        total += s * norm_fac;
      }
    }
  }
  return std::sqrt(total);
}

double conormal_norm(const VectorField& f, int m) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double v = conormal_norm(*f.grid, f.c[c], m);
    s += v * v;
  }
  return std::sqrt(s);
}

bool conormal_accuracy_warning(const VectorField& f, int m) {
  const ChannelGrid& g = *f.grid;
  return m > 4 || g.Nz < 4 * (m + 2) || std::min(g.Nx, g.Ny) < 2 * (m + 1);
}

double sup_over_time(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

double l2_over_time(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw InputError("l2_over_time: size mismatch");
  if (times.size() == 1) return values[0];
  std::vector<double> sq(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) sq[n] = values[n] * values[n];
  return std::sqrt(trapezoid(times, sq));
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size()) throw FitError("fit_rate: eps/value length mismatch");
  RateFit fit;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t n = 0; n < eps.size(); ++n) {
    if (!(eps[n] > 0.0) || !std::isfinite(eps[n])) {
      throw FitError("fit_rate: epsilon values must be positive");
    }
    if (!std::isfinite(values[n]) || values[n] < 1e-14) {
      std::ostringstream os;
      os << "excluded epsilon=" << eps[n] << " (value " << values[n] << ")";
      fit.notes.push_back(os.str());
      continue;
    }
    pts.emplace_back(eps[n], values[n]);
  }
  if (pts.size() < 3) throw FitError("fit_rate: fewer than 3 usable points");
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t n = 1; n < pts.size(); ++n) {
    if (pts[n].first == pts[n - 1].first) throw FitError("fit_rate: repeated epsilon");
  }
  const std::size_t N = pts.size();
  double mx = 0.0, my = 0.0;
  for (auto& [e, v] : pts) {
    fit.eps_values.push_back(e);
    fit.norm_values.push_back(v);
    mx += std::log(e);
    my += std::log(v);
  }
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto& [e, v] : pts) {
    const double dx = std::log(e) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (auto& [e, v] : pts) {
    const double r = std::log(v) - (fit.intercept + fit.slope * std::log(e));
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return fit;
}

AgmonResult agmon_anisotropic_check(const VectorField& f, int m, double a) {
  if (m < 3) throw ConfigError("agmon_anisotropic_check: m must be >= 3");
  const double l2 = norm_L2(f);
  if (!(l2 > 0.0)) throw InputError("agmon_anisotropic_check: zero field (0/0)");
  const double co = conormal_norm(f, m);
  const auto grad = gradient(f);
  double gco2 = 0.0;
  for (const auto& d : grad) {
    const double v = conormal_norm(d, m);
    gco2 += v * v;
  }
  const double gco = std::sqrt(gco2);
  const double dm = static_cast<double>(m);
  AgmonResult r;
  r.lhs_boundary = norm_Linf_region(f, Region::strip(a));
  r.rhs_boundary = std::pow(l2, 0.5 - 0.5 / dm) * std::pow(co, 0.5 / dm) * std::sqrt(l2 + gco);
  r.lhs_interior = norm_Linf_region(f, Region::interior(a));
  r.rhs_interior = std::pow(l2, 1.0 - 1.5 / dm) * std::pow(co, 1.5 / dm);
  r.ratio_boundary = r.lhs_boundary / r.rhs_boundary;
  r.ratio_interior = r.lhs_interior / r.rhs_interior;
  return r;
}

BoxField BoxField::sample(int dim, std::array<int, 3> n, std::array<double, 3> len,
                          const std::function<double(double, double, double)>& fn) {
  if (dim < 1 || dim > 3) throw ConfigError("BoxField: dimension must be 1, 2 or 3");
  BoxField b;
  b.dim = dim;
  for (int d = 0; d < 3; ++d) {
    b.n[d] = d < dim ? n[d] : 1;
    b.len[d] = d < dim ? len[d] : 1.0;
    if (d < dim && b.n[d] < 8) throw ConfigError("BoxField: need >= 8 nodes per direction");
  }
  b.v.resize(static_cast<std::size_t>(b.n[0]) * b.n[1] * b.n[2]);
  auto coord = [&](int d, int i) { return b.n[d] > 1 ? b.len[d] * i / (b.n[d] - 1) : 0.0; };
  for (int i = 0; i < b.n[0]; ++i)
    for (int j = 0; j < b.n[1]; ++j)
      for (int k = 0; k < b.n[2]; ++k)
        b.v[(static_cast<std::size_t>(i) * b.n[1] + j) * b.n[2] + k] =
            fn(coord(0, i), coord(1, j), coord(2, k));
  return b;
}

namespace {

std::vector<double> box_weights(const BoxField& f, int d) {
  std::vector<double> w(f.n[d], 1.0);
  if (f.n[d] == 1) return w;
  const double h = f.len[d] / (f.n[d] - 1);
  for (auto& x : w) x = h;
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double box_l2_sq(const BoxField& f, const std::vector<double>& v) {
  const auto w0 = box_weights(f, 0), w1 = box_weights(f, 1), w2 = box_weights(f, 2);
  double s = 0.0;
  for (int i = 0; i < f.n[0]; ++i)
    for (int j = 0; j < f.n[1]; ++j)
      for (int k = 0; k < f.n[2]; ++k) {
        const double x = v[(static_cast<std::size_t>(i) * f.n[1] + j) * f.n[2] + k];
        s += w0[i] * w1[j] * w2[k] * x * x;
      }
  return s;
}

// Derivative of order m along axis d, high-order uniform stencils.
std::vector<double> box_derivative(const BoxField& f, const std::vector<double>& v, int d, int m) {
  if (m == 0) return v;
  std::vector<double> x(f.n[d]);
  for (int i = 0; i < f.n[d]; ++i) x[i] = f.len[d] * i / (f.n[d] - 1);
  const int width = (m % 2 == 1) ? m + 4 : m + 3;
  const FdOperator op = FdOperator::lagrange(x, m, width, width + 1);
  std::array<std::size_t, 3> stride{static_cast<std::size_t>(f.n[1]) * f.n[2],
                                    static_cast<std::size_t>(f.n[2]), 1};
  std::vector<double> out(v.size()), line_in(f.n[d]), line_out(f.n[d]);
  const int o1 = (d + 1) % 3, o2 = (d + 2) % 3;
  for (int a = 0; a < f.n[o1]; ++a) {
    for (int b = 0; b < f.n[o2]; ++b) {
      const std::size_t base = a * stride[o1] + b * stride[o2];
      for (int i = 0; i < f.n[d]; ++i) line_in[i] = v[base + i * stride[d]];
      op.apply(line_in.data(), line_out.data());
      for (int i = 0; i < f.n[d]; ++i) out[base + i * stride[d]] = line_out[i];
    }
  }
  return out;
}

}  // namespace

double box_norm_L2(const BoxField& f) { return std::sqrt(box_l2_sq(f, f.v)); }

double box_norm_Hk(const BoxField& f, int k) {
  double s = 0.0;
  for (int a = 0; a <= k; ++a) {
    const auto va = f.dim >= 1 ? box_derivative(f, f.v, 0, a) : f.v;
    for (int b = 0; a + b <= k; ++b) {
      if (f.dim < 2 && b > 0) break;
      const auto vb = b > 0 ? box_derivative(f, va, 1, b) : va;
      for (int c = 0; a + b + c <= k; ++c) {
        if (f.dim < 3 && c > 0) break;
        const auto vc = c > 0 ? box_derivative(f, vb, 2, c) : vb;
        s += box_l2_sq(f, vc);
      }
    }
  }
  return std::sqrt(s);
}

double lemma_agmon_check(const BoxField& f, int k) {
  if (k < f.dim) throw ConfigError("lemma_agmon_check: need k >= dimension");
  double sup = 0.0;
  for (double x : f.v) sup = std::max(sup, std::abs(x));
  const double l2 = box_norm_L2(f);
  if (!(l2 > 0.0)) throw InputError("lemma_agmon_check: zero field (0/0)");
  const double hk = box_norm_Hk(f, k);
  const double e = f.dim / (2.0 * k);
  return sup / (std::pow(l2, 1.0 - e) * std::pow(hk, e));
}

Lemma1Result lemma1_ibp_check(const VectorField& f, const VectorField& g) {
  require_same_grid(f, g, "lemma1_ibp_check");
  const ChannelGrid& G = *f.grid;
  const auto gf = gradient(f);
  const auto gg = gradient(g);
  {
    const auto div = divergence(f);
    double gn = 0.0;
    for (const auto& d : gf) gn += std::pow(norm_L2(d), 2);
    if (norm_L2(G, div) > 1e-2 * std::sqrt(gn) + 1e-14) {
      throw InputError("lemma1_ibp_check: f is not divergence-free");
    }
  }
  Lemma1Result r;
  // -int lap f . g
  std::vector<double> lap(G.size()), tmp(G.size()), prod(G.size(), 0.0);
  for (int c = 0; c < 3; ++c) {
    lap_xy(G, f.c[c], lap);
    ddz(G, f.c[c], tmp, 2);
    for (std::size_t n = 0; n < G.size(); ++n) prod[n] += (lap[n] + tmp[n]) * g.c[c][n];
  }
  r.lhs = -integrate(G, prod);
  // 2 int S(f):S(g)
  std::fill(prod.begin(), prod.end(), 0.0);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (std::size_t n = 0; n < G.size(); ++n) {
        const double sf = 0.5 * (gf[b].c[a][n] + gf[a].c[b][n]);
        const double sg = 0.5 * (gg[b].c[a][n] + gg[a].c[b][n]);
        prod[n] += sf * sg;
      }
    }
  }
  const double vol = 2.0 * integrate(G, prod);
  // boundary term with outward normal -e3 at z=0, +e3 at z=h
  double bnd = 0.0;
  for (int wall = 0; wall < 2; ++wall) {
    const int k = wall == 0 ? 0 : G.Nz - 1;
    const double sign = wall == 0 ? -1.0 : 1.0;
    std::vector<double> phi_g(G.size(), 0.0);
    for (int a = 0; a < 3; ++a) {
      for (std::size_t p = 0; p < G.plane(); ++p) {
        const std::size_t n = p * G.Nz + k;
        const double s_a3 = 0.5 * (gf[2].c[a][n] + gf[a].c[2][n]);
        phi_g[n] += sign * s_a3 * g.c[a][n];
      }
    }
    bnd += integrate_plane(G, phi_g, k);
  }
  r.rhs = vol - 2.0 * bnd;
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

TraceResult trace_inequality_check(const VectorField& u) {
  const ChannelGrid& G = *u.grid;
  const double umax = u.max_abs();
  for (std::size_t p = 0; p < G.plane(); ++p) {
    for (int k : {0, G.Nz - 1}) {
      if (std::abs(u.c[2][p * G.Nz + k]) > 1e-10 * std::max(umax, 1e-300)) {
        throw InputError("trace_inequality_check: normal component nonzero at a wall");
      }
    }
  }
  TraceResult r;
  std::vector<double> sq(G.size(), 0.0);
  for (std::size_t n = 0; n < G.size(); ++n) {
    sq[n] = u.c[0][n] * u.c[0][n] + u.c[1][n] * u.c[1][n] + u.c[2][n] * u.c[2][n];
  }
  r.lhs = std::sqrt(integrate_plane(G, sq, 0) + integrate_plane(G, sq, G.Nz - 1));
  const double l2 = norm_L2(u);
  const double gr = norm_grad(u);
  r.rhs = std::sqrt(l2 * gr);
  if (gr < 1e-12) {
    r.excluded = true;
    r.ratio = std::numeric_limits<double>::infinity();
    r.note = "excluded: |grad u| < 1e-12 (right-hand side degenerates)";
    return r;
  }
  r.ratio = r.lhs / r.rhs;
  return r;
}

double shape_bc_equivalence_check(const CartesianFn& u, const TorusChart& chart, int n1, int n2,
                                  double delta) {
  if (n1 < 1 || n2 < 1 || !(delta > 0.0)) throw ConfigError("shape check: bad sampling");
  const double two_pi = 2.0 * std::acos(-1.0);
  double umax = 0.0, worst_normal = 0.0, residual = 0.0;
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const double e1 = two_pi * (i + 0.5) / n1, e2 = two_pi * (j + 0.5) / n2;
      auto U = [&](double a, double b, double xi) { return u(torus_point(chart, a, b, xi)); };
      const Vec3 u0 = U(e1, e2, 0.0);
      const Vec3 n = torus_outer_normal(e1, e2);
      const Vec3 t1 = torus_e1(e1, e2), t2 = torus_e2(e1, e2);
      umax = std::max(umax, std::sqrt(dot3(u0, u0)));
      worst_normal = std::max(worst_normal, std::abs(dot3(u0, n)));

      const Vec3 up1 = U(e1 + delta, e2, 0.0), um1 = U(e1 - delta, e2, 0.0);
      const Vec3 up2 = U(e1, e2 + delta, 0.0), um2 = U(e1, e2 - delta, 0.0);
      const Vec3 ux1 = U(e1, e2, delta), ux2 = U(e1, e2, 2.0 * delta);
      const double rho = chart.R + chart.r * std::cos(e1);
      // J[a][b] = du_a/dx_b from chart derivatives
      double J[3][3];
      for (int a = 0; a < 3; ++a) {
        const double d1 = (up1[a] - um1[a]) / (2.0 * delta) / chart.r;
        const double d2 = (up2[a] - um2[a]) / (2.0 * delta) / rho;
        const double d3 = (-3.0 * u0[a] + 4.0 * ux1[a] - ux2[a]) / (2.0 * delta);
        for (int b = 0; b < 3; ++b) J[a][b] = d1 * t1[b] + d2 * t2[b] - d3 * n[b];
      }
      Vec3 Sn{0.0, 0.0, 0.0};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) Sn[a] += 0.5 * (J[a][b] + J[b][a]) * n[b];
      const double sn_n = dot3(Sn, n);
      for (int a = 0; a < 3; ++a) Sn[a] -= sn_n * n[a];
      const auto kap = torus_curvatures(chart, e1);
      const double c1 = dot3(u0, t1), c2 = dot3(u0, t2);
      const Vec3 curl{J[2][1] - J[1][2], J[0][2] - J[2][0], J[1][0] - J[0][1]};
      const Vec3 cxn = cross3(curl, n);
      Vec3 res;
      for (int a = 0; a < 3; ++a) {
        res[a] = 2.0 * (Sn[a] + kap[0] * c1 * t1[a] + kap[1] * c2 * t2[a]) - cxn[a];
      }
      residual = std::max(residual, std::sqrt(dot3(res, res)));
    }
  }
  if (worst_normal > 1e-10 * std::max(umax, 1e-300)) {
    throw InputError("shape_bc_equivalence_check: field not tangent to the torus surface");
  }
  return residual;
}

double family_growth(const std::vector<double>& ratios) {
  if (ratios.empty() || !(ratios.front() > 0.0)) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (double r : ratios) m = std::max(m, r);
  return m / ratios.front();
}

}  // namespace navslip
