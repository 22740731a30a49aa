#include "navslip/corrector.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "navslip/errors.hpp"
#include "navslip/spectral.hpp"
#include "navslip/stencils.hpp"

namespace navslip {

BoundaryData euler_boundary_data_channel(const VectorField& u0, const FrictionTensor& A, Wall wall,
                                         double t) {
  if (wall != Wall::lower && wall != Wall::upper) {
    throw InputError("euler_boundary_data_channel: channel walls only");
  }
  const ChannelGrid& g = *u0.grid;
  const bool lower = wall == Wall::lower;
  const int kw = lower ? 0 : g.Nz - 1;
  const double scale = std::max(1.0, u0.max_abs());
  BoundaryData bd;
  bd.wall = wall;
  bd.t = t;
  bd.n1 = g.Nx;
  bd.n2 = g.Ny;
  bd.u1.resize(g.plane());
  bd.u2.resize(g.plane());
  const auto w = wall_derivative_weights(g.z_nodes, lower, 5);
  const int s = lower ? 0 : g.Nz - 5;
  const double sign = lower ? -1.0 : 1.0;
  for (int i = 0; i < g.Nx; ++i) {
    for (int j = 0; j < g.Ny; ++j) {
      const std::size_t base = g.index(i, j, 0);
      if (std::abs(u0.c[2][base + kw]) > 1e-10 * scale) {
        throw InputError("euler_boundary_data_channel: u0_3 nonzero at the " +
                         std::string(wall_name(wall)) + " wall");
      }
      double d1 = 0.0, d2 = 0.0;
      for (int q = 0; q < 5; ++q) {
        d1 += w[q] * u0.c[0][base + s + q];
        d2 += w[q] * u0.c[1][base + s + q];
      }
      const Mat2 a = A.at(g.x(i), g.y(j));
      const auto au = a.apply(u0.c[0][base + kw], u0.c[1][base + kw]);
      // lower: -(dz u - 2 A u); upper: -(dz u + 2 A u)
      bd.u1[i * g.Ny + j] = -(d1 - sign * 2.0 * au[0]);
      bd.u2[i * g.Ny + j] = -(d2 - sign * 2.0 * au[1]);
    }
  }
  return bd;
}

double LayerProfile::phi(double xi) const {
  return cutoff_profile(xi, a) * (-std::expm1(-xi / std::sqrt(eps)));
}

double LayerProfile::dphi(double xi) const {
  const double se = std::sqrt(eps);
  const double e = std::exp(-xi / se);
  return cutoff_profile_d1(xi, a) * (-std::expm1(-xi / se)) + cutoff_profile(xi, a) * e / se;
}

Vec3 channel_corrector_point(const WallValues& lower, const WallValues& upper, double z, double h,
                             double eps) {
  const LayerProfile p{h / 8.0, eps};
  const double zl = z, zr = h - z;
  const double dl = p.dphi(zl), dr = p.dphi(zr);
  return {-eps * lower.u1 * dl + eps * upper.u1 * dr, -eps * lower.u2 * dl + eps * upper.u2 * dr,
          eps * lower.div * p.phi(zl) + eps * upper.div * p.phi(zr)};
}

namespace {

void check_channel_eps(double eps, double h) {
  if (!(eps > 0.0)) throw ConfigError("corrector: epsilon must be positive");
  if (!(eps < (h / 8.0) * (h / 8.0))) {
    throw ConfigError("corrector: epsilon must be below (h/8)^2");
  }
}

std::vector<double> tangential_divergence(const ChannelGrid& g, const BoundaryData& bd) {
  Fourier2D ft(g.Nx, g.Ny, 1, g.L1, g.L2);
  std::vector<double> d(g.plane()), tmp(g.plane());
  ft.derivative(bd.u1.data(), d.data(), 1, 0);
  ft.derivative(bd.u2.data(), tmp.data(), 0, 1);
  for (std::size_t n = 0; n < d.size(); ++n) d[n] += tmp[n];
  return d;
}

}  // namespace

CorrectorField build_corrector_channel(const BoundaryData& lower, const BoundaryData& upper,
                                       GridPtr grid, double epsilon) {
  const ChannelGrid& g = *grid;
  check_channel_eps(epsilon, g.h);
  for (const BoundaryData* bd : {&lower, &upper}) {
    if (bd->n1 != g.Nx || bd->n2 != g.Ny) throw InputError("boundary data does not match grid");
  }
  CorrectorField cf;
  cf.epsilon = epsilon;
  cf.t = lower.t;
  cf.lower = lower;
  cf.upper = upper;
  cf.theta = VectorField(grid, FieldRole::corrector);
  const auto divL = tangential_divergence(g, lower);
  const auto divU = tangential_divergence(g, upper);
  const LayerProfile p{g.h / 8.0, epsilon};
  std::vector<double> phl(g.Nz), phr(g.Nz), dpl(g.Nz), dpr(g.Nz);
  for (int k = 0; k < g.Nz; ++k) {
    const double z = g.z_nodes[k];
    phl[k] = p.phi(z);
    phr[k] = p.phi(g.h - z);
    dpl[k] = p.dphi(z);
    dpr[k] = p.dphi(g.h - z);
  }
  // phi(h) = 0 exactly, so theta_3 vanishes on both walls
  for (int i = 0; i < g.Nx; ++i) {
    for (int j = 0; j < g.Ny; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * g.Ny + j;
      const double l1 = lower.u1[q], l2 = lower.u2[q], r1 = upper.u1[q], r2 = upper.u2[q];
      for (int k = 0; k < g.Nz; ++k) {
        const std::size_t n = g.index(i, j, k);
        cf.theta.c[0][n] = -epsilon * l1 * dpl[k] + epsilon * r1 * dpr[k];
        cf.theta.c[1][n] = -epsilon * l2 * dpl[k] + epsilon * r2 * dpr[k];
        cf.theta.c[2][n] = epsilon * divL[q] * phl[k] + epsilon * divU[q] * phr[k];
      }
    }
  }
  return cf;
}

CorrectorField build_corrector_channel(const VectorField& u0, const FrictionPair& A, double epsilon,
                                       double t) {
  check_channel_eps(epsilon, u0.grid->h);
  const BoundaryData lo = euler_boundary_data_channel(u0, A.lower, Wall::lower, t);
  const BoundaryData up = euler_boundary_data_channel(u0, A.upper, Wall::upper, t);
  return build_corrector_channel(lo, up, u0.grid, epsilon);
}

VectorField corrector_time_derivative(const EulerProvider& u0, const FrictionPair& A, double epsilon,
                                      double t, double dt) {
  if (!(dt > 0.0)) throw ConfigError("corrector_time_derivative: dt must be positive");
  CorrectorField p = build_corrector_channel(u0(t + dt), A, epsilon, t + dt);
  const CorrectorField m = build_corrector_channel(u0(t - dt), A, epsilon, t - dt);
  VectorField d = std::move(p.theta);
  d -= m.theta;
  d *= 1.0 / (2.0 * dt);
  d.role = FieldRole::derivative;
  return d;
}

VectorField corrector_residual_R(const CorrectorField& theta, double epsilon,
                                 const VectorField* dtheta_dt) {
  const ChannelGrid& g = *theta.theta.grid;
  VectorField R(theta.theta.grid, FieldRole::derivative);
  std::vector<double> a(g.size()), b(g.size());
  for (int c = 0; c < 3; ++c) {
    lap_xy(g, theta.theta.c[c], a);
    ddz(g, theta.theta.c[c], b, 2);
    for (std::size_t n = 0; n < g.size(); ++n) R.c[c][n] = epsilon * (a[n] + b[n]);
  }
  if (dtheta_dt) R.axpy(-1.0, *dtheta_dt);
  return R;
}

void validate_derivative_spec(const DerivativeSpec& s) {
  const bool time_ok = (s.l == 1 && s.k == 0) || (s.l == 0 && s.k >= 0 && s.k <= 2);
  if (!time_ok || s.n < 0 || s.n > 2) {
    std::ostringstream os;
    os << "derivative spec (l,k,n)=(" << s.l << "," << s.k << "," << s.n
       << ") outside admissible ranges";
    throw ConfigError(os.str());
  }
}

namespace {

std::string spec_label(const char* what, int l, int k, int n) {
  std::ostringstream os;
  os << what << "[l=" << l << ",k=" << k << ",n=" << n << "]";
  return os.str();
}

struct Accum {
  double target = 0.0;
  std::vector<double> per_eps;
};

}  // namespace

ScalingTable corrector_norm_scalings(const EulerProvider& u0, const FrictionPair& A,
                                     const std::vector<double>& eps_list,
                                     const std::vector<DerivativeSpec>& specs,
                                     const ScalingOptions& opt) {
  for (const auto& s : specs) validate_derivative_spec(s);
  if (eps_list.size() < 4) throw ConfigError("corrector scalings need at least 4 epsilon values");
  if (opt.snapshots < 1 || !(opt.T > 0.0)) throw ConfigError("corrector scalings: bad T/snapshots");

  // group requested n values by (l,k)
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (const auto& s : specs) groups[{s.l, s.k}].push_back(s.n);

  std::vector<std::string> order;
  std::map<std::string, Accum> acc;
  auto record = [&](const std::string& name, double target, std::size_t ie, double v) {
    auto it = acc.find(name);
    if (it == acc.end()) {
      order.push_back(name);
      it = acc.emplace(name, Accum{target, std::vector<double>(eps_list.size(), 0.0)}).first;
    }
    it->second.per_eps[ie] = std::max(it->second.per_eps[ie], v);
  };

  for (std::size_t ie = 0; ie < eps_list.size(); ++ie) {
    const double eps = eps_list[ie];
    for (int s = 0; s < opt.snapshots; ++s) {
      const double t = opt.snapshots == 1 ? 0.0 : opt.T * s / (opt.snapshots - 1);
      const VectorField u = u0(t);
      const ChannelGrid& g = *u.grid;
      const CorrectorField cf = build_corrector_channel(u, A, eps, t);
      VectorField dt_theta;
      bool have_dt = false;
      std::vector<double> da, db;
      for (const auto& [lk, ns] : groups) {
        const auto [l, k] = lk;
        const VectorField* src = &cf.theta;
        if (l == 1) {
          if (!have_dt) {
            dt_theta = corrector_time_derivative(u0, A, eps, t, 1e-4 * opt.T);
            have_dt = true;
          }
          src = &dt_theta;
        }
        // tangential derivatives of every order-k multi-index
        std::vector<VectorField> tang;
        for (int a = 0; a <= k; ++a) {
          VectorField d(src->grid, FieldRole::derivative);
          for (int c = 0; c < 3; ++c) ddxy(g, src->c[c], d.c[c], a, k - a);
          tang.push_back(std::move(d));
        }
        for (int n : ns) {
          double tan2 = 0.0, nrm2 = 0.0, nrm0 = 0.0;
          for (const auto& d : tang) {
            for (int c = 0; c < 2; ++c) {
              if (n == 0) {
                tan2 += std::pow(norm_L2(g, d.c[c]), 2);
              } else {
                ddz(g, d.c[c], da, n);
                tan2 += std::pow(norm_L2(g, da), 2);
              }
            }
            ddz(g, d.c[2], db, n + 1);
            nrm2 += std::pow(norm_L2(g, db), 2);
            if (n == 0) nrm0 += std::pow(norm_L2(g, d.c[2]), 2);
          }
          record(spec_label("theta_tan", l, k, n), 0.75 - 0.5 * n, ie, std::sqrt(tan2));
          if (n == 0) record(spec_label("theta_3", l, k, 0), 1.0, ie, std::sqrt(nrm0));
          record(spec_label("dz_theta_3", l, k, n), 0.75 - 0.5 * n, ie, std::sqrt(nrm2));
        }
      }
      if (opt.weighted || opt.sup) {
        const double se = std::sqrt(eps);
        std::vector<double> w(g.Nz);
        for (int k = 0; k < g.Nz; ++k) w[k] = weight_zeta(g.z_nodes[k], g.h) / se;
        double wt = 0.0, wn = 0.0, sup_tz = 0.0, sup_nz = 0.0;
        for (int c = 0; c < 3; ++c) {
          ddz(g, cf.theta.c[c], da, 1);
          if (c < 2) sup_tz = std::max(sup_tz, norm_Linf_region(g, da));
          else sup_nz = norm_Linf_region(g, da);
          for (std::size_t p = 0; p < g.plane(); ++p)
            for (int k = 0; k < g.Nz; ++k) da[p * g.Nz + k] *= w[k];
          const double v = std::pow(norm_L2(g, da), 2);
          (c < 2 ? wt : wn) += v;
        }
        if (opt.weighted) {
          record("zeta_dz_theta_tan", 0.25, ie, std::sqrt(wt));
          record("zeta_dz_theta_3", 0.5, ie, std::sqrt(wn));
        }
        if (opt.sup) {
          double sup_tt = 0.0, sup_nt = 0.0;
          for (int c = 0; c < 3; ++c) {
            for (int ax = 0; ax < 2; ++ax) {
              ddxy(g, cf.theta.c[c], da, ax == 0 ? 1 : 0, ax == 0 ? 0 : 1);
              const double m = norm_Linf_region(g, da);
              if (c < 2) sup_tt = std::max(sup_tt, m);
              else sup_nt = std::max(sup_nt, m);
            }
          }
          record("sup_dtau_theta_tan", 0.5, ie, sup_tt);
          record("sup_dz_theta_tan", 0.0, ie, sup_tz);
          record("sup_dtau_theta_3", 1.0, ie, sup_nt);
          record("sup_dz_theta_3", 0.5, ie, sup_nz);
        }
      }
    }
  }

  ScalingTable table;
  table.eps = eps_list;
  for (const auto& name : order) {
    ScalingEntry e;
    e.name = name;
    e.target = acc[name].target;
    e.values = acc[name].per_eps;
    try {
      e.fit = fit_rate(eps_list, e.values);
    } catch (const FitError& err) {
      e.error = err.what();
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

void write_corrector_csv(const CorrectorField& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const ChannelGrid& g = *c.theta.grid;
  out << "i,j,k,theta1,theta2,theta3\n";
  char buf[160];
  for (int i = 0; i < g.Nx; ++i)
    for (int j = 0; j < g.Ny; ++j)
      for (int k = 0; k < g.Nz; ++k) {
        const std::size_t n = g.index(i, j, k);
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g\n", i, j, k, c.theta.c[0][n],
                      c.theta.c[1][n], c.theta.c[2][n]);
        out << buf;
      }
  if (!out) throw IoError("write failed for " + path);
}

// ---------------- torus ----------------

TorusGrid make_torus_grid(const TorusChart& chart, int N1, int N2, int N3, double clustering) {
  if (N1 < 8 || N2 < 8) throw ConfigError("torus grid needs N1, N2 >= 8");
  if (N3 < 9) throw ConfigError("torus grid needs N3 >= 9");
  if (!(clustering >= 0.0)) throw ConfigError("torus clustering must be >= 0");
  TorusGrid g;
  g.chart = chart;
  g.N1 = N1;
  g.N2 = N2;
  g.N3 = N3;
  g.xi.resize(N3);
  const double L = 3.0 * chart.a;
  for (int k = 0; k < N3; ++k) {
    const double s = static_cast<double>(k) / (N3 - 1);
    g.xi[k] = clustering == 0.0 ? L * s
                                : L * (1.0 - std::tanh(clustering * (1.0 - s)) / std::tanh(clustering));
  }
  g.xi.front() = 0.0;
  g.xi.back() = L;
  g.xi_weights.assign(N3, 0.0);
  for (int k = 0; k + 1 < N3; ++k) {
    const double d = g.xi[k + 1] - g.xi[k];
    if (!(d > 0.0)) throw ConfigError("torus clustering too strong");
    g.xi_weights[k] += 0.5 * d;
    g.xi_weights[k + 1] += 0.5 * d;
  }
  return g;
}

Vec3 torus_corrector_point(double u1, double u2, double div, double kappa1, double kappa2,
                           double xi3, double a, double eps) {
  const LayerProfile p{a, eps};
  const double dphi = p.dphi(xi3);
  const double f1 = 1.0 - kappa1 * xi3, f2 = 1.0 - kappa2 * xi3;
  return {-eps * dphi * u1 / f2, -eps * dphi * u2 / f1, eps * p.phi(xi3) / (f1 * f2) * div};
}

TorusCorrectorField build_corrector_torus(const TorusBoundaryInput& in, const FrictionTensor& A,
                                          double epsilon, const TorusGrid& grid,
                                          const TorusCorrectorOptions& opt) {
  if (!in.u_tan || !in.strain_n) throw InputError("torus boundary input incomplete");
  if (!(epsilon > 0.0)) throw ConfigError("corrector: epsilon must be positive");
  const TorusChart& ch = grid.chart;
  if (!(epsilon < ch.a * ch.a)) throw ConfigError("torus corrector: epsilon must be below a^2");
  // validates the whole collar once
  for (double e1 : {0.0, std::acos(-1.0)}) torus_metric(ch, e1, 0.0, 3.0 * ch.a);

  TorusCorrectorField c;
  c.grid = grid;
  c.epsilon = epsilon;
  const std::size_t S = static_cast<std::size_t>(grid.N1) * grid.N2;
  c.u_tilde = {std::vector<double>(S), std::vector<double>(S)};
  c.E_error = {std::vector<double>(S), std::vector<double>(S)};
  c.div_tan.assign(S, 0.0);
  std::vector<double> g1(S), g2(S);
  for (int i = 0; i < grid.N1; ++i) {
    for (int j = 0; j < grid.N2; ++j) {
      const double e1 = grid.eta1(i), e2 = grid.eta2(j);
      const auto u = in.u_tan(e1, e2);
      const auto s = in.strain_n(e1, e2);
      const auto au = A.at(e1, e2).apply(u[0], u[1]);
      const std::size_t q = static_cast<std::size_t>(i) * grid.N2 + j;
      c.u_tilde[0][q] = 2.0 * (s[0] + au[0]);
      c.u_tilde[1][q] = 2.0 * (s[1] + au[1]);
      const double rho = ch.R + ch.r * std::cos(e1);
      g1[q] = rho * c.u_tilde[0][q];
      g2[q] = ch.r * c.u_tilde[1][q];
    }
  }
  for (int i = 0; i < grid.N1; ++i) {
    const double rho = ch.R + ch.r * std::cos(grid.eta1(i));
    for (int j = 0; j < grid.N2; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * grid.N2 + j;
      const double d1 = periodic_d1_o4(g1.data() + j, grid.N1, i, grid.d1(), grid.N2);
      const double d2 = periodic_d1_o4(g2.data() + static_cast<std::size_t>(i) * grid.N2,
                                       grid.N2, j, grid.d2(), 1);
      c.div_tan[q] = (d1 + d2) / (ch.r * rho);
    }
  }
  for (auto& comp : c.theta) comp.assign(grid.size(), 0.0);
  for (int i = 0; i < grid.N1; ++i) {
    auto kap = torus_curvatures(ch, grid.eta1(i));
    if (opt.flat_limit) kap = {0.0, 0.0};
    for (int j = 0; j < grid.N2; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * grid.N2 + j;
      const double u1 = c.u_tilde[0][q], u2 = c.u_tilde[1][q];
      c.E_error[0][q] = kap[1] * u1;
      c.E_error[1][q] = kap[0] * u2;
      for (int k = 0; k < grid.N3; ++k) {
        const Vec3 th =
            torus_corrector_point(u1, u2, c.div_tan[q], kap[0], kap[1], grid.xi[k], ch.a, epsilon);
        const std::size_t n = grid.index(i, j, k);
        c.theta[0][n] = th[0];
        c.theta[1][n] = th[1];
        c.theta[2][n] = th[2];
      }
    }
  }
  return c;
}

double torus_metric_divergence(const TorusCorrectorField& c) {
  const TorusGrid& g = c.grid;
  const std::size_t N = g.size();
  std::vector<double> P1(N), P2(N), P3(N), sq(N);
  for (int i = 0; i < g.N1; ++i) {
    for (int j = 0; j < g.N2; ++j) {
      for (int k = 0; k < g.N3; ++k) {
        const TorusMetric m = torus_metric(g.chart, g.eta1(i), g.eta2(j), g.xi[k]);
        const std::size_t n = g.index(i, j, k);
        sq[n] = m.sqrt_q;
        P1[n] = m.sqrt_q / std::sqrt(m.q11) * c.theta[0][n];
        P2[n] = m.sqrt_q / std::sqrt(m.q22) * c.theta[1][n];
        P3[n] = m.sqrt_q * c.theta[2][n];
      }
    }
  }
  const FdOperator dxi = FdOperator::lagrange(g.xi, 1, 3, 3);
  std::vector<double> d3(g.N3);
  double worst = 0.0;
  for (int i = 0; i < g.N1; ++i) {
    for (int j = 0; j < g.N2; ++j) {
      dxi.apply(P3.data() + g.index(i, j, 0), d3.data());
      for (int k = 0; k < g.N3; ++k) {
        const std::size_t n = g.index(i, j, k);
        const double a = periodic_d1_o4(P1.data() + g.index(0, j, k), g.N1, i, g.d1(),
                                        g.N2 * g.N3);
        const double b = periodic_d1_o4(P2.data() + g.index(i, 0, k), g.N2, j, g.d2(), g.N3);
        worst = std::max(worst, std::abs((a + b + d3[k]) / sq[n]));
      }
    }
  }
  return worst;
}

double torus_neumann_residual(const TorusCorrectorField& c, int points) {
  const TorusGrid& g = c.grid;
  const double se = std::sqrt(c.epsilon);
  double worst = 0.0;
  for (int i = 0; i < g.N1; ++i) {
    for (int j = 0; j < g.N2; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * g.N2 + j;
      for (int comp = 0; comp < 2; ++comp) {
        const double d =
            wall_derivative(g.xi, c.theta[comp].data() + g.index(i, j, 0), true, points);
        const double target = c.u_tilde[comp][q] - se * c.E_error[comp][q];
        worst = std::max(worst, std::abs(d - target));
      }
    }
  }
  return worst;
}

double torus_norm_L2(const TorusCorrectorField& c, const std::vector<double>& f) {
  const TorusGrid& g = c.grid;
  double s = 0.0;
  for (int i = 0; i < g.N1; ++i) {
    for (int j = 0; j < g.N2; ++j) {
      for (int k = 0; k < g.N3; ++k) {
        const TorusMetric m = torus_metric(g.chart, g.eta1(i), g.eta2(j), g.xi[k]);
        const double v = f[g.index(i, j, k)];
        s += m.sqrt_q * g.xi_weights[k] * v * v;
      }
    }
  }
  return std::sqrt(s * g.d1() * g.d2());
}

}  // namespace navslip
