#include "navslip/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "navslip/analysis.hpp"
#include "navslip/errors.hpp"
#include "navslip/spectral.hpp"
#include "navslip/stencils.hpp"

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab, const int* ldab,
             int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs,
             const double* ab, const int* ldab, const int* ipiv, double* b, const int* ldb,
             int* info, std::size_t trans_len);
}

namespace navslip {

namespace {

// Banded LU (LAPACK general band storage).
class BandLU {
 public:
  BandLU() = default;
  BandLU(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ld_) * n, 0.0),
        piv_(n) {}

  void set(int i, int j, double v) { ab_[static_cast<std::size_t>(j) * ld_ + kl_ + ku_ + i - j] = v; }
  void add(int i, int j, double v) { ab_[static_cast<std::size_t>(j) * ld_ + kl_ + ku_ + i - j] += v; }

  void factor() {
    int info = 0;
    dgbtrf_(&n_, &n_, &kl_, &ku_, ab_.data(), &ld_, piv_.data(), &info);
    if (info != 0) throw SolverError("banded LU: singular matrix (info=" + std::to_string(info) + ")");
  }

  void solve(double* b) const {
    int info = 0, nrhs = 1;
    const char tr = 'N';
    dgbtrs_(&tr, &n_, &kl_, &ku_, &nrhs, ab_.data(), &ld_, piv_.data(), b, &n_, &info, 1);
    if (info != 0) throw SolverError("banded solve failed");
  }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0, ld_ = 0;
  std::vector<double> ab_;
  std::vector<int> piv_;
};

// RK3 coefficients (low-storage IMEX, three substeps).
constexpr double kGamma[3] = {8.0 / 15.0, 5.0 / 12.0, 3.0 / 4.0};
constexpr double kZeta[3] = {0.0, -17.0 / 60.0, -5.0 / 12.0};
constexpr double kAlpha[3] = {4.0 / 15.0, 1.0 / 15.0, 1.0 / 6.0};
constexpr double kBeta[3] = {4.0 / 15.0, 1.0 / 15.0, 1.0 / 6.0};
constexpr double kStage[3] = {0.0, 8.0 / 15.0, 2.0 / 3.0};

bool mode_is_mean(const Fourier2D& ft, int i, int j) {
  return ft.kx_odd(i) == 0.0 && ft.ky_odd(j) == 0.0;
}

// Operators shared by projection and time stepping.
struct ChannelOps {
  GridPtr grid;
  Fourier2D ft;
  FdOperator D;    // summation-by-parts first derivative
  FdOperator Dzz;  // second derivative
  std::vector<double> wlo, whi;  // 3-point wall derivatives
  std::vector<BandLU> proj;      // per mode, empty for mean-like modes
  std::vector<char> proj_ok;

  explicit ChannelOps(GridPtr g)
      : grid(g),
        ft(g->Nx, g->Ny, g->Nz, g->L1, g->L2),
        D(FdOperator::sbp_first(g->z_nodes)),
        Dzz(FdOperator::lagrange(g->z_nodes, 2, 3, 4)),
        wlo(wall_derivative_weights(g->z_nodes, true, 3)),
        whi(wall_derivative_weights(g->z_nodes, false, 3)) {}

  int nz() const { return grid->Nz; }
  int nmodes() const { return ft.Nx() * ft.nky(); }
  std::size_t mode_offset(int i, int j) const {
    return (static_cast<std::size_t>(i) * ft.nky() + j) * nz();
  }

  void build_projection() {
    const int N = nz();
    proj.assign(nmodes(), BandLU());
    proj_ok.assign(nmodes(), 0);
    // D Z D with wall rows of the inner gradient removed
    std::vector<std::vector<std::pair<int, double>>> dzd(N);
    for (int k = 0; k < N; ++k) {
      const auto& rk = D.row(k);
      for (std::size_t a = 0; a < rk.size(); ++a) {
        const int j = D.row_start(k) + static_cast<int>(a);
        if (j == 0 || j == N - 1) continue;
        const auto& rj = D.row(j);
        for (std::size_t b = 0; b < rj.size(); ++b) {
          dzd[k].emplace_back(D.row_start(j) + static_cast<int>(b), rk[a] * rj[b]);
        }
      }
    }
    for (int i = 0; i < ft.Nx(); ++i) {
      for (int j = 0; j < ft.nky(); ++j) {
        if (mode_is_mean(ft, i, j)) continue;
        const double k2 = ft.kx_odd(i) * ft.kx_odd(i) + ft.ky_odd(j) * ft.ky_odd(j);
        BandLU lu(N, 2, 2);
        for (int k = 0; k < N; ++k) {
          lu.add(k, k, -k2);
          for (auto [m, v] : dzd[k]) lu.add(k, m, v);
        }
        lu.factor();
        const int q = i * ft.nky() + j;
        proj[q] = std::move(lu);
        proj_ok[q] = 1;
      }
    }
  }

  // Projects spectral velocity in place; returns the potential phi (spectral).
  void project(std::array<std::vector<cplx>, 3>& uh, std::vector<cplx>* phi_out) {
    if (proj.empty()) build_projection();
    const int N = nz();
    std::vector<double> re(N), im(N), tmp_re(N), tmp_im(N);
    if (phi_out) phi_out->assign(ft.spectral_size(), cplx(0.0, 0.0));
    for (int i = 0; i < ft.Nx(); ++i) {
      for (int j = 0; j < ft.nky(); ++j) {
        const std::size_t off = mode_offset(i, j);
        cplx* u1 = uh[0].data() + off;
        cplx* u2 = uh[1].data() + off;
        cplx* u3 = uh[2].data() + off;
        const int q = i * ft.nky() + j;
        if (!proj_ok[q]) {
          for (int k = 0; k < N; ++k) u3[k] = 0.0;
          continue;
        }
        const cplx ikx(0.0, ft.kx_odd(i)), iky(0.0, ft.ky_odd(j));
        for (int k = 0; k < N; ++k) {
          tmp_re[k] = u3[k].real();
          tmp_im[k] = u3[k].imag();
        }
        D.apply(tmp_re.data(), re.data());
        D.apply(tmp_im.data(), im.data());
        for (int k = 0; k < N; ++k) {
          const cplx d = ikx * u1[k] + iky * u2[k] + cplx(re[k], im[k]);
          re[k] = d.real();
          im[k] = d.imag();
        }
        proj[q].solve(re.data());
        proj[q].solve(im.data());
        D.apply(re.data(), tmp_re.data());
        D.apply(im.data(), tmp_im.data());
        for (int k = 0; k < N; ++k) {
          const cplx phi(re[k], im[k]);
          u1[k] -= ikx * phi;
          u2[k] -= iky * phi;
          if (k != 0 && k != N - 1) u3[k] -= cplx(tmp_re[k], tmp_im[k]);
        }
        if (phi_out) {
          for (int k = 0; k < N; ++k) (*phi_out)[off + k] = cplx(re[k], im[k]);
        }
      }
    }
  }

  void to_spectral(const VectorField& u, std::array<std::vector<cplx>, 3>& uh) const {
    for (int c = 0; c < 3; ++c) {
      uh[c].resize(ft.spectral_size());
      ft.forward(u.c[c].data(), uh[c].data());
    }
  }

  void to_physical(const std::array<std::vector<cplx>, 3>& uh, VectorField& u) const {
    for (int c = 0; c < 3; ++c) ft.backward(uh[c].data(), u.c[c].data());
  }

  std::vector<double> divergence_phys(const std::array<std::vector<cplx>, 3>& uh) const {
    const int N = nz();
    std::vector<cplx> dh(ft.spectral_size());
    std::vector<double> re(N), im(N), dre(N), dim(N);
    for (int i = 0; i < ft.Nx(); ++i) {
      for (int j = 0; j < ft.nky(); ++j) {
        const std::size_t off = mode_offset(i, j);
        const cplx ikx(0.0, ft.kx_odd(i)), iky(0.0, ft.ky_odd(j));
        for (int k = 0; k < N; ++k) {
          re[k] = uh[2][off + k].real();
          im[k] = uh[2][off + k].imag();
        }
        D.apply(re.data(), dre.data());
        D.apply(im.data(), dim.data());
        for (int k = 0; k < N; ++k) {
          dh[off + k] = ikx * uh[0][off + k] + iky * uh[1][off + k] + cplx(dre[k], dim[k]);
        }
      }
    }
    std::vector<double> d(grid->size());
    ft.backward(dh.data(), d.data());
    return d;
  }
};

double energy_of(const VectorField& u) {
  const ChannelGrid& g = *u.grid;
  std::vector<double> e(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    e[n] = 0.5 * (u.c[0][n] * u.c[0][n] + u.c[1][n] * u.c[1][n] + u.c[2][n] * u.c[2][n]);
  }
  return integrate(g, e);
}

double cfl_rate(const VectorField& u) {
  const ChannelGrid& g = *u.grid;
  std::vector<double> inv_dz(g.Nz);
  for (int k = 0; k < g.Nz; ++k) {
    double d = 1e300;
    if (k > 0) d = std::min(d, g.z_nodes[k] - g.z_nodes[k - 1]);
    if (k + 1 < g.Nz) d = std::min(d, g.z_nodes[k + 1] - g.z_nodes[k]);
    inv_dz[k] = 1.0 / d;
  }
  double m = 0.0;
  for (std::size_t p = 0; p < g.plane(); ++p) {
    for (int k = 0; k < g.Nz; ++k) {
      const std::size_t n = p * g.Nz + k;
      m = std::max(m, std::abs(u.c[0][n]) / g.dx() + std::abs(u.c[1][n]) / g.dy() +
                          std::abs(u.c[2][n]) * inv_dz[k]);
    }
  }
  return m;
}

void check_initial(const VectorField& u, const char* who) {
  const ChannelGrid& g = *u.grid;
  const double scale = std::max(1e-300, u.max_abs());
  for (std::size_t p = 0; p < g.plane(); ++p) {
    if (std::abs(u.c[2][p * g.Nz]) > 1e-10 * scale ||
        std::abs(u.c[2][p * g.Nz + g.Nz - 1]) > 1e-10 * scale) {
      throw InputError(std::string(who) + ": initial u3 must vanish on the walls");
    }
  }
}

double robin_residual_impl(const VectorField& u, const FrictionPair& A, const ChannelOps& ops) {
  const ChannelGrid& g = *u.grid;
  const int N = g.Nz;
  const Mat2 al = A.lower.constant_value(), au = A.upper.constant_value();
  double worst = 0.0;
  for (std::size_t p = 0; p < g.plane(); ++p) {
    const std::size_t b = p * N;
    double d[2][2];
    for (int c = 0; c < 2; ++c) {
      d[c][0] = d[c][1] = 0.0;
      for (int q = 0; q < 3; ++q) {
        d[c][0] += ops.wlo[q] * u.c[c][b + q];
        d[c][1] += ops.whi[q] * u.c[c][b + N - 3 + q];
      }
    }
    const auto aL = al.apply(u.c[0][b], u.c[1][b]);
    const auto aU = au.apply(u.c[0][b + N - 1], u.c[1][b + N - 1]);
    for (int c = 0; c < 2; ++c) {
      worst = std::max(worst, std::abs(d[c][0] - 2.0 * aL[c]));
      worst = std::max(worst, std::abs(d[c][1] + 2.0 * aU[c]));
    }
  }
  return worst;
}

class Integrator {
 public:
  Integrator(const VectorField& u_init, const Forcing& f, double eps, const FrictionPair& A,
             const SolverOptions& opt)
      : ops_(u_init.grid), f_(f), eps_(eps), A_(A), opt_(opt), u_(u_init) {
    u_.role = FieldRole::physical;
    ops_.build_projection();
    if (eps_ > 0.0) {
      if (!A.lower.is_constant() || !A.upper.is_constant()) {
        throw UnsupportedError("ns_solve: position-dependent friction tensors are not supported");
      }
      check_robin_conditioning();
    }
  }

  Trajectory run(double T) {
    if (!(T > 0.0)) throw ConfigError("solver: T must be positive");
    if (opt_.snapshots < 1) throw ConfigError("solver: snapshots must be >= 1");

    // project the initial data so every stored state is discretely solenoidal
    ops_.to_spectral(u_, uh_);
    ops_.project(uh_, nullptr);
    ops_.to_physical(uh_, u_);
    ph_.assign(ops_.ft.spectral_size(), cplx(0.0, 0.0));

    const double cadence = T / opt_.snapshots;
    const double rate = cfl_rate(u_);
    double dt = opt_.dt;
    if (dt <= 0.0) dt = rate > 0.0 ? opt_.cfl / rate : cadence / 10.0;
    if (rate * dt > opt_.cfl_max) {
      std::ostringstream os;
      os << "CFL " << rate * dt << " exceeds limit " << opt_.cfl_max << " at t=0 (dt=" << dt << ")";
      throw StepSizeError(os.str());
    }
    const int per_snap = std::max(1, static_cast<int>(std::ceil(cadence / dt - 1e-9)));
    dt = cadence / per_snap;

    double ref = u_.max_abs();
    if (!f_.is_zero()) {
      const VectorField f0 = forcing_at(0.0);
      ref = std::max(ref, f0.max_abs() * T);
    }
    ref = std::max(ref, 1e-12);

    Trajectory tr;
    tr.cadence = cadence;
    tr.dt = dt;
    double t = 0.0;
    store(tr, t);
    if (opt_.record_diagnostics) tr.diagnostics.push_back(diagnose(t));
    int step = 0;
    for (int s = 1; s <= opt_.snapshots; ++s) {
      for (int q = 0; q < per_snap; ++q) {
        advance(t, dt, step < opt_.damping_steps);
        ++step;
        t = dt * step;
        const double umax = u_.max_abs();
        if (!std::isfinite(umax) || umax > opt_.blowup_factor * ref) {
          std::ostringstream os;
          os << "blow-up detected at t=" << t << ": max|u|=" << umax << " (reference " << ref << ")";
          throw BlowUpError(os.str());
        }
        const double c = cfl_rate(u_) * dt;
        if (c > opt_.cfl_max) {
          std::ostringstream os;
          os << "CFL " << c << " exceeds limit " << opt_.cfl_max << " at t=" << t << " (dt=" << dt
             << ")";
          throw StepSizeError(os.str());
        }
        if (opt_.record_diagnostics) tr.diagnostics.push_back(diagnose(t));
      }
      store(tr, cadence * s);
    }
    return tr;
  }

 private:
  ChannelOps ops_;
  Forcing f_;
  double eps_;
  FrictionPair A_;
  SolverOptions opt_;
  VectorField u_;
  std::array<std::vector<cplx>, 3> uh_;
  std::vector<cplx> ph_;
  std::map<std::pair<int, int>, std::vector<BandLU>> helm_;  // (substep, damped) -> per mode

  void check_robin_conditioning() const {
    const ChannelGrid& g = *u_.grid;
    const double dz0 = g.z_nodes[1] - g.z_nodes[0];
    const Mat2 al = A_.lower.constant_value(), au = A_.upper.constant_value();
    const Mat2 ml{ops_.wlo[0] - 2.0 * al.a11, -2.0 * al.a12, -2.0 * al.a21, ops_.wlo[0] - 2.0 * al.a22};
    const Mat2 mu{ops_.whi[2] + 2.0 * au.a11, 2.0 * au.a12, 2.0 * au.a21, ops_.whi[2] + 2.0 * au.a22};
    for (const Mat2& m : {ml, mu}) {
      const double det = std::abs(m.a11 * m.a22 - m.a12 * m.a21);
      const double smin = det / std::max(m.norm2(), 1e-300);
      if (smin * dz0 < 0.05) {
        throw ConfigError("ns_solve: Robin wall rows nearly singular (|1 -+ 2 alpha dz| ~ 0)");
      }
    }
  }

  VectorField forcing_at(double t) const {
    VectorField f(u_.grid, FieldRole::generic);
    if (f_.is_zero()) return f;
    const ChannelGrid& g = *u_.grid;
    for (int i = 0; i < g.Nx; ++i)
      for (int j = 0; j < g.Ny; ++j)
        for (int k = 0; k < g.Nz; ++k) {
          const Vec3 v = f_.fn(g.x(i), g.y(j), g.z_nodes[k], t);
          const std::size_t n = g.index(i, j, k);
          f.c[0][n] = v[0];
          f.c[1][n] = v[1];
          f.c[2][n] = v[2];
        }
    return f;
  }

  // Skew-symmetric advection -1/2 [u.grad u + div(u u)] plus forcing, spectral.
  std::array<std::vector<cplx>, 3> rhs_explicit(double t) {
    const ChannelGrid& g = *u_.grid;
    const Fourier2D& ft = ops_.ft;
    const std::size_t S = ft.spectral_size(), P = g.size();
    const int N = g.Nz;
    std::array<std::vector<cplx>, 3> out;
    std::vector<cplx> tmp(S), a(S), b(S);
    std::vector<double> dx(P), dy(P), phys(P), prod(P), line(N);
    const VectorField f = forcing_at(t);
    for (int c = 0; c < 3; ++c) {
      ft.derivative(u_.c[c].data(), dx.data(), 1, 0);
      ft.derivative(u_.c[c].data(), dy.data(), 0, 1);
      // convective part and z part of the divergence form, physical
      for (std::size_t p = 0; p < g.plane(); ++p) {
        const std::size_t o = p * N;
        ops_.D.apply(u_.c[c].data() + o, line.data());
        for (int k = 0; k < N; ++k) {
          const std::size_t n = o + k;
          phys[n] = u_.c[0][n] * dx[n] + u_.c[1][n] * dy[n] + u_.c[2][n] * line[k];
          prod[n] = u_.c[2][n] * u_.c[c][n];
        }
        ops_.D.apply(prod.data() + o, line.data());
        for (int k = 0; k < N; ++k) phys[o + k] += line[k];
      }
      ft.forward(phys.data(), tmp.data());
      for (std::size_t n = 0; n < P; ++n) prod[n] = u_.c[0][n] * u_.c[c][n];
      ft.forward(prod.data(), a.data());
      for (std::size_t n = 0; n < P; ++n) prod[n] = u_.c[1][n] * u_.c[c][n];
      ft.forward(prod.data(), b.data());
      out[c].resize(S);
      std::vector<cplx> fh;
      if (!f_.is_zero()) {
        fh.resize(S);
        ft.forward(f.c[c].data(), fh.data());
      }
      for (int i = 0; i < ft.Nx(); ++i) {
        for (int j = 0; j < ft.nky(); ++j) {
          const std::size_t off = ops_.mode_offset(i, j);
          const cplx ikx(0.0, ft.kx_odd(i)), iky(0.0, ft.ky_odd(j));
          for (int k = 0; k < N; ++k) {
            cplx v = -0.5 * (tmp[off + k] + ikx * a[off + k] + iky * b[off + k]);
            if (!fh.empty()) v += fh[off + k];
            out[c][off + k] = v;
          }
        }
      }
    }
    return out;
  }

  const std::vector<BandLU>& helmholtz(int sub, bool damped, double dt) {
    const auto key = std::make_pair(sub, damped ? 1 : 0);
    auto it = helm_.find(key);
    if (it != helm_.end()) return it->second;
    const double w = damped ? kAlpha[sub] + kBeta[sub] : kBeta[sub];
    const double c = w * dt * eps_;
    const Fourier2D& ft = ops_.ft;
    const int N = ops_.nz();
    const Mat2 al = A_.lower.constant_value(), au = A_.upper.constant_value();
    const double alo[2][2] = {{al.a11, al.a12}, {al.a21, al.a22}};
    const double aup[2][2] = {{au.a11, au.a12}, {au.a21, au.a22}};
    // per mode: tangential coupled system (2N) followed by the u3 system (N)
    std::vector<BandLU> lus;
    lus.reserve(2 * ops_.nmodes());
    for (int i = 0; i < ft.Nx(); ++i) {
      for (int j = 0; j < ft.nky(); ++j) {
        const double k2 = ft.kx(i) * ft.kx(i) + ft.ky(j) * ft.ky(j);
        BandLU t(2 * N, 4, 4);
        for (int comp = 0; comp < 2; ++comp) {
          const int r0 = comp, rN = 2 * (N - 1) + comp;
          for (int q = 0; q < 3; ++q) {
            t.add(r0, 2 * q + comp, ops_.wlo[q]);
            t.add(rN, 2 * (N - 3 + q) + comp, ops_.whi[q]);
          }
          for (int b = 0; b < 2; ++b) {
            t.add(r0, b, -2.0 * alo[comp][b]);
            t.add(rN, 2 * (N - 1) + b, 2.0 * aup[comp][b]);
          }
          for (int k = 1; k < N - 1; ++k) {
            const int r = 2 * k + comp;
            t.add(r, r, 1.0 + c * k2);
            const auto& row = ops_.Dzz.row(k);
            for (std::size_t q = 0; q < row.size(); ++q) {
              t.add(r, 2 * (ops_.Dzz.row_start(k) + static_cast<int>(q)) + comp, -c * row[q]);
            }
          }
        }
        t.factor();
        lus.push_back(std::move(t));
        BandLU n3(N, 1, 1);
        n3.set(0, 0, 1.0);
        n3.set(N - 1, N - 1, 1.0);
        for (int k = 1; k < N - 1; ++k) {
          n3.add(k, k, 1.0 + c * k2);
          const auto& row = ops_.Dzz.row(k);
          for (std::size_t q = 0; q < row.size(); ++q) {
            n3.add(k, ops_.Dzz.row_start(k) + static_cast<int>(q), -c * row[q]);
          }
        }
        n3.factor();
        lus.push_back(std::move(n3));
      }
    }
    return helm_.emplace(key, std::move(lus)).first->second;
  }

  void advance(double t, double dt, bool damped) {
    const Fourier2D& ft = ops_.ft;
    const int N = ops_.nz();
    const std::size_t S = ft.spectral_size();
    std::array<std::vector<cplx>, 3> nprev;
    std::vector<double> re(N), im(N), lre(N), lim(N), big_re(2 * N), big_im(2 * N);
    for (int sub = 0; sub < 3; ++sub) {
      auto nl = rhs_explicit(t + kStage[sub] * dt);
      const double alpha = damped ? 0.0 : kAlpha[sub];
      const double cdt = (kAlpha[sub] + kBeta[sub]) * dt;
      std::array<std::vector<cplx>, 3> r;
      for (int c = 0; c < 3; ++c) r[c].assign(S, cplx(0.0, 0.0));
      const std::vector<BandLU>* lus = eps_ > 0.0 ? &helmholtz(sub, damped, dt) : nullptr;
      for (int i = 0; i < ft.Nx(); ++i) {
        for (int j = 0; j < ft.nky(); ++j) {
          const std::size_t off = ops_.mode_offset(i, j);
          const double k2 = ft.kx(i) * ft.kx(i) + ft.ky(j) * ft.ky(j);
          const cplx ikx(0.0, ft.kx_odd(i)), iky(0.0, ft.ky_odd(j));
          // pressure gradient of the previous estimate
          for (int k = 0; k < N; ++k) {
            re[k] = ph_[off + k].real();
            im[k] = ph_[off + k].imag();
          }
          ops_.D.apply(re.data(), lre.data());
          ops_.D.apply(im.data(), lim.data());
          for (int c = 0; c < 3; ++c) {
            cplx* rc = r[c].data() + off;
            const cplx* uc = uh_[c].data() + off;
            for (int k = 0; k < N; ++k) {
              cplx v = uc[k] + kGamma[sub] * dt * nl[c][off + k];
              if (sub > 0) v += kZeta[sub] * dt * nprev[c][off + k];
              cplx gp;
              if (c == 0) gp = ikx * ph_[off + k];
              else if (c == 1) gp = iky * ph_[off + k];
              else gp = (k == 0 || k == N - 1) ? cplx(0.0) : cplx(lre[k], lim[k]);
              v -= cdt * gp;
              rc[k] = v;
            }
            if (eps_ > 0.0 && alpha > 0.0) {
              for (int k = 0; k < N; ++k) {
                re[k] = uc[k].real();
                im[k] = uc[k].imag();
              }
              for (int k = 1; k < N - 1; ++k) {
                const double zr = ops_.Dzz.apply_row(k, re.data());
                const double zi = ops_.Dzz.apply_row(k, im.data());
                rc[k] += alpha * dt * eps_ * (cplx(zr, zi) - k2 * uc[k]);
              }
            }
          }
          if (eps_ > 0.0) {
            const int q = i * ft.nky() + j;
            const BandLU& tl = (*lus)[2 * q];
            const BandLU& nl3 = (*lus)[2 * q + 1];
            for (int k = 0; k < N; ++k) {
              for (int c = 0; c < 2; ++c) {
                big_re[2 * k + c] = r[c][off + k].real();
                big_im[2 * k + c] = r[c][off + k].imag();
              }
            }
            for (int c = 0; c < 2; ++c) {
              big_re[c] = big_im[c] = 0.0;
              big_re[2 * (N - 1) + c] = big_im[2 * (N - 1) + c] = 0.0;
            }
            tl.solve(big_re.data());
            tl.solve(big_im.data());
            for (int k = 0; k < N; ++k) {
              for (int c = 0; c < 2; ++c) r[c][off + k] = cplx(big_re[2 * k + c], big_im[2 * k + c]);
            }
            for (int k = 0; k < N; ++k) {
              re[k] = r[2][off + k].real();
              im[k] = r[2][off + k].imag();
            }
            re[0] = im[0] = re[N - 1] = im[N - 1] = 0.0;
            nl3.solve(re.data());
            nl3.solve(im.data());
            for (int k = 0; k < N; ++k) r[2][off + k] = cplx(re[k], im[k]);
          } else {
            r[2][off] = r[2][off + N - 1] = 0.0;
          }
        }
      }
      std::vector<cplx> phi;
      ops_.project(r, &phi);
      for (std::size_t n = 0; n < S; ++n) ph_[n] += phi[n] / cdt;
      uh_ = std::move(r);
      nprev = std::move(nl);
      ops_.to_physical(uh_, u_);
    }
  }

  StepDiagnostics diagnose(double t) const {
    StepDiagnostics d;
    d.t = t;
    d.energy = energy_of(u_);
    const auto div = ops_.divergence_phys(uh_);
    for (double v : div) d.div_max = std::max(d.div_max, std::abs(v));
    d.robin_residual = eps_ > 0.0 ? robin_residual_impl(u_, A_, ops_) : 0.0;
    return d;
  }

  void store(Trajectory& tr, double t) const {
    FlowState s;
    s.u = u_;
    s.p = ScalarField(u_.grid);
    ops_.ft.backward(ph_.data(), s.p.v.data());
    s.t = t;
    s.epsilon = eps_;
    s.A = A_;
    tr.snapshots.push_back(std::move(s));
  }
};

}  // namespace

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  for (const auto& s : snapshots) t.push_back(s.t);
  return t;
}

Trajectory euler_solve(const VectorField& u_init, const Forcing& f, double T,
                       const SolverOptions& opt) {
  check_initial(u_init, "euler_solve");
  Integrator it(u_init, f, 0.0, FrictionPair{}, opt);
  return it.run(T);
}

Trajectory ns_solve(const VectorField& u_init, const Forcing& f, double epsilon,
                    const FrictionPair& A, double T, const SolverOptions& opt) {
  if (!(epsilon > 0.0)) throw ConfigError("ns_solve: epsilon must be positive");
  check_initial(u_init, "ns_solve");
  Integrator it(u_init, f, epsilon, A, opt);
  return it.run(T);
}

void project_divergence_free(VectorField& u) {
  ChannelOps ops(u.grid);
  std::array<std::vector<cplx>, 3> uh;
  ops.to_spectral(u, uh);
  const ChannelGrid& g = *u.grid;
  for (int i = 0; i < ops.ft.Nx(); ++i)
    for (int j = 0; j < ops.ft.nky(); ++j) {
      const std::size_t off = ops.mode_offset(i, j);
      uh[2][off] = uh[2][off + g.Nz - 1] = 0.0;
    }
  ops.project(uh, nullptr);
  ops.to_physical(uh, u);
}

std::vector<double> solver_divergence(const VectorField& u) {
  ChannelOps ops(u.grid);
  std::array<std::vector<cplx>, 3> uh;
  ops.to_spectral(u, uh);
  return ops.divergence_phys(uh);
}

double robin_residual(const VectorField& u, const FrictionPair& A) {
  if (!A.lower.is_constant() || !A.upper.is_constant()) {
    throw UnsupportedError("robin_residual: constant friction tensors only");
  }
  ChannelOps ops(u.grid);
  return robin_residual_impl(u, A, ops);
}

// ---------------- 1-D oracle ----------------

namespace {

struct Blk {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
};
Blk mul(const Blk& x, const Blk& y) {
  return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
          x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
}
Blk inv(const Blk& x) {
  const double d = x.a11 * x.a22 - x.a12 * x.a21;
  if (std::abs(d) < 1e-300) throw SolverError("oracle: singular block");
  return {x.a22 / d, -x.a12 / d, -x.a21 / d, x.a11 / d};
}
Blk sub(const Blk& x, const Blk& y) {
  return {x.a11 - y.a11, x.a12 - y.a12, x.a21 - y.a21, x.a22 - y.a22};
}
std::array<double, 2> bapply(const Blk& x, const std::array<double, 2>& v) {
  return {x.a11 * v[0] + x.a12 * v[1], x.a21 * v[0] + x.a22 * v[1]};
}

// Block tridiagonal system (I - c L) u = r with ghost-point Robin rows.
class OracleSystem {
 public:
  OracleSystem(int N, double dz, const Mat2& al, const Mat2& au) : N_(N), dz_(dz), al_(al), au_(au) {}

  // L applied to (u1,u2).
  void apply_L(const std::vector<double>& u1, const std::vector<double>& u2, std::vector<double>& o1,
               std::vector<double>& o2) const {
    const double s = 1.0 / (dz_ * dz_);
    const int N = N_;
    o1.resize(N);
    o2.resize(N);
    for (int k = 1; k < N - 1; ++k) {
      o1[k] = s * (u1[k - 1] - 2.0 * u1[k] + u1[k + 1]);
      o2[k] = s * (u2[k - 1] - 2.0 * u2[k] + u2[k + 1]);
    }
    const auto aL = al_.apply(u1[0], u2[0]);
    o1[0] = s * (2.0 * u1[1] - 2.0 * u1[0]) - 4.0 / dz_ * aL[0];
    o2[0] = s * (2.0 * u2[1] - 2.0 * u2[0]) - 4.0 / dz_ * aL[1];
    const auto aU = au_.apply(u1[N - 1], u2[N - 1]);
    o1[N - 1] = s * (2.0 * u1[N - 2] - 2.0 * u1[N - 1]) - 4.0 / dz_ * aU[0];
    o2[N - 1] = s * (2.0 * u2[N - 2] - 2.0 * u2[N - 1]) - 4.0 / dz_ * aU[1];
  }

  void factor(double c) {
    c_ = c;
    const double s = c / (dz_ * dz_);
    const int N = N_;
    A_.assign(N, {});
    B_.assign(N, {});
    C_.assign(N, {});
    for (int k = 0; k < N; ++k) {
      B_[k] = {1.0 + 2.0 * s, 0.0, 0.0, 1.0 + 2.0 * s};
      if (k > 0) A_[k] = {-s, 0.0, 0.0, -s};
      if (k < N - 1) C_[k] = {-s, 0.0, 0.0, -s};
    }
    C_[0] = {-2.0 * s, 0.0, 0.0, -2.0 * s};
    A_[N - 1] = {-2.0 * s, 0.0, 0.0, -2.0 * s};
    const double w = 4.0 * c / dz_;
    B_[0] = {B_[0].a11 + w * al_.a11, w * al_.a12, w * al_.a21, B_[0].a22 + w * al_.a22};
    B_[N - 1] = {B_[N - 1].a11 + w * au_.a11, w * au_.a12, w * au_.a21, B_[N - 1].a22 + w * au_.a22};
    // forward elimination factors
    Dinv_.assign(N, {});
    Dinv_[0] = inv(B_[0]);
    for (int k = 1; k < N; ++k) Dinv_[k] = inv(sub(B_[k], mul(mul(A_[k], Dinv_[k - 1]), C_[k - 1])));
  }

  void solve(std::vector<double>& u1, std::vector<double>& u2) const {
    const int N = N_;
    std::vector<std::array<double, 2>> y(N);
    y[0] = bapply(Dinv_[0], {u1[0], u2[0]});
    for (int k = 1; k < N; ++k) {
      const auto ay = bapply(A_[k], y[k - 1]);
      y[k] = bapply(Dinv_[k], {u1[k] - ay[0], u2[k] - ay[1]});
    }
    for (int k = N - 2; k >= 0; --k) {
      const auto cy = bapply(mul(Dinv_[k], C_[k]), y[k + 1]);
      y[k][0] -= cy[0];
      y[k][1] -= cy[1];
    }
    for (int k = 0; k < N; ++k) {
      u1[k] = y[k][0];
      u2[k] = y[k][1];
    }
  }

 private:
  int N_;
  double dz_;
  Mat2 al_, au_;
  double c_ = 0.0;
  std::vector<Blk> A_, B_, C_, Dinv_;
};

}  // namespace

ProfileTrajectory shear_flow_oracle(const Profile2& U0, const FrictionPair& A, double epsilon,
                                    double T, double h, int Nz_fine, const OracleOptions& opt) {
  if (!A.lower.is_constant() || !A.upper.is_constant()) {
    throw ConfigError("shear_flow_oracle: friction tensors must be constant in (x,y)");
  }
  if (!(epsilon >= 0.0) || !(T > 0.0) || !(h > 0.0)) throw ConfigError("shear_flow_oracle: bad parameters");
  if (Nz_fine < 9) throw ConfigError("shear_flow_oracle: Nz_fine must be >= 9");
  if (opt.snapshots < 1 || opt.steps < 1) throw ConfigError("shear_flow_oracle: bad step counts");
  const int N = Nz_fine;
  const double dz = h / (N - 1);
  ProfileTrajectory o;
  o.h = h;
  o.z.resize(N);
  std::vector<double> u1(N), u2(N), l1, l2;
  for (int k = 0; k < N; ++k) {
    o.z[k] = k == N - 1 ? h : dz * k;
    const auto v = U0(o.z[k]);
    u1[k] = v[0];
    u2[k] = v[1];
  }
  const int per = (opt.steps + opt.snapshots - 1) / opt.snapshots;
  const int steps = per * opt.snapshots;
  const double dt = T / steps;
  OracleSystem cn(N, dz, A.lower.constant_value(), A.upper.constant_value());
  OracleSystem be(N, dz, A.lower.constant_value(), A.upper.constant_value());
  cn.factor(0.5 * dt * epsilon);
  be.factor(0.5 * dt * epsilon);

  o.times.push_back(0.0);
  o.u1.push_back(u1);
  o.u2.push_back(u2);
  for (int n = 1; n <= steps; ++n) {
    if (n <= opt.damping_steps) {
      be.solve(u1, u2);
      be.solve(u1, u2);
    } else {
      cn.apply_L(u1, u2, l1, l2);
      for (int k = 0; k < N; ++k) {
        u1[k] += 0.5 * dt * epsilon * l1[k];
        u2[k] += 0.5 * dt * epsilon * l2[k];
      }
      cn.solve(u1, u2);
    }
    if (n % per == 0) {
      o.times.push_back(dt * n);
      o.u1.push_back(u1);
      o.u2.push_back(u2);
    }
  }
  return o;
}

VectorField oracle_on_grid(const ProfileTrajectory& o, std::size_t s, GridPtr grid, FieldRole role) {
  if (s >= o.times.size()) throw InputError("oracle_on_grid: snapshot index out of range");
  if (std::abs(grid->h - o.h) > 1e-12 * o.h) throw InputError("oracle_on_grid: channel heights differ");
  const ChannelGrid& g = *grid;
  std::vector<double> c1(g.Nz), c2(g.Nz);
  for (int k = 0; k < g.Nz; ++k) {
    const double z = std::clamp(g.z_nodes[k], 0.0, o.h);
    c1[k] = interp_cubic(o.z, o.u1[s], z);
    c2[k] = interp_cubic(o.z, o.u2[s], z);
  }
  VectorField f(grid, role);
  for (std::size_t p = 0; p < g.plane(); ++p) {
    for (int k = 0; k < g.Nz; ++k) {
      f.c[0][p * g.Nz + k] = c1[k];
      f.c[1][p * g.Nz + k] = c2[k];
    }
  }
  return f;
}

Trajectory remainder(const Trajectory& u_eps, const Trajectory& u0,
                     const std::vector<CorrectorField>& theta) {
  const std::size_t n = u_eps.snapshots.size();
  if (u0.snapshots.size() != n || theta.size() != n) {
    throw InputError("remainder: trajectories have different snapshot counts");
  }
  Trajectory w;
  w.cadence = u_eps.cadence;
  w.dt = u_eps.dt;
  for (std::size_t s = 0; s < n; ++s) {
    const auto& a = u_eps.snapshots[s];
    const auto& b = u0.snapshots[s];
    const double tol = 1e-9 * std::max(1.0, std::abs(a.t));
    if (std::abs(a.t - b.t) > tol || std::abs(a.t - theta[s].t) > tol) {
      throw InputError("remainder: misaligned snapshot times");
    }
    require_same_grid(a.u, b.u, "remainder");
    require_same_grid(a.u, theta[s].theta, "remainder");
    FlowState st;
    st.u = a.u;
    st.u -= b.u;
    st.u -= theta[s].theta;
    st.u.role = FieldRole::remainder;
    st.t = a.t;
    st.epsilon = a.epsilon;
    st.A = a.A;
    w.snapshots.push_back(std::move(st));
  }
  return w;
}

namespace {

// (a . grad) b in convective form with the analysis derivatives.
VectorField convect(const VectorField& a, const std::array<VectorField, 3>& grad_b) {
  VectorField out(a.grid, FieldRole::derivative);
  const std::size_t P = a.grid->size();
  for (int c = 0; c < 3; ++c)
    for (std::size_t n = 0; n < P; ++n)
      out.c[c][n] = a.c[0][n] * grad_b[0].c[c][n] + a.c[1][n] * grad_b[1].c[c][n] +
                    a.c[2][n] * grad_b[2].c[c][n];
  return out;
}

double pair(const VectorField& a, const VectorField& b) {
  const ChannelGrid& g = *a.grid;
  std::vector<double> d(g.size());
  for (std::size_t n = 0; n < g.size(); ++n)
    d[n] = a.c[0][n] * b.c[0][n] + a.c[1][n] * b.c[1][n] + a.c[2][n] * b.c[2][n];
  return integrate(g, d);
}

}  // namespace

NonlinearGap nonlinear_gap_J(const VectorField& u_eps, const VectorField& u0,
                             const VectorField* theta) {
  require_same_grid(u_eps, u0, "nonlinear_gap_J");
  const auto gue = gradient(u_eps);
  const auto gu0 = gradient(u0);
  NonlinearGap r;
  r.J = convect(u_eps, gue);
  r.J -= convect(u0, gu0);
  if (!theta) return r;
  require_same_grid(u_eps, *theta, "nonlinear_gap_J");
  const ChannelGrid& g = *u_eps.grid;
  VectorField w = u_eps - u0 - *theta;
  const auto gw = gradient(w);
  const auto gth = gradient(*theta);
  // J1 in skew form 1/2 int u.grad|w|^2 with the solvers' operators, which
  // vanishes identically for discretely solenoidal, impermeable u
  {
    std::vector<double> w2(g.size()), dx(g.size()), dy(g.size()), dz(g.size()), acc(g.size());
    for (std::size_t n = 0; n < g.size(); ++n)
      w2[n] = w.c[0][n] * w.c[0][n] + w.c[1][n] * w.c[1][n] + w.c[2][n] * w.c[2][n];
    Fourier2D ft(g.Nx, g.Ny, g.Nz, g.L1, g.L2);
    ft.derivative(w2.data(), dx.data(), 1, 0);
    ft.derivative(w2.data(), dy.data(), 0, 1);
    const FdOperator D = FdOperator::sbp_first(g.z_nodes);
    for (std::size_t p = 0; p < g.plane(); ++p) D.apply(w2.data() + p * g.Nz, dz.data() + p * g.Nz);
    for (std::size_t n = 0; n < g.size(); ++n)
      acc[n] = 0.5 * (u_eps.c[0][n] * dx[n] + u_eps.c[1][n] * dy[n] + u_eps.c[2][n] * dz[n]);
    r.terms[0] = integrate(g, acc);
  }
  VectorField ue_minus_w = u_eps - w;
  const auto gd = gradient(ue_minus_w);
  r.terms[1] = pair(convect(w, gd), w);
  r.terms[2] = pair(convect(*theta, gu0), w);
  r.terms[3] = pair(convect(u0, gth), w);
  r.terms[4] = pair(convect(*theta, gth), w);
  r.has_terms = true;
  return r;
}

// ---------------- I/O ----------------

namespace {
constexpr char kMagic[8] = {'N', 'S', 'C', 'K', 'P', 'T', '0', '1'};

template <class T>
void put(std::ofstream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("checkpoint truncated");
  return v;
}
}  // namespace

void write_checkpoint(const FlowState& s, const std::string& path) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw IoError("cannot open " + path + " for writing");
  const ChannelGrid& g = *s.u.grid;
  o.write(kMagic, 8);
  put<std::int32_t>(o, g.Nx);
  put<std::int32_t>(o, g.Ny);
  put<std::int32_t>(o, g.Nz);
  put<std::int32_t>(o, 0);
  for (double v : {g.L1, g.L2, g.h, g.clustering, s.epsilon, s.t}) put(o, v);
  for (const FrictionTensor* a : {&s.A.lower, &s.A.upper}) {
    const Mat2 m = a->constant_value();
    for (double v : {m.a11, m.a12, m.a21, m.a22}) put(o, v);
  }
  o.write(reinterpret_cast<const char*>(g.z_nodes.data()), sizeof(double) * g.Nz);
  for (int c = 0; c < 3; ++c)
    o.write(reinterpret_cast<const char*>(s.u.c[c].data()), sizeof(double) * g.size());
  std::vector<double> p = s.p.v;
  p.resize(g.size(), 0.0);
  o.write(reinterpret_cast<const char*>(p.data()), sizeof(double) * g.size());
  if (!o) throw IoError("write failed for " + path);
}

FlowState read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw IoError(path + ": not a checkpoint file");
  const int Nx = get<std::int32_t>(in), Ny = get<std::int32_t>(in), Nz = get<std::int32_t>(in);
  get<std::int32_t>(in);
  double hdr[6];
  for (double& v : hdr) v = get<double>(in);
  Mat2 m[2];
  for (auto& mm : m) {
    mm.a11 = get<double>(in);
    mm.a12 = get<double>(in);
    mm.a21 = get<double>(in);
    mm.a22 = get<double>(in);
  }
  auto g = std::make_shared<ChannelGrid>(make_channel_grid(hdr[0], hdr[1], hdr[2], Nx, Ny, Nz, hdr[3]));
  in.read(reinterpret_cast<char*>(g->z_nodes.data()), sizeof(double) * Nz);
  g->z_weights.assign(Nz, 0.0);
  for (int k = 0; k + 1 < Nz; ++k) {
    const double d = g->z_nodes[k + 1] - g->z_nodes[k];
    g->z_weights[k] += 0.5 * d;
    g->z_weights[k + 1] += 0.5 * d;
  }
  FlowState s;
  s.u = VectorField(g, FieldRole::physical);
  for (int c = 0; c < 3; ++c) in.read(reinterpret_cast<char*>(s.u.c[c].data()), sizeof(double) * g->size());
  s.p = ScalarField(g);
  in.read(reinterpret_cast<char*>(s.p.v.data()), sizeof(double) * g->size());
  if (!in) throw IoError(path + ": checkpoint truncated");
  s.epsilon = hdr[4];
  s.t = hdr[5];
  s.A.lower = FrictionTensor::constant(Wall::lower, m[0]);
  s.A.upper = FrictionTensor::constant(Wall::upper, m[1]);
  return s;
}

void write_diagnostics_csv(const Trajectory& tr, const std::string& path) {
  std::ofstream o(path);
  if (!o) throw IoError("cannot open " + path + " for writing");
  o << "t,energy,div_max,robin_residual\n";
  char buf[128];
  for (const auto& d : tr.diagnostics) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.6e,%.6e\n", d.t, d.energy, d.div_max,
                  d.robin_residual);
    o << buf;
  }
  if (!o) throw IoError("write failed for " + path);
}

}  // namespace navslip
