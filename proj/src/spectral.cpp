#include "navslip/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "navslip/errors.hpp"

namespace navslip {

namespace {

// The FFTW planner is not thread safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

PlanPair get_plans(int nx, int ny, int howmany) {
  static std::map<std::tuple<int, int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_tuple(nx, ny, howmany);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int nky = ny / 2 + 1;
  std::vector<double> rbuf(static_cast<std::size_t>(nx) * ny * howmany);
  std::vector<cplx> cbuf(static_cast<std::size_t>(nx) * nky * howmany);
  int n[2] = {nx, ny};
  int inembed[2] = {nx, ny};
  int onembed[2] = {nx, nky};
  auto* cptr = reinterpret_cast<fftw_complex*>(cbuf.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.fwd = fftw_plan_many_dft_r2c(2, n, howmany, rbuf.data(), inembed, howmany, 1, cptr, onembed,
                                 howmany, 1, flags);
  p.bwd = fftw_plan_many_dft_c2r(2, n, howmany, cptr, onembed, howmany, 1, rbuf.data(), inembed,
                                 howmany, 1, flags);
  if (!p.fwd || !p.bwd) throw Error("FFTW planning failed");
  cache.emplace(key, p);
  return p;
}

}  // namespace

Fourier2D::Fourier2D(int Nx, int Ny, int howmany, double L1, double L2)
    : nx_(Nx), ny_(Ny), howmany_(howmany), l1_(L1), l2_(L2) {
  if (Nx < 2 || Ny < 2 || howmany < 1) throw ConfigError("Fourier2D: bad sizes");
  const PlanPair p = get_plans(Nx, Ny, howmany);
  plan_fwd_ = p.fwd;
  plan_bwd_ = p.bwd;
}

void Fourier2D::forward(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void Fourier2D::backward(const cplx* in, double* out) const {
  std::vector<cplx> tmp(in, in + spectral_size());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_),
                       reinterpret_cast<fftw_complex*>(tmp.data()), out);
  const double s = 1.0 / (static_cast<double>(nx_) * ny_);
  const std::size_t n = physical_size();
  for (std::size_t q = 0; q < n; ++q) out[q] *= s;
}

double Fourier2D::kx(int i) const {
  const int m = i <= nx_ / 2 ? i : i - nx_;
  return 2.0 * std::numbers::pi * m / l1_;
}

double Fourier2D::ky(int j) const { return 2.0 * std::numbers::pi * j / l2_; }

cplx Fourier2D::multiplier(int i, int j, int a, int b) const {
  const double kxv = (a % 2 == 1) ? kx_odd(i) : kx(i);
  const double kyv = (b % 2 == 1) ? ky_odd(j) : ky(j);
  cplx m(1.0, 0.0);
  const cplx ikx(0.0, kxv), iky(0.0, kyv);
  for (int q = 0; q < a; ++q) m *= ikx;
  for (int q = 0; q < b; ++q) m *= iky;
  return m;
}

void Fourier2D::derivative(const double* in, double* out, int a, int b) const {
  std::vector<cplx> spec(spectral_size());
  forward(in, spec.data());
  for (int i = 0; i < nx_; ++i) {
    for (int j = 0; j < nky(); ++j) {
      const cplx m = multiplier(i, j, a, b);
      cplx* p = spec.data() + (static_cast<std::size_t>(i) * nky() + j) * howmany_;
      for (int k = 0; k < howmany_; ++k) p[k] *= m;
    }
  }
  backward(spec.data(), out);
}

void Fourier2D::laplacian(const double* in, double* out) const {
  std::vector<cplx> spec(spectral_size());
  forward(in, spec.data());
  for (int i = 0; i < nx_; ++i) {
    for (int j = 0; j < nky(); ++j) {
      const double k2 = kx(i) * kx(i) + ky(j) * ky(j);
      cplx* p = spec.data() + (static_cast<std::size_t>(i) * nky() + j) * howmany_;
      for (int k = 0; k < howmany_; ++k) p[k] *= -k2;
    }
  }
  backward(spec.data(), out);
}

void ddxy(const ChannelGrid& g, const std::vector<double>& in, std::vector<double>& out, int a,
          int b) {
  Fourier2D ft(g.Nx, g.Ny, g.Nz, g.L1, g.L2);
  out.resize(in.size());
  if (a == 0 && b == 0) {
    out = in;
    return;
  }
  ft.derivative(in.data(), out.data(), a, b);
}

void lap_xy(const ChannelGrid& g, const std::vector<double>& in, std::vector<double>& out) {
  Fourier2D ft(g.Nx, g.Ny, g.Nz, g.L1, g.L2);
  out.resize(in.size());
  ft.laplacian(in.data(), out.data());
}

}  // namespace navslip
