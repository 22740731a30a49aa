#pragma once

#include <complex>
#include <vector>

#include "navslip/geometry.hpp"

namespace navslip {

using cplx = std::complex<double>;

// Batched 2-D real FFT over (x,y) planes of an array whose fastest index is a
// batch index of length `howmany` (the z index for channel fields).
// Physical layout: (i*Ny + j)*howmany + k; spectral: (i*(Ny/2+1) + j)*howmany + k.
class Fourier2D {
 public:
  Fourier2D(int Nx, int Ny, int howmany, double L1, double L2);

  int Nx() const { return nx_; }
  int Ny() const { return ny_; }
  int nky() const { return ny_ / 2 + 1; }
  int howmany() const { return howmany_; }
  std::size_t spectral_size() const {
    return static_cast<std::size_t>(nx_) * nky() * howmany_;
  }
  std::size_t physical_size() const { return static_cast<std::size_t>(nx_) * ny_ * howmany_; }

  void forward(const double* in, cplx* out) const;
  // Normalized inverse; `in` is left untouched.
  void backward(const cplx* in, double* out) const;

  double kx(int i) const;
  double ky(int j) const;
  // Wavenumbers used for odd derivatives: the Nyquist mode is dropped.
  double kx_odd(int i) const { return i == nx_ / 2 ? 0.0 : kx(i); }
  double ky_odd(int j) const { return j == ny_ / 2 ? 0.0 : ky(j); }

  // Multiplier of d^a/dx^a d^b/dy^b for mode (i,j).
  cplx multiplier(int i, int j, int a, int b) const;

  // out = d^a/dx^a d^b/dy^b in, both physical.
  void derivative(const double* in, double* out, int a, int b) const;
  void laplacian(const double* in, double* out) const;

 private:
  int nx_, ny_, howmany_;
  double l1_, l2_;
  void* plan_fwd_;
  void* plan_bwd_;
};

// Channel-field convenience: spectral x/y derivatives of a scalar array on `g`.
void ddxy(const ChannelGrid& g, const std::vector<double>& in, std::vector<double>& out, int a,
          int b);
void lap_xy(const ChannelGrid& g, const std::vector<double>& in, std::vector<double>& out);

}  // namespace navslip
