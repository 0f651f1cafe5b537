#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "mdlab/linalg.hpp"

namespace mdlab {

// Periodic box [-L/2, L/2)^3, n points per axis, row-major (x slowest, z fastest).
struct GridSpec {
  int n = 0;
  double L = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  double h() const { return L / n; }
  double coord(int i) const { return -0.5 * L + i * h(); }
  // Signed integer frequency of FFT bin i (Nyquist mapped to +n/2).
  int freq_index(int i) const { return i <= n / 2 ? i : i - n; }
  double wavenumber(int i) const { return 2.0 * M_PI / L * freq_index(i); }
  // Odd derivative multiplier: the Nyquist bin is zeroed to keep d/dx of real
  // fields real.
  double deriv_wavenumber(int i) const {
    if (2 * i == n) return 0.0;
    return wavenumber(i);
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  bool operator==(const GridSpec&) const = default;
};

using CField = std::vector<cplx>;
using RField = std::vector<double>;

// FFT-backed spectral operations on one grid. Plans are created once per instance
// and are safe to execute concurrently on distinct buffers.
class SpectralGrid {
 public:
  explicit SpectralGrid(GridSpec spec);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  const GridSpec spec;

  void fft(const cplx* in, cplx* out) const;   // unnormalized forward
  void ifft(const cplx* in, cplx* out) const;  // backward with 1/n^3

  // d/dx_axis of a physical-space field (axis 0..2), physical space out.
  void deriv(const cplx* f, int axis, cplx* out) const;
  void deriv(const double* f, int axis, double* out) const;
  // All three derivatives with a single forward transform.
  void gradient(const cplx* f, cplx* gx, cplx* gy, cplx* gz) const;
  void laplacian(const double* f, double* out) const;
  void laplacian(const cplx* f, cplx* out) const;

  // Solve lap(u) = rhs on the torus with zero-mean convention (k = 0 mode of u set
  // to zero). If subtract_mean, the rhs mean is removed first; otherwise a nonzero
  // mean is the caller's problem.
  void poisson_zero_mean(const double* rhs, double* u, bool subtract_mean) const;

  // 2/3-rule low-pass of a physical-space field (used on quadratic products).
  void dealias(cplx* f) const;
  void dealias(double* f) const;

  // Homogeneous Sobolev norm |f|_{Hdot^s} via the |xi|^s multiplier, k = 0 dropped.
  double sobolev(const double* f, double s) const;
  double sobolev(const cplx* f, double s) const;

  // fn(flat index, kx, ky, kz) over all modes of a spectrum buffer.
  void for_each_mode(const std::function<void(std::size_t, double, double, double)>& fn) const;

  // Scratch complex buffers (grid-sized), index-stable for the grid's lifetime.
  cplx* scratch(int slot) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double l2_norm(const GridSpec& g, const double* f);
double l2_norm(const GridSpec& g, const cplx* f);
double sup_norm(const GridSpec& g, const double* f);
double sup_norm(const GridSpec& g, const cplx* f);

}  // namespace mdlab
