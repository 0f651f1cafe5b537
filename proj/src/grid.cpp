#include "mdlab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "mdlab/parallel.hpp"

namespace mdlab {

namespace {
std::mutex g_plan_mutex;  // FFTW plan creation is not thread-safe
}

struct SpectralGrid::Impl {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  mutable std::vector<CField> scratch;

  ~Impl() {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

SpectralGrid::SpectralGrid(GridSpec s) : spec(s), impl_(std::make_unique<Impl>()) {
  if (spec.n < 4 || spec.L <= 0.0) throw std::invalid_argument("SpectralGrid: bad grid spec");
  CField probe(spec.size());
  auto* p = reinterpret_cast<fftw_complex*>(probe.data());
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  impl_->fwd = fftw_plan_dft_3d(spec.n, spec.n, spec.n, p, p, FFTW_FORWARD, flags);
  impl_->bwd = fftw_plan_dft_3d(spec.n, spec.n, spec.n, p, p, FFTW_BACKWARD, flags);
  if (!impl_->fwd || !impl_->bwd) throw std::runtime_error("SpectralGrid: FFTW planning failed");
}

SpectralGrid::~SpectralGrid() = default;

void SpectralGrid::fft(const cplx* in, cplx* out) const {
  if (in != out) std::memcpy(out, in, spec.size() * sizeof(cplx));
  auto* p = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(impl_->fwd, p, p);
}

void SpectralGrid::ifft(const cplx* in, cplx* out) const {
  if (in != out) std::memcpy(out, in, spec.size() * sizeof(cplx));
  auto* p = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(impl_->bwd, p, p);
  const double scale = 1.0 / static_cast<double>(spec.size());
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { out[i] *= scale; });
}

cplx* SpectralGrid::scratch(int slot) const {
  while (static_cast<int>(impl_->scratch.size()) <= slot)
    impl_->scratch.emplace_back(spec.size());
  return impl_->scratch[slot].data();
}

void SpectralGrid::for_each_mode(
    const std::function<void(std::size_t, double, double, double)>& fn) const {
  const int n = spec.n;
  for (int i = 0; i < n; ++i) {
    const double kx = spec.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const double ky = spec.wavenumber(j);
      std::size_t idx = spec.index(i, j, 0);
      for (int k = 0; k < n; ++k, ++idx) fn(idx, kx, ky, spec.wavenumber(k));
    }
  }
}

namespace {

// Applies fn(spectrum value, kx, ky, kz) over modes, parallel over x-planes.
template <class F>
void mode_map(const GridSpec& spec, cplx* spectrum, bool use_deriv_k, F&& fn) {
  const int n = spec.n;
  par::for_n(n, [&](std::ptrdiff_t i) {
    const double kx = use_deriv_k ? spec.deriv_wavenumber(static_cast<int>(i))
                                  : spec.wavenumber(static_cast<int>(i));
    for (int j = 0; j < n; ++j) {
      const double ky =
          use_deriv_k ? spec.deriv_wavenumber(j) : spec.wavenumber(j);
      std::size_t idx = spec.index(static_cast<int>(i), j, 0);
      for (int k = 0; k < n; ++k, ++idx) {
        const double kz =
            use_deriv_k ? spec.deriv_wavenumber(k) : spec.wavenumber(k);
        fn(spectrum[idx], kx, ky, kz);
      }
    }
  });
}

}  // namespace

void SpectralGrid::deriv(const cplx* f, int axis, cplx* out) const {
  cplx* sp = scratch(6);
  fft(f, sp);
  mode_map(spec, sp, true, [axis](cplx& v, double kx, double ky, double kz) {
    const double k = axis == 0 ? kx : axis == 1 ? ky : kz;
    v *= cplx{0.0, k};
  });
  ifft(sp, out);
}

void SpectralGrid::deriv(const double* f, int axis, double* out) const {
  cplx* buf = scratch(7);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { buf[i] = f[i]; });
  deriv(buf, axis, buf);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { out[i] = buf[i].real(); });
}

void SpectralGrid::gradient(const cplx* f, cplx* gx, cplx* gy, cplx* gz) const {
  cplx* sp = scratch(6);
  cplx* tmp = scratch(7);
  fft(f, sp);
  cplx* outs[3] = {gx, gy, gz};
  for (int axis = 0; axis < 3; ++axis) {
    std::memcpy(tmp, sp, spec.size() * sizeof(cplx));
    mode_map(spec, tmp, true, [axis](cplx& v, double kx, double ky, double kz) {
      const double k = axis == 0 ? kx : axis == 1 ? ky : kz;
      v *= cplx{0.0, k};
    });
    ifft(tmp, outs[axis]);
  }
}

void SpectralGrid::laplacian(const double* f, double* out) const {
  cplx* buf = scratch(6);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { buf[i] = f[i]; });
  laplacian(buf, buf);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { out[i] = buf[i].real(); });
}

void SpectralGrid::laplacian(const cplx* f, cplx* out) const {
  fft(f, out);
  mode_map(spec, out, false, [](cplx& v, double kx, double ky, double kz) {
    v *= -(kx * kx + ky * ky + kz * kz);
  });
  ifft(out, out);
}

void SpectralGrid::poisson_zero_mean(const double* rhs, double* u, bool subtract_mean) const {
  cplx* buf = scratch(6);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { buf[i] = rhs[i]; });
  fft(buf, buf);
  if (subtract_mean) buf[0] = 0.0;
  mode_map(spec, buf, false, [](cplx& v, double kx, double ky, double kz) {
    const double k2 = kx * kx + ky * ky + kz * kz;
    v = k2 == 0.0 ? cplx{} : v / (-k2);
  });
  ifft(buf, buf);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { u[i] = buf[i].real(); });
}

void SpectralGrid::dealias(cplx* f) const {
  const int cut = spec.n / 3;
  cplx* buf = scratch(6);
  fft(f, buf);
  const int n = spec.n;
  par::for_n(n, [&](std::ptrdiff_t i) {
    const bool kill_i = std::abs(spec.freq_index(static_cast<int>(i))) > cut;
    for (int j = 0; j < n; ++j) {
      const bool kill_j = kill_i || std::abs(spec.freq_index(j)) > cut;
      std::size_t idx = spec.index(static_cast<int>(i), j, 0);
      for (int k = 0; k < n; ++k, ++idx)
        if (kill_j || std::abs(spec.freq_index(k)) > cut) buf[idx] = 0.0;
    }
  });
  ifft(buf, f);
}

void SpectralGrid::dealias(double* f) const {
  cplx* buf = scratch(7);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { buf[i] = f[i]; });
  dealias(buf);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { f[i] = buf[i].real(); });
}

namespace {

double sobolev_impl(const SpectralGrid& sg, const cplx* physical, double s) {
  const GridSpec& spec = sg.spec;
  cplx* buf = sg.scratch(8);
  std::memcpy(buf, physical, spec.size() * sizeof(cplx));
  sg.fft(buf, buf);
  // Parseval: int |f|^2 dx = (L^3/n^6) sum |fhat|^2
  double acc = 0.0;
  sg.for_each_mode([&](std::size_t idx, double kx, double ky, double kz) {
    const double k2 = kx * kx + ky * ky + kz * kz;
    if (k2 == 0.0) return;
    acc += std::pow(k2, s) * std::norm(buf[idx]);
  });
  const double vol = spec.L * spec.L * spec.L;
  const double n6 = std::pow(static_cast<double>(spec.size()), 2);
  return std::sqrt(acc * vol / n6);
}

}  // namespace

double SpectralGrid::sobolev(const cplx* f, double s) const { return sobolev_impl(*this, f, s); }

double SpectralGrid::sobolev(const double* f, double s) const {
  cplx* buf = scratch(9);
  par::for_n(spec.size(), [&](std::ptrdiff_t i) { buf[i] = f[i]; });
  return sobolev_impl(*this, buf, s);
}

double l2_norm(const GridSpec& g, const double* f) {
  const double cell = g.h() * g.h() * g.h();
  const double s = par::sum_n(g.size(), [&](std::ptrdiff_t i) { return f[i] * f[i]; });
  return std::sqrt(cell * s);
}

double l2_norm(const GridSpec& g, const cplx* f) {
  const double cell = g.h() * g.h() * g.h();
  const double s = par::sum_n(g.size(), [&](std::ptrdiff_t i) { return std::norm(f[i]); });
  return std::sqrt(cell * s);
}

double sup_norm(const GridSpec& g, const double* f) {
  return par::max_n(g.size(), [&](std::ptrdiff_t i) { return std::abs(f[i]); });
}

double sup_norm(const GridSpec& g, const cplx* f) {
  return par::max_n(g.size(), [&](std::ptrdiff_t i) { return std::abs(f[i]); });
}

}  // namespace mdlab
