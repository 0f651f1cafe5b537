#include "mdlab/oracle.hpp"

#include <cmath>

#include "mdlab/parallel.hpp"

namespace mdlab {

void oracle_linear_dirac(const SpectralGrid& sg, const std::array<CField, 4>& psi0, double t,
                         std::array<CField, 4>& out) {
  const GridSpec& g = sg.spec;
  for (int c = 0; c < 4; ++c) {
    out[c].resize(g.size());
    sg.fft(psi0[c].data(), out[c].data());
  }
  const int n = g.n;
  par::for_n(n, [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double kx = g.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const double ky = g.wavenumber(j);
      std::size_t idx = g.index(i, j, 0);
      for (int k = 0; k < n; ++k, ++idx) {
        const double kz = g.wavenumber(k);
        const double w = std::sqrt(1.0 + kx * kx + ky * ky + kz * kz);
        const double c = std::cos(w * t);
        const cplx ms{0.0, -std::sin(w * t) / w};
        const cplx u1 = out[0][idx], u2 = out[1][idx];
        const cplx l1 = out[2][idx], l2 = out[3][idx];
        // sigma.k acting on the two Pauli blocks
        const cplx km{kx, -ky}, kp{kx, ky};
        const cplx sl1 = kz * l1 + km * l2, sl2 = kp * l1 - kz * l2;
        const cplx su1 = kz * u1 + km * u2, su2 = kp * u1 - kz * u2;
        // M psi = (u + sigma.k l, sigma.k u - l)
        out[0][idx] = c * u1 + ms * (u1 + sl1);
        out[1][idx] = c * u2 + ms * (u2 + sl2);
        out[2][idx] = c * l1 + ms * (su1 - l1);
        out[3][idx] = c * l2 + ms * (su2 - l2);
      }
    }
  });
  for (int c = 0; c < 4; ++c) sg.ifft(out[c].data(), out[c].data());
}

void oracle_linear_wave(const SpectralGrid& sg, const RField& f0, const RField& fdot0, double t,
                        RField& f, RField* fdot) {
  const GridSpec& g = sg.spec;
  cplx* bf = sg.scratch(10);
  cplx* bd = sg.scratch(11);
  par::for_n(g.size(), [&](std::ptrdiff_t i) {
    bf[i] = f0[i];
    bd[i] = fdot0[i];
  });
  sg.fft(bf, bf);
  sg.fft(bd, bd);
  sg.for_each_mode([&](std::size_t idx, double kx, double ky, double kz) {
    const double kk = std::sqrt(kx * kx + ky * ky + kz * kz);
    const cplx a = bf[idx], ad = bd[idx];
    if (kk == 0.0) {
      bf[idx] = a + t * ad;
      // bd unchanged
    } else {
      const double c = std::cos(kk * t), s = std::sin(kk * t);
      bf[idx] = c * a + (s / kk) * ad;
      bd[idx] = -kk * s * a + c * ad;
    }
  });
  sg.ifft(bf, bf);
  f.resize(g.size());
  par::for_n(g.size(), [&](std::ptrdiff_t i) { f[i] = bf[i].real(); });
  if (fdot) {
    sg.ifft(bd, bd);
    fdot->resize(g.size());
    par::for_n(g.size(), [&](std::ptrdiff_t i) { (*fdot)[i] = bd[i].real(); });
  }
}

}  // namespace mdlab
