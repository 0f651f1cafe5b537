#include <cmath>

#include "doctest.h"
#include "mdlab/grid.hpp"

using namespace mdlab;

namespace {

constexpr double kTau = 2.0 * M_PI;

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("spec bookkeeping") {
  const GridSpec g{16, 8.0};
  CHECK(g.size() == 4096);
  CHECK(g.h() == doctest::Approx(0.5));
  CHECK(g.coord(0) == doctest::Approx(-4.0));
  CHECK(g.coord(8) == doctest::Approx(0.0));
  CHECK(g.freq_index(0) == 0);
  CHECK(g.freq_index(8) == 8);    // Nyquist maps to +n/2
  CHECK(g.freq_index(9) == -7);
  CHECK(g.freq_index(15) == -1);
  CHECK(g.wavenumber(1) == doctest::Approx(kTau / 8.0));
  CHECK(g.deriv_wavenumber(8) == 0.0);  // Nyquist zeroed for odd derivatives
  CHECK(g.index(1, 2, 3) == (16 + 2) * 16 + 3);
}

TEST_CASE("derivatives are spectrally exact on trig modes") {
  const GridSpec spec{24, 6.0};
  SpectralGrid sg(spec);
  RField f(spec.size()), dfx(spec.size());
  const double k = 2.0 * kTau / spec.L;  // mode 2 along x
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int kk = 0; kk < spec.n; ++kk)
        f[spec.index(i, j, kk)] =
            std::sin(k * spec.coord(i)) + 0.5 * std::cos(2.0 * k * spec.coord(j));
  sg.deriv(f.data(), 0, dfx.data());
  double err = 0.0;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int kk = 0; kk < spec.n; ++kk)
        err = std::max(err, std::abs(dfx[spec.index(i, j, kk)] - k * std::cos(k * spec.coord(i))));
  CHECK(err <= 1e-11);

  // complex gradient agrees with per-axis derivatives
  CField fc(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) fc[i] = cplx(f[i], 0.3 * f[i]);
  CField gx(spec.size()), gy(spec.size()), gz(spec.size()), dx(spec.size());
  sg.gradient(fc.data(), gx.data(), gy.data(), gz.data());
  sg.deriv(fc.data(), 0, dx.data());
  double gap = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) gap = std::max(gap, std::abs(gx[i] - dx[i]));
  CHECK(gap <= 1e-12);
}

TEST_CASE("fft round trip and laplacian") {
  const GridSpec spec{16, 4.0};
  SpectralGrid sg(spec);
  CField f(spec.size()), fhat(spec.size()), back(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i)
    f[i] = cplx(std::sin(0.37 * i), std::cos(0.11 * i));
  sg.fft(f.data(), fhat.data());
  sg.ifft(fhat.data(), back.data());
  double err = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) err = std::max(err, std::abs(f[i] - back[i]));
  CHECK(err <= 1e-12);

  RField g(spec.size()), lap(spec.size());
  const double k = kTau / spec.L;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int kk = 0; kk < spec.n; ++kk)
        g[spec.index(i, j, kk)] = std::cos(k * spec.coord(i)) * std::sin(k * spec.coord(j));
  sg.laplacian(g.data(), lap.data());
  double lerr = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i)
    lerr = std::max(lerr, std::abs(lap[i] + 2.0 * k * k * g[i]));
  CHECK(lerr <= 1e-10);
}

TEST_CASE("poisson solve inverts the laplacian on zero-mean sources") {
  const GridSpec spec{20, 5.0};
  SpectralGrid sg(spec);
  RField u(spec.size()), rhs(spec.size()), got(spec.size());
  const double k = kTau / spec.L;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int kk = 0; kk < spec.n; ++kk)
        u[spec.index(i, j, kk)] =
            std::sin(k * spec.coord(i)) * std::cos(2.0 * k * spec.coord(kk));
  sg.laplacian(u.data(), rhs.data());
  sg.poisson_zero_mean(rhs.data(), got.data(), false);
  double err = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) err = std::max(err, std::abs(got[i] - u[i]));
  CHECK(err <= 1e-11);

  // subtract_mean removes a uniform offset in the source
  for (auto& r : rhs) r += 0.7;
  sg.poisson_zero_mean(rhs.data(), got.data(), true);
  err = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) err = std::max(err, std::abs(got[i] - u[i]));
  CHECK(err <= 1e-11);
}

TEST_CASE("l2 norm and sobolev multipliers on a single mode") {
  const GridSpec spec{16, 8.0};
  SpectralGrid sg(spec);
  RField f(spec.size());
  const double k = 2.0 * kTau / spec.L;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int kk = 0; kk < spec.n; ++kk)
        f[spec.index(i, j, kk)] = std::sin(k * spec.coord(i));
  // ||sin||_L2^2 = L^3 / 2
  const double l2 = l2_norm(spec, f.data());
  CHECK(l2 == doctest::Approx(std::sqrt(spec.L * spec.L * spec.L / 2.0)).epsilon(1e-12));
  CHECK(sg.sobolev(f.data(), 0.0) == doctest::Approx(l2).epsilon(1e-12));
  CHECK(sg.sobolev(f.data(), 1.0) == doctest::Approx(k * l2).epsilon(1e-12));
  CHECK(sg.sobolev(f.data(), -0.5) == doctest::Approx(l2 / std::sqrt(k)).epsilon(1e-12));
  // the k = 0 mode is dropped: constants have zero homogeneous norm
  RField c(spec.size(), 3.14);
  CHECK(sg.sobolev(c.data(), 0.5) <= 1e-12);
  CHECK(sup_norm(spec, f.data()) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dealias kills the top third of the spectrum") {
  const GridSpec spec{18, 6.0};
  SpectralGrid sg(spec);
  // mode 8 along x is beyond the 2/3 cut (n/3 = 6), mode 3 is inside
  RField f(spec.size());
  const double klo = 3.0 * kTau / spec.L, khi = 8.0 * kTau / spec.L;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int kk = 0; kk < spec.n; ++kk)
        f[spec.index(i, j, kk)] = std::cos(klo * spec.coord(i)) + std::cos(khi * spec.coord(i));
  sg.dealias(f.data());
  double err = 0.0;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int kk = 0; kk < spec.n; ++kk)
        err = std::max(err,
                       std::abs(f[spec.index(i, j, kk)] - std::cos(klo * spec.coord(i))));
  CHECK(err <= 1e-12);
}

TEST_CASE("for_each_mode covers the lattice with consistent wavenumbers") {
  const GridSpec spec{8, 4.0};
  SpectralGrid sg(spec);
  std::size_t count = 0;
  double kmax = 0.0;
  sg.for_each_mode([&](std::size_t idx, double kx, double ky, double kz) {
    CHECK(idx < spec.size());
    kmax = std::max({kmax, std::abs(kx), std::abs(ky), std::abs(kz)});
    ++count;
  });
  CHECK(count == spec.size());
  CHECK(kmax == doctest::Approx(kTau / spec.L * (spec.n / 2)));
}

TEST_CASE("scratch buffers are distinct and stable") {
  const GridSpec spec{8, 4.0};
  SpectralGrid sg(spec);
  cplx* s0 = sg.scratch(0);
  cplx* s1 = sg.scratch(1);
  CHECK(s0 != s1);
  CHECK(sg.scratch(0) == s0);
  s0[5] = cplx(1.0, 2.0);
  CHECK(sg.scratch(0)[5] == cplx(1.0, 2.0));
}

}  // TEST_SUITE
