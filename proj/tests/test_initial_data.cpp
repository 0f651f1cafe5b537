#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "mdlab/initial_data.hpp"

using namespace mdlab;

namespace {

GridSpec spec{24, 16.0};

std::array<RField, 3> zero3(const GridSpec& g) {
  return {RField(g.size(), 0.0), RField(g.size(), 0.0), RField(g.size(), 0.0)};
}

std::array<RField, 3> smooth3(const GridSpec& g) {
  auto out = zero3(g);
  const double k = 2.0 * M_PI / g.L;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int kk = 0; kk < g.n; ++kk) {
        const std::size_t at = g.index(i, j, kk);
        out[0][at] = 0.02 * std::sin(k * g.coord(i)) * std::cos(k * g.coord(j));
        out[1][at] = 0.01 * std::cos(k * g.coord(kk));
        out[2][at] = -0.015 * std::sin(k * g.coord(j) + 0.3);
      }
  return out;
}

}  // namespace

TEST_SUITE("initial_data") {

TEST_CASE("gaussian spinor: peak, charge, k0 modulation") {
  GaussianSpec gs;
  gs.amplitude = 0.2;
  gs.sigma = 1.5;
  gs.center = {0.0, 0.0, 0.0};
  gs.weights = {cplx(1.0), cplx(0.0), cplx(0.5), cplx(0.0)};
  std::array<CField, 4> psi;
  fill_gaussian_spinor(spec, gs, psi);
  const std::size_t c = spec.index(spec.n / 2, spec.n / 2, spec.n / 2);  // x = 0
  CHECK(std::abs(psi[0][c] - cplx(0.2)) <= 1e-12);
  CHECK(std::abs(psi[2][c] - cplx(0.1)) <= 1e-12);
  CHECK(std::abs(psi[1][c]) == 0.0);

  // q = -int |psi|^2 = -amp^2 (1 + 1/4) (pi sigma^2)^{3/2} for exp(-|x|^2/sigma^2) mass
  const double want = -0.04 * 1.25 * std::pow(M_PI * gs.sigma * gs.sigma, 1.5);
  CHECK(charge(spec, psi) == doctest::Approx(want).epsilon(1e-6));

  // a plane-wave factor moves nothing in |psi|
  gs.k0 = {2.0 * M_PI / spec.L, 0.0, 0.0};
  std::array<CField, 4> psik;
  fill_gaussian_spinor(spec, gs, psik);
  CHECK(charge(spec, psik) == doctest::Approx(charge(spec, psi)).epsilon(1e-12));
  CHECK(std::abs(std::abs(psik[0][c]) - 0.2) <= 1e-12);
}

TEST_CASE("constraint solve leaves a spectrally small residual") {
  SpectralGrid sg(spec);
  GaussianSpec gs;
  gs.amplitude = 0.15;
  gs.sigma = 2.0;
  std::array<CField, 4> psi;
  fill_gaussian_spinor(spec, gs, psi);

  SUBCASE("zero free potentials") {
    const CauchyData d = solve_constraints(sg, psi, zero3(spec), zero3(spec));
    CHECK(d.constrained);
    CHECK(d.subtracted_mean == doctest::Approx(-charge(spec, psi) / std::pow(spec.L, 3)));
    const auto res = constraint_residual(sg, d);
    CHECK(res[0] <= 1e-12);
    CHECK(res[1] <= 1e-12);
  }
  SUBCASE("smooth free potentials") {
    const CauchyData d = solve_constraints(sg, psi, smooth3(spec), smooth3(spec));
    const auto res = constraint_residual(sg, d);
    CHECK(res[0] <= 1e-12);
    CHECK(res[1] <= 1e-12);
  }
  SUBCASE("mean obstruction is an error when subtraction is off") {
    CHECK_THROWS(solve_constraints(sg, psi, zero3(spec), zero3(spec), false));
  }
}

TEST_CASE("charge-fix profile: smoothstep endpoints and outgoing wave") {
  CHECK(ChargeFixProfile::rho(0.4) == 0.0);
  CHECK(ChargeFixProfile::rho(0.5) == 0.0);
  CHECK(ChargeFixProfile::rho(1.0) == 1.0);
  CHECK(ChargeFixProfile::rho(1.7) == 1.0);
  CHECK(ChargeFixProfile::rho_prime(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ChargeFixProfile::rho_prime(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  // rho_prime matches a finite difference of rho in the ramp
  for (double s : {0.55, 0.7, 0.85, 0.95}) {
    const double h = 1e-6;
    const double fd = (ChargeFixProfile::rho(s + h) - ChargeFixProfile::rho(s - h)) / (2.0 * h);
    CHECK(ChargeFixProfile::rho_prime(s) == doctest::Approx(fd).epsilon(1e-6));
  }
  // monotone ramp
  CHECK(ChargeFixProfile::rho(0.6) > 0.0);
  CHECK(ChargeFixProfile::rho(0.9) < 1.0);
  CHECK(ChargeFixProfile::rho(0.9) > ChargeFixProfile::rho(0.6));

  const ChargeFixProfile fix{-2.0};
  // far field: exact Coulomb -q/(4 pi r) cancellation value
  CHECK(fix.Q(0.0, 3.0) == doctest::Approx(-2.0 / (4.0 * M_PI * 3.0)).epsilon(1e-12));
  // Q solves the transport identity dQ/dt = -q rho'(r-t)/(4 pi r)
  for (double t : {0.0, 0.5, 2.0})
    for (double r : {0.8, 1.4, 3.0}) {
      const double h = 1e-6;
      const double fd = (fix.Q(t + h, r) - fix.Q(t - h, r)) / (2.0 * h);
      CHECK(fix.Qdot(t, r) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("charge fix edits only the scalar pair") {
  SpectralGrid sg(spec);
  GaussianSpec gs;
  gs.amplitude = 0.15;
  gs.sigma = 2.0;
  std::array<CField, 4> psi;
  fill_gaussian_spinor(spec, gs, psi);
  const CauchyData base = solve_constraints(sg, psi, zero3(spec), zero3(spec));
  ChargeFixProfile fix;
  fix.q = charge(spec, base.psi);
  const CauchyData fixed = charge_fix(sg, base, fix);
  CHECK(fixed.charge_fixed);
  double da0 = 0.0, dadot0 = 0.0, dspatial = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    da0 = std::max(da0, std::abs(fixed.a[0][i] - base.a[0][i]));
    dadot0 = std::max(dadot0, std::abs(fixed.adot[0][i] - base.adot[0][i]));
    for (int j = 1; j < 4; ++j) {
      dspatial = std::max(dspatial, std::abs(fixed.a[j][i] - base.a[j][i]));
      dspatial = std::max(dspatial, std::abs(fixed.adot[j][i] - base.adot[j][i]));
    }
  }
  CHECK(dspatial == 0.0);
  CHECK(da0 > 0.0);
  // the subtraction at a far grid point matches the Coulomb tail
  const int i = spec.n / 2 + 8;  // on the +x axis, r > 1 so rho = 1
  const std::size_t at = spec.index(i, spec.n / 2, spec.n / 2);
  const double r = spec.coord(i);
  CHECK(fixed.a[0][at] - base.a[0][at] ==
        doctest::Approx(-fix.q / (4.0 * M_PI * r)).epsilon(1e-12));
  (void)dadot0;
}

TEST_CASE("smallness norm scales linearly in the spinor amplitude") {
  SpectralGrid sg(spec);
  GaussianSpec gs;
  gs.amplitude = 0.1;
  gs.sigma = 2.0;
  std::array<CField, 4> psi;
  fill_gaussian_spinor(spec, gs, psi);
  CauchyData d = zero_data(spec);
  d.psi = psi;
  const double n1 = smallness_norm(sg, d, 0.25);
  for (auto& c : d.psi)
    for (auto& z : c) z *= 2.0;
  const double n2 = smallness_norm(sg, d, 0.25);
  CHECK(n1 > 0.0);
  CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-10));
  CHECK(smallness_norm(sg, zero_data(spec), 0.25) == 0.0);
}

TEST_CASE("cauchy data round trips through the container") {
  SpectralGrid sg(spec);
  GaussianSpec gs;
  gs.amplitude = 0.15;
  gs.sigma = 2.0;
  gs.k0 = {0.4, 0.0, -0.2};
  std::array<CField, 4> psi;
  fill_gaussian_spinor(spec, gs, psi);
  const CauchyData d = solve_constraints(sg, psi, smooth3(spec), zero3(spec));
  const std::string base = std::filesystem::temp_directory_path() / "mdlab_test_data";
  save_cauchy_data(base, d);
  const CauchyData r = load_cauchy_data(base);
  CHECK(r.grid == d.grid);
  CHECK(r.constrained == d.constrained);
  CHECK(r.charge_fixed == d.charge_fixed);
  CHECK(r.subtracted_mean == d.subtracted_mean);
  double gap = 0.0;
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < spec.size(); ++i) {
      gap = std::max(gap, std::abs(r.psi[c][i] - d.psi[c][i]));
      gap = std::max(gap, std::abs(r.a[c][i] - d.a[c][i]));
      gap = std::max(gap, std::abs(r.adot[c][i] - d.adot[c][i]));
    }
  CHECK(gap == 0.0);
  std::filesystem::remove(base + ".bin");
  std::filesystem::remove(base + ".json");
}

}  // TEST_SUITE
