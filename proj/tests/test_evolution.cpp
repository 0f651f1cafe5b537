#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mdlab/evolution.hpp"
#include "mdlab/oracle.hpp"

using namespace mdlab;

namespace {

const GridSpec spec{16, 8.0};

CauchyData small_data(const SpectralGrid& sg, double eps, bool constrain) {
  GaussianSpec gs;
  gs.amplitude = eps;
  gs.sigma = 1.2;
  gs.k0 = {0.5, 0.0, 0.0};
  CauchyData d = zero_data(spec);
  fill_gaussian_spinor(spec, gs, d.psi);
  if (constrain) {
    std::array<RField, 3> as, ads;
    for (auto& f : as) f.assign(spec.size(), 0.0);
    for (auto& f : ads) f.assign(spec.size(), 0.0);
    d = solve_constraints(sg, d.psi, as, ads);
  }
  return d;
}

double psi_l2_diff(const GridSpec& g, const std::array<CField, 4>& a,
                   const std::array<CField, 4>& b) {
  double s = 0.0;
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) s += std::norm(a[c][i] - b[c][i]);
  return std::sqrt(s * g.h() * g.h() * g.h());
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("cfl validation names the bound") {
  StepperConfig cfg;
  cfg.dt = 0.05;
  CHECK_NOTHROW(validate_cfl(spec, cfg));  // 0.05 * 16 * pi / 8 = 0.31
  cfg.dt = 0.09;                           // 0.565 > 0.5
  CHECK_THROWS_AS(validate_cfl(spec, cfg), std::invalid_argument);
  try {
    validate_cfl(spec, cfg);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("CFL") != std::string::npos);
  }
}

TEST_CASE("state_from_data copies fields and time zero") {
  SpectralGrid sg(spec);
  const CauchyData d = small_data(sg, 0.1, false);
  const FieldState s = state_from_data(d);
  CHECK(s.t == 0.0);
  CHECK(s.grid == spec);
  CHECK(s.psi[0] == d.psi[0]);
  CHECK(s.a[2] == d.a[2]);
  CHECK(s.adot[0] == d.adot[0]);
}

TEST_CASE("linear mode reproduces the exact free flow, RK4 order in dt") {
  SpectralGrid sg(spec);
  const CauchyData d = small_data(sg, 0.3, false);
  std::array<CField, 4> exact;
  oracle_linear_dirac(sg, d.psi, 1.0, exact);

  auto run = [&](double dt) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    cfg.linear_mode = true;
    Evolver ev(sg, cfg);
    ev.set_state(state_from_data(d));
    ev.advance_to(1.0);
    return psi_l2_diff(spec, ev.state().psi, exact);
  };
  const double e1 = run(0.05);
  const double e2 = run(0.025);
  CHECK(e1 <= 1e-5);
  CHECK(e2 < e1);
  const double ratio = e1 / e2;  // RK4: 16, allow stragglers
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("nonlinear run preserves charge and the Lorenz gauge") {
  SpectralGrid sg(spec);
  const CauchyData d = small_data(sg, 0.05, true);
  REQUIRE(d.constrained);
  const double q0 = charge(spec, d.psi);

  StepperConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 4.0;
  Evolver ev(sg, cfg);
  ev.set_state(state_from_data(d));
  const double l0 = lorenz_residual(sg, ev.state());
  double lmax = l0;
  while (ev.state().t < cfg.t_end - 1e-12) {
    ev.step();
    lmax = std::max(lmax, lorenz_residual(sg, ev.state()));
  }
  ev.check_finite();
  CHECK(std::abs(charge(spec, ev.state().psi) - q0) <= 1e-10 * std::abs(q0));
  // constrained data put the residual at solver tolerance; propagation keeps
  // it small (it is not identically conserved at finite resolution)
  CHECK(lmax <= 1e-4);
  CHECK(l0 <= 1e-10);
}

TEST_CASE("charge flux residual converges at second order in dt") {
  SpectralGrid sg(spec);
  const CauchyData d = small_data(sg, 0.1, true);

  auto residual_sup = [&](double dt) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    Evolver ev(sg, cfg);
    ev.set_state(state_from_data(d));
    const FieldState prev = ev.state();
    ev.step();
    const FieldState mid = ev.state();
    ev.step();
    const RField r = charge_flux_residual(sg, prev, mid, ev.state(), false, {});
    return sup_norm(spec, r.data());
  };
  const double r1 = residual_sup(0.04);
  const double r2 = residual_sup(0.02);
  CHECK(r1 <= 1e-3);
  const double ratio = r1 / r2;
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
}

TEST_CASE("h0 norm matches direct sums") {
  SpectralGrid sg(spec);
  FieldState s;
  s.grid = spec;
  for (auto& c : s.psi) c.assign(spec.size(), cplx{});
  for (auto& c : s.a) c.assign(spec.size(), 0.0);
  for (auto& c : s.adot) c.assign(spec.size(), 0.0);
  const double b = 2.0 * M_PI / spec.L;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      for (int k = 0; k < spec.n; ++k) {
        const std::size_t at = spec.index(i, j, k);
        s.psi[1][at] = cplx(0.3 * std::cos(b * spec.coord(i)), 0.0);
        s.a[2][at] = 0.5 * std::sin(2 * b * spec.coord(j));
        s.adot[0][at] = 0.2 * std::cos(b * spec.coord(k));
      }
  const auto n = h0_norm(sg, s);
  const double vol = spec.L * spec.L * spec.L;
  CHECK(n[0] == doctest::Approx(0.3 * std::sqrt(vol / 2.0)).epsilon(1e-12));
  // single modes: Hdot^s norm is |k|^s times the L2 norm
  CHECK(n[1] == doctest::Approx(std::sqrt(2 * b) * 0.5 * std::sqrt(vol / 2.0)).epsilon(1e-12));
  CHECK(n[2] == doctest::Approx(0.2 * std::sqrt(vol / 2.0) / std::sqrt(b)).epsilon(1e-12));
}

TEST_CASE("finiteness check and use-before-set are loud") {
  SpectralGrid sg(spec);
  StepperConfig cfg;
  cfg.dt = 0.05;
  Evolver bare(sg, cfg);
  CHECK_THROWS_AS(bare.step(), std::logic_error);

  Evolver ev(sg, cfg);
  FieldState s = state_from_data(small_data(sg, 0.1, false));
  s.psi[0][3] = cplx(std::nan(""), 0.0);
  ev.set_state(std::move(s));
  CHECK_THROWS_AS(ev.check_finite(), std::runtime_error);
}

TEST_CASE("kernel current matches the matrix route") {
  // spot values: current_at is the hand-coded Pauli-block version
  const cplx u1(0.3, -0.1), u2(-0.2, 0.7), l1(0.05, 0.4), l2(-0.6, 0.1);
  const auto j = current_at(u1, u2, l1, l2);
  const double n_up = std::norm(u1) + std::norm(u2), n_lo = std::norm(l1) + std::norm(l2);
  CHECK(j[0] == doctest::Approx(-(n_up + n_lo)).epsilon(1e-14));
  // J_3 (lower): 2 Re(conj(u1) l1 - conj(u2) l2) in this representation
  const double j3 = 2.0 * std::real(std::conj(u1) * l1 - std::conj(u2) * l2);
  CHECK(j[3] == doctest::Approx(j3).epsilon(1e-13));
}

}  // TEST_SUITE
