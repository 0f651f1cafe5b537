#include <array>
#include <random>

#include "doctest.h"
#include "mdlab/gamma.hpp"
#include "mdlab/geometry.hpp"

// The evolution module keeps an independent Pauli-block route to the current.
namespace mdlab {
std::array<double, 4> current_at(cplx u1, cplx u2, cplx l1, cplx l2);
}

using namespace mdlab;

namespace {

std::mt19937 rng(20240915);

double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Spinor random_spinor() {
  Spinor s;
  for (int i = 0; i < 4; ++i) s[i] = cplx(urand(-1, 1), urand(-1, 1));
  return s;
}

std::array<double, 3> random_velocity(double vmax) {
  std::array<double, 3> v;
  double n2;
  do {
    for (double& c : v) c = urand(-vmax, vmax);
    n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  } while (n2 > vmax * vmax);
  return v;
}

std::array<double, 3> random_direction() {
  std::array<double, 3> d;
  double n;
  do {
    for (double& c : d) c = urand(-1, 1);
    n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  } while (n < 0.1);
  for (double& c : d) c /= n;
  return d;
}

}  // namespace

TEST_SUITE("gamma") {

TEST_CASE("anticommutators reproduce the metric") {
  const GammaSet g = build_gamma_set();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const Mat4 anti = g.gamma[mu] * g.gamma[nu] + g.gamma[nu] * g.gamma[mu];
      Mat4 want;
      if (mu == nu) want = Mat4::identity() * (-2.0 * (mu == 0 ? -1.0 : 1.0));
      CHECK((anti - want).max_abs() <= 1e-15);
    }
}

TEST_CASE("frozen representation entries") {
  const GammaSet g = build_gamma_set();
  // gamma^0 = diag(1,1,-1,-1)
  Mat4 g0;
  g0(0, 0) = 1.0;
  g0(1, 1) = 1.0;
  g0(2, 2) = -1.0;
  g0(3, 3) = -1.0;
  CHECK((g.gamma[0] - g0).max_abs() == 0.0);
  // gamma^j = [[0, sigma_j], [-sigma_j, 0]]
  for (int j = 0; j < 3; ++j)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        CHECK(g.gamma[j + 1](r, c + 2) == g.pauli[j](r, c));
        CHECK(g.gamma[j + 1](r + 2, c) == -g.pauli[j](r, c));
        CHECK(g.gamma[j + 1](r, c) == cplx(0.0));
        CHECK(g.gamma[j + 1](r + 2, c + 2) == cplx(0.0));
      }
  // Pauli algebra: sigma_a sigma_b = delta_ab I + i eps_abc sigma_c
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Mat2 prod{};
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          for (int k = 0; k < 2; ++k) prod(r, c) += g.pauli[a](r, k) * g.pauli[b](k, c);
      Mat2 want{};
      if (a == b) {
        want(0, 0) = want(1, 1) = 1.0;
      } else {
        const int c = 3 - a - b;
        const double eps = ((a + 1) % 3 == b) ? 1.0 : -1.0;
        for (int r = 0; r < 2; ++r)
          for (int cc = 0; cc < 2; ++cc) want(r, cc) = I * eps * g.pauli[c](r, cc);
      }
      for (int k = 0; k < 4; ++k) CHECK(std::abs(prod.a[k] - want.a[k]) <= 1e-15);
    }
}

TEST_CASE("adjoint relations") {
  const GammaSet g = build_gamma_set();
  CHECK((g.gamma[0].adjoint() - g.gamma[0]).max_abs() == 0.0);
  for (int j = 1; j < 4; ++j) CHECK((g.gamma[j].adjoint() + g.gamma[j]).max_abs() == 0.0);
  // gamma^0 gamma^mu gamma^0 = (gamma^mu)^dagger
  for (int mu = 0; mu < 4; ++mu)
    CHECK((g.gamma[0] * g.gamma[mu] * g.gamma[0] - g.gamma[mu].adjoint()).max_abs() == 0.0);
}

TEST_CASE("lower index matches the diagonal metric") {
  const GammaSet g = build_gamma_set();
  CHECK((g.lower(0) + g.gamma[0]).max_abs() == 0.0);
  for (int j = 1; j < 4; ++j) CHECK((g.lower(j) - g.gamma[j]).max_abs() == 0.0);
}

TEST_CASE("current density is real, matches the kernel route, J0 = -|psi|^2") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 50; ++trial) {
    const Spinor psi = random_spinor();
    const auto j = current_density(g, psi);
    CHECK(j[0] == doctest::Approx(-psi.norm2()).epsilon(1e-13));
    const auto jk = current_at(psi[0], psi[1], psi[2], psi[3]);
    for (int mu = 0; mu < 4; ++mu) CHECK(std::abs(j[mu] - jk[mu]) <= 1e-13 * (1.0 + psi.norm2()));
    // realness: psibar gamma_mu psi has no imaginary part
    for (int mu = 0; mu < 4; ++mu) {
      const cplx s = bar_sandwich(g, psi, g.lower(mu));
      CHECK(std::abs(s.imag()) <= 1e-14 * (1.0 + psi.norm2()));
    }
  }
}

TEST_CASE("current transforms as a Lorentz vector") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 20; ++trial) {
    const BoostVelocity v(random_velocity(0.8));
    const LorentzBoost L = lorentz_boost(g, v);
    const Spinor psi = random_spinor();
    const Spinor psi_b = L.spinor * psi;
    const auto j = current_density(g, psi);
    const auto jb = current_density(g, psi_b);
    // raise, transform with Lambda, compare raised components
    const std::array<double, 4> jup{-j[0], j[1], j[2], j[3]};
    const double scale = 1.0 + psi.norm2();
    for (int mu = 0; mu < 4; ++mu) {
      double want = 0.0;
      for (int nu = 0; nu < 4; ++nu) want += L.l(mu, nu) * jup[nu];
      const double got = (mu == 0 ? -jb[0] : jb[mu]);
      CHECK(std::abs(got - want) <= 1e-11 * scale);
    }
  }
}

TEST_CASE("radial projectors: eigenstructure and gamma^0 exchange") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 100; ++trial) {
    const auto theta = random_direction();
    const ProjectorPair pp = projectors_theta(g, theta);
    CHECK((pp.p_plus * pp.p_plus - pp.p_plus).max_abs() <= 1e-14);
    CHECK((pp.p_minus * pp.p_minus - pp.p_minus).max_abs() <= 1e-14);
    CHECK((pp.p_plus + pp.p_minus - Mat4::identity()).max_abs() <= 1e-14);
    CHECK((pp.p_plus.adjoint() - pp.p_plus).max_abs() <= 1e-14);
    // trace = rank = 2
    cplx tr{};
    for (int i = 0; i < 4; ++i) tr += pp.p_plus(i, i);
    CHECK(std::abs(tr - cplx(2.0)) <= 1e-13);
    // gamma^0 gamma^theta has eigenvalue +-1 on the ranges
    const Mat4 op = g.gamma[0] * gamma_theta(g, theta);
    CHECK((op * pp.p_plus - pp.p_plus).max_abs() <= 1e-13);
    CHECK((op * pp.p_minus + pp.p_minus).max_abs() <= 1e-13);
    // gamma^0 exchanges the pair
    CHECK((g.gamma[0] * pp.p_plus * g.gamma[0] - pp.p_minus).max_abs() <= 1e-13);
  }
}

TEST_CASE("gamma^H squares to the identity and rejects null points") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 50; ++trial) {
    const double t = urand(0.5, 3.0);
    const auto v = random_velocity(0.9);
    const std::array<double, 3> x{v[0] * t, v[1] * t, v[2] * t};
    const Mat4 gh = gamma_H(g, t, x);
    CHECK((gh * gh - Mat4::identity()).max_abs() <= 1e-12);
    // tracefree
    cplx tr{};
    for (int i = 0; i < 4; ++i) tr += gh(i, i);
    CHECK(std::abs(tr) <= 1e-13);
  }
  CHECK_THROWS_AS((void)gamma_H(g, 1.0, {1.0, 0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS((void)gamma_H(g, 1.0, {0.0, 1.2, 0.0}), std::domain_error);
}

TEST_CASE("boost covariance of gamma^H") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 20; ++trial) {
    const BoostVelocity v(random_velocity(0.8));
    const LorentzBoost L = lorentz_boost(g, v);
    SpacetimePoint p{urand(1.0, 3.0), random_velocity(0.6)};
    p.x = {p.x[0] * p.t, p.x[1] * p.t, p.x[2] * p.t};
    const SpacetimePoint q = L.apply(p);
    const Mat4 lhs = L.spinor * gamma_H(g, p.t, p.x);
    const Mat4 rhs = gamma_H(g, q.t, q.x) * L.spinor;
    CHECK((lhs - rhs).max_abs() <= 1e-12);
  }
}

TEST_CASE("hyperboloid projectors: algebra at the v-ray") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 100; ++trial) {
    const BoostVelocity v(random_velocity(0.95));
    const ProjectorPair pp = projectors_v(g, v);
    CHECK((pp.p_plus * pp.p_plus - pp.p_plus).max_abs() <= 1e-12);
    CHECK((pp.p_minus * pp.p_minus - pp.p_minus).max_abs() <= 1e-12);
    CHECK((pp.p_plus + pp.p_minus - Mat4::identity()).max_abs() <= 1e-12);
    CHECK((pp.p_plus * pp.p_minus).max_abs() <= 1e-12);
    // consistent with an arbitrary point on the same ray
    const double t = 2.7;
    const ProjectorPair pp2 = projectors_at(g, t, {v.v[0] * t, v.v[1] * t, v.v[2] * t});
    CHECK((pp.p_plus - pp2.p_plus).max_abs() <= 1e-12);
  }
}

TEST_CASE("H inner product: positivity, symmetry, Euclidean reduction") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 50; ++trial) {
    const BoostVelocity v(random_velocity(0.9));
    const Spinor a = random_spinor();
    const Spinor b = random_spinor();
    const cplx ab = inner_product_H(g, a, b, v);
    const cplx ba = inner_product_H(g, b, a, v);
    CHECK(std::abs(ab - std::conj(ba)) <= 1e-13 * (1.0 + a.norm() * b.norm()));
    const cplx aa = inner_product_H(g, a, a, v);
    CHECK(aa.real() > 0.0);
    CHECK(std::abs(aa.imag()) <= 1e-13 * aa.real());
    // sesquilinearity in the first slot
    const cplx s(0.3, -0.8);
    const cplx sab = inner_product_H(g, s * a, b, v);
    CHECK(std::abs(sab - s * ab) <= 1e-12 * (1.0 + std::abs(ab)));
    // the (t,x) overload sees only x/t
    const double t = 1.9;
    const cplx ab2 = inner_product_H(g, a, b, t, {v.v[0] * t, v.v[1] * t, v.v[2] * t});
    CHECK(std::abs(ab - ab2) <= 1e-12 * (1.0 + std::abs(ab)));
  }
  // at v = 0 the form reduces to the Euclidean inner product
  const BoostVelocity rest({0.0, 0.0, 0.0});
  const Spinor a = random_spinor();
  const Spinor b = random_spinor();
  CHECK(std::abs(inner_product_H(g, a, b, rest) - dot(a, b)) <= 1e-14 * (1.0 + a.norm() * b.norm()));
}

TEST_CASE("basis_V: kernel membership, eigenvalue, H-orthonormality") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 40; ++trial) {
    const BoostVelocity v(random_velocity(0.9));
    const ProjectorPair pp = projectors_v(g, v);
    const Mat4 gh = gamma_H(g, 1.0, v.v);
    for (int s : {1, -1}) {
      const auto basis = basis_V(g, v, s);
      const Mat4& killer = (s == 1) ? pp.p_plus : pp.p_minus;
      for (int j = 0; j < 2; ++j) {
        CHECK((killer * basis[j]).norm() <= 1e-12);
        CHECK((gh * basis[j] - double(s) * basis[j]).norm() <= 1e-12);
        for (int k = 0; k < 2; ++k) {
          const cplx ip = inner_product_H(g, basis[j], basis[k], v);
          CHECK(std::abs(ip - (j == k ? cplx(1.0) : cplx(0.0))) <= 1e-12);
        }
      }
      // V^+ and V^- are H-orthogonal
      const auto other = basis_V(g, v, -s);
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          CHECK(std::abs(inner_product_H(g, basis[j], other[k], v)) <= 1e-12);
    }
  }
}

TEST_CASE("spinor boost conjugates gamma^H and matches the coordinate boost") {
  const GammaSet g = build_gamma_set();
  for (int trial = 0; trial < 20; ++trial) {
    const BoostVelocity v(random_velocity(0.85));
    const Mat4 S = spinor_boost(g, v);
    const Mat4 Sinv = spinor_boost(g, BoostVelocity({-v.v[0], -v.v[1], -v.v[2]}));
    CHECK((S * Sinv - Mat4::identity()).max_abs() <= 1e-12);
    const Mat4 gh0 = gamma_H(g, 1.0, {0.0, 0.0, 0.0});
    const Mat4 ghv = gamma_H(g, 1.0, v.v);
    CHECK((S * gh0 * Sinv - ghv).max_abs() <= 1e-12);
    CHECK((lorentz_boost(g, v).spinor - S).max_abs() <= 1e-13);
  }
}

TEST_CASE("BoostVelocity bookkeeping") {
  const BoostVelocity v({0.3, 0.0, -0.4});
  CHECK(v.abs() == doctest::Approx(0.5));
  CHECK(v.rapidity() == doctest::Approx(std::atanh(0.5)));
  CHECK(v.dir()[0] == doctest::Approx(0.6));
  CHECK(v.dir()[2] == doctest::Approx(-0.8));
  CHECK(v.upper()[0] == 1.0);
  CHECK(v.lower()[0] == -1.0);
  CHECK(v.lower()[3] == doctest::Approx(-0.4));
  const BoostVelocity rest({0.0, 0.0, 0.0});
  CHECK(rest.dir()[0] == 1.0);  // e1 convention
  CHECK_THROWS_AS(BoostVelocity({1.0, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("dirac adjoint and sandwich") {
  const GammaSet g = build_gamma_set();
  const Spinor psi = random_spinor();
  const auto bar = dirac_adjoint(g, psi);
  // psibar psi = psi^dagger gamma^0 psi, real
  cplx direct{};
  for (int i = 0; i < 4; ++i) direct += bar[i] * psi[i];
  const cplx via = bar_sandwich(g, psi, Mat4::identity());
  CHECK(std::abs(direct - via) <= 1e-14 * (1.0 + psi.norm2()));
  CHECK(std::abs(via.imag()) <= 1e-14 * (1.0 + psi.norm2()));
}

}  // TEST_SUITE
