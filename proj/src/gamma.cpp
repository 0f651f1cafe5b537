#include "mdlab/gamma.hpp"

#include <cmath>
#include <stdexcept>

namespace mdlab {

namespace {

constexpr double kNullRejection = 1e-10;

Mat4 embed_offdiag(const Mat2& s, cplx upper_sign, cplx lower_sign) {
  // [[0, upper_sign*s], [lower_sign*s, 0]]
  Mat4 m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      m(r, c + 2) = upper_sign * s(r, c);
      m(r + 2, c) = lower_sign * s(r, c);
    }
  return m;
}

}  // namespace

GammaSet build_gamma_set() {
  GammaSet g;

  Mat2 s1, s2, s3;
  s1(0, 1) = 1.0;
  s1(1, 0) = 1.0;
  s2(0, 1) = -I;
  s2(1, 0) = I;
  s3(0, 0) = 1.0;
  s3(1, 1) = -1.0;
  g.pauli = {s1, s2, s3};

  Mat4 g0;
  g0(0, 0) = 1.0;
  g0(1, 1) = 1.0;
  g0(2, 2) = -1.0;
  g0(3, 3) = -1.0;
  g.gamma[0] = g0;
  for (int j = 0; j < 3; ++j)
    g.gamma[j + 1] = embed_offdiag(g.pauli[j], cplx{1.0, 0.0}, cplx{-1.0, 0.0});

  return g;
}

std::array<cplx, 4> dirac_adjoint(const GammaSet& g, const Spinor& psi) {
  std::array<cplx, 4> row{};
  for (int j = 0; j < 4; ++j) {
    cplx s{};
    for (int i = 0; i < 4; ++i) s += std::conj(psi[i]) * g.gamma[0](i, j);
    row[j] = s;
  }
  return row;
}

cplx bar_sandwich(const GammaSet& g, const Spinor& psi, const Mat4& m) {
  const auto bar = dirac_adjoint(g, psi);
  cplx s{};
  for (int i = 0; i < 4; ++i) {
    cplx mi{};
    for (int j = 0; j < 4; ++j) mi += m(i, j) * psi[j];
    s += bar[i] * mi;
  }
  return s;
}

std::array<double, 4> current_density(const GammaSet& g, const Spinor& psi) {
  std::array<double, 4> j{};
  for (int mu = 0; mu < 4; ++mu) j[mu] = bar_sandwich(g, psi, g.lower(mu)).real();
  return j;
}

Mat4 gamma_theta(const GammaSet& g, const std::array<double, 3>& theta) {
  Mat4 m;
  for (int j = 0; j < 3; ++j) m = m + g.gamma[j + 1] * theta[j];
  return m;
}

Mat4 gamma_H(const GammaSet& g, double t, const std::array<double, 3>& x) {
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  const double q = t * t - r2;
  if (q < kNullRejection * (t * t + r2) || t <= 0.0)
    throw std::domain_error("gamma_H: point not strictly inside the forward cone");
  // x_alpha gamma^alpha = -t gamma^0 + x_j gamma^j
  Mat4 m = g.gamma[0] * (-t);
  for (int j = 0; j < 3; ++j) m = m + g.gamma[j + 1] * x[j];
  return m * (1.0 / std::sqrt(q));
}

BoostVelocity::BoostVelocity(const std::array<double, 3>& vin) : v(vin) {
  if (abs() >= 1.0) throw std::domain_error("BoostVelocity: |v| must be < 1");
}

double BoostVelocity::abs() const {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double BoostVelocity::rapidity() const { return std::atanh(abs()); }

std::array<double, 3> BoostVelocity::dir() const {
  const double a = abs();
  if (a == 0.0) return {1.0, 0.0, 0.0};
  return {v[0] / a, v[1] / a, v[2] / a};
}

ProjectorPair projectors_theta(const GammaSet& g, const std::array<double, 3>& theta) {
  const Mat4 gt = g.gamma[0] * gamma_theta(g, theta);
  const Mat4 id = Mat4::identity();
  return {(id + gt) * 0.5, (id - gt) * 0.5, ProjectorFlavor::theta};
}

ProjectorPair projectors_at(const GammaSet& g, double t, const std::array<double, 3>& x) {
  const Mat4 gh = gamma_H(g, t, x);
  const Mat4 id = Mat4::identity();
  return {(id - gh) * 0.5, (id + gh) * 0.5, ProjectorFlavor::v};
}

ProjectorPair projectors_v(const GammaSet& g, const BoostVelocity& v) {
  return projectors_at(g, 1.0, v.v);
}

cplx inner_product_H(const GammaSet& g, const Spinor& psi1, const Spinor& psi2,
                     double t, const std::array<double, 3>& x) {
  const Spinor w = (g.gamma[0] * gamma_H(g, t, x)) * psi1;
  return -dot(w, psi2);
}

cplx inner_product_H(const GammaSet& g, const Spinor& psi1, const Spinor& psi2,
                     const BoostVelocity& v) {
  return inner_product_H(g, psi1, psi2, 1.0, v.v);
}

double norm_H(const GammaSet& g, const Spinor& psi, double t,
              const std::array<double, 3>& x) {
  return std::sqrt(std::max(0.0, inner_product_H(g, psi, psi, t, x).real()));
}

Mat4 spinor_boost(const GammaSet& g, const BoostVelocity& v) {
  const double chi = v.rapidity();
  const Mat4 k = g.gamma[0] * gamma_theta(g, v.dir());  // K^2 = I
  return Mat4::identity() * std::cosh(chi / 2.0) + k * std::sinh(chi / 2.0);
}

std::array<Spinor, 2> basis_V(const GammaSet& g, const BoostVelocity& v, int sign) {
  // At v = 0: gamma^H = -gamma^0, so V^+ = span{e3,e4}, V^- = span{e1,e2}.
  std::array<Spinor, 2> rest{};
  if (sign > 0) {
    rest[0][2] = 1.0;
    rest[1][3] = 1.0;
  } else {
    rest[0][0] = 1.0;
    rest[1][1] = 1.0;
  }
  if (v.abs() == 0.0) return rest;
  const Mat4 s = spinor_boost(g, v);
  return {s * rest[0], s * rest[1]};
}

}  // namespace mdlab
