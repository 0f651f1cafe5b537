#include "mdlab/wave_packet.hpp"

#include <cmath>
#include <stdexcept>

#include "mdlab/vector_fields.hpp"

namespace mdlab {

namespace {

// 4 pi int_0^1 (1-u^4)^4 u^2 du = 4 pi (1/3 - 4/7 + 6/11 - 4/15 + 1/19).
const double kChiNorm =
    1.0 / (4.0 * M_PI * (1.0 / 3.0 - 4.0 / 7.0 + 6.0 / 11.0 - 4.0 / 15.0 + 1.0 / 19.0));

std::array<double, 3> negate(const std::array<double, 3>& v) {
  return {-v[0], -v[1], -v[2]};
}

// Spacetime gradient of d_H^2(x/t, 0), from the Klein-ball gradient by the
// chain rule for w = x/t.
std::array<double, 4> dist2_grad4(const SpacetimePoint& p) {
  const std::array<double, 3> w = {p.x[0] / p.t, p.x[1] / p.t, p.x[2] / p.t};
  const std::array<double, 3> gw = dist2_grad(w, {0.0, 0.0, 0.0});
  const double wg = w[0] * gw[0] + w[1] * gw[1] + w[2] * gw[2];
  return {-wg / p.t, gw[0] / p.t, gw[1] / p.t, gw[2] / p.t};
}

}  // namespace

double WavePacket::chi(double y) {
  if (std::abs(y) >= 1.0) return 0.0;
  const double m = 1.0 - y * y;
  return kChiNorm * m * m * m * m;
}

double WavePacket::chi_d1(double y) {
  if (std::abs(y) >= 1.0) return 0.0;
  const double m = 1.0 - y * y;
  return -8.0 * kChiNorm * y * m * m * m;
}

double WavePacket::chi_d2(double y) {
  if (std::abs(y) >= 1.0) return 0.0;
  const double m = 1.0 - y * y;
  return kChiNorm * m * m * (56.0 * y * y - 8.0);
}

WavePacket::WavePacket(const GammaSet& g, const BoostVelocity& v, int sign, Order order,
                       std::array<cplx, 2> coeff)
    : g_(g),
      v_(v),
      sign_(sign),
      order_(order),
      coeff_(coeff),
      to_rest_(lorentz_boost(g, BoostVelocity(negate(v.v)))),
      from_rest_(spinor_boost(g, v)) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("wave packet sign must be +-1");
}

Spinor WavePacket::operator()(const SpacetimePoint& p) const {
  return from_rest_ * eval_rest(to_rest_.apply(p));
}

Spinor WavePacket::eval_rest(const SpacetimePoint& p) const {
  const double q = p.lorentz_q();
  if (p.t <= 0.0 || q <= 0.0)
    throw std::domain_error("wave packet evaluated outside the light cone");
  const double lam = std::sqrt(q);
  const std::array<double, 3> w = {p.x[0] / p.t, p.x[1] / p.t, p.x[2] / p.t};

  const double d = hyperbolic_distance(w, {0.0, 0.0, 0.0});
  const double d2 = d * d;
  const double y = d2 * lam;
  if (y >= 1.0) return Spinor{};

  const double s = static_cast<double>(sign_);
  const auto base = basis_V(g_, BoostVelocity(w), sign_);
  const Spinor sigma = coeff_[0] * base[0] + coeff_[1] * base[1];
  const cplx phase = std::exp(cplx(0.0, s * lam));

  const double c0 = chi(y);
  const Spinor lead = (c0 * phase) * sigma;
  if (order_ == Order::leading) return lead;

  const double c1 = chi_d1(y);
  const double c2 = chi_d2(y);

  // Transported amplitudes satisfy gamma^alpha d_alpha sigma = -s (3/2) sigma / lam
  // and x_alpha gamma^alpha sigma = s lam sigma, which collapses R2 and R3 onto
  // multiples of sigma (both lie in V^s, so they drop out of the projected
  // correction; kept for completeness).
  const Spinor r2 = (cplx(0.0, s * 1.5 / lam) * c0 * phase) * sigma;
  const Spinor r3 = (cplx(0.0, s * d2) * c1 * phase) * sigma;

  const std::array<double, 4> dg = dist2_grad4(p);
  Mat4 slash_dg{};
  for (int mu = 0; mu < 4; ++mu) slash_dg = slash_dg + g_.gamma[mu] * cplx(dg[mu]);
  const Spinor r4 = (cplx(0.0, -lam) * c1 * phase) * (slash_dg * sigma);

  // Hessian of d_H^2(x/t, 0) by centered differences of the analytic gradient.
  const double hh = 1e-4;
  double hess[4][4];
  for (int nu = 0; nu < 4; ++nu) {
    SpacetimePoint pp = p;
    SpacetimePoint pm = p;
    (nu == 0 ? pp.t : pp.x[nu - 1]) += hh;
    (nu == 0 ? pm.t : pm.x[nu - 1]) -= hh;
    const auto gp = dist2_grad4(pp);
    const auto gm = dist2_grad4(pm);
    for (int mu = 0; mu < 4; ++mu) hess[mu][nu] = (gp[mu] - gm[mu]) / (2.0 * hh);
  }
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < mu; ++nu) {
      const double sym = 0.5 * (hess[mu][nu] + hess[nu][mu]);
      hess[mu][nu] = hess[nu][mu] = sym;
    }

  const ProjectorPair proj = projectors_at(g_, p.t, p.x);
  const Mat4& p_res = (sign_ == 1) ? proj.p_plus : proj.p_minus;

  Mat4 m5{};
  for (int al = 0; al < 4; ++al) {
    const Mat4 right = p_res * g_.gamma[al];
    for (int be = 0; be < 4; ++be) {
      const cplx cab(c1 * hess[al][be] + lam * c2 * dg[al] * dg[be]);
      m5 = m5 + (g_.gamma[be] * right) * cab;
    }
  }
  const Spinor r5 = (0.5 * lam * phase) * (m5 * sigma);

  const Spinor sum = r2 + r3 + r4 + r5;
  return lead - 0.5 * (p_res * sum);
}

PacketResidual packet_residual(const GammaSet& g, const WavePacket& packet,
                               const SpacetimePoint& p, double h) {
  SpinorField4 f = [&packet](const Point4& q) {
    return packet(SpacetimePoint{q[0], {q[1], q[2], q[3]}});
  };
  PacketResidual out;
  out.f = dirac_op(g, f, {p.t, p.x[0], p.x[1], p.x[2]}, h);
  const double lam = std::sqrt(p.lorentz_q());
  const cplx unphase = std::exp(cplx(0.0, -static_cast<double>(packet.sign()) * lam));
  out.r = (lam * unphase) * out.f;
  return out;
}

}  // namespace mdlab
