#include "mdlab/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace mdlab {

namespace {

double sq(double a) { return a * a; }

double ball_norm2(const std::array<double, 3>& v) {
  return v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
}

}  // namespace

double hyperbolic_distance(const std::array<double, 3>& v, const std::array<double, 3>& w) {
  const double v2 = ball_norm2(v), w2 = ball_norm2(w);
  if (v2 >= 1.0 || w2 >= 1.0)
    throw std::domain_error("hyperbolic_distance: arguments must lie in the open unit ball");
  const double vw = v[0] * w[0] + v[1] * w[1] + v[2] * w[2];
  const double c = (1.0 - vw) / std::sqrt((1.0 - v2) * (1.0 - w2));
  return std::acosh(std::max(1.0, c));
}

std::array<double, 3> dist2_grad(const std::array<double, 3>& w, const std::array<double, 3>& v) {
  const double v2 = ball_norm2(v), w2 = ball_norm2(w);
  if (v2 >= 1.0 || w2 >= 1.0)
    throw std::domain_error("dist2_grad: arguments must lie in the open unit ball");
  const double a = 1.0 - w2, b = 1.0 - v2;
  const double vw = v[0] * w[0] + v[1] * w[1] + v[2] * w[2];
  const double f = std::max(1.0, (1.0 - vw) / std::sqrt(a * b));
  const double d = std::acosh(f);
  // grad(d^2) = 2 d / sinh(d) * grad(cosh d); the prefactor tends to 2 as d -> 0.
  double pref;
  if (d < 1e-6) {
    pref = 2.0 * (1.0 - d * d / 6.0);
  } else {
    pref = 2.0 * d / std::sinh(d);
  }
  std::array<double, 3> grad{};
  for (int k = 0; k < 3; ++k) {
    const double dF = (-v[k] * a + (1.0 - vw) * w[k]) / (std::sqrt(b) * a * std::sqrt(a));
    grad[k] = pref * dF;
  }
  return grad;
}

SpacetimePoint LorentzBoost::apply(const SpacetimePoint& p) const {
  const std::array<double, 4> in{p.t, p.x[0], p.x[1], p.x[2]};
  std::array<double, 4> out{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) out[mu] += l(mu, nu) * in[nu];
  return {out[0], {out[1], out[2], out[3]}};
}

LorentzBoost lorentz_boost(const GammaSet& g, const BoostVelocity& v) {
  LorentzBoost b;
  const double chi = v.rapidity();
  const double ch = std::cosh(chi), sh = std::sinh(chi);
  const auto e = v.dir();
  b.lambda[0] = ch;
  for (int j = 0; j < 3; ++j) {
    b.lambda[0 * 4 + (j + 1)] = sh * e[j];
    b.lambda[(j + 1) * 4 + 0] = sh * e[j];
    for (int k = 0; k < 3; ++k)
      b.lambda[(j + 1) * 4 + (k + 1)] = (j == k ? 1.0 : 0.0) + (ch - 1.0) * e[j] * e[k];
  }
  b.spinor = spinor_boost(g, v);
  return b;
}

RegionLabel region_classify(double T, const SpacetimePoint& p) {
  if (!(T > 0.0)) throw std::domain_error("region_classify: T must be positive");
  const double t = p.t, r = p.r();
  if (t < T || t > 4.0 * T)
    throw std::domain_error("region_classify: point outside the slab T <= t <= 4T");
  const double q = t * t - r * r;
  if (q > 4.0 * T * T)
    throw std::domain_error("region_classify: point above the top hyperboloid of C_T");

  if (q >= T * T / 4.0) return {RegionKind::CT_int};

  const double u = t - r;
  if (std::abs(u) <= 2.0) return {RegionKind::CT1};

  const double s_max = std::exp2(std::floor(std::log2(T / 2.0)));
  const double au = std::abs(u);
  const double s = std::exp2(std::floor(std::log2(au)));
  if (s <= s_max) return {u > 0.0 ? RegionKind::CTS_plus : RegionKind::CTS_minus, s};

  return {RegionKind::CT_ext};
}

HyperboloidChart::HyperboloidChart(double rho_, double radius_, double h_,
                                   const std::array<double, 3>& center_)
    : rho(rho_), center(center_), radius(radius_), h(h_) {
  if (!(rho > 0.0) || !(radius > 0.0) || !(h > 0.0))
    throw std::domain_error("HyperboloidChart: rho, radius, h must be positive");
  n_ = 2 * static_cast<int>(std::floor(radius / h)) + 1;
}

void HyperboloidChart::for_each_node(
    const std::function<void(const SpacetimePoint&, double, double)>& fn) const {
  const int half = (n_ - 1) / 2;
  const double rho2 = rho * rho;
  for (int i = -half; i <= half; ++i)
    for (int j = -half; j <= half; ++j)
      for (int k = -half; k <= half; ++k) {
        SpacetimePoint p;
        p.x = {center[0] + i * h, center[1] + j * h, center[2] + k * h};
        const double r2 = ball_norm2(p.x);
        p.t = std::sqrt(rho2 + r2);
        const double cell = h * h * h;
        const double w_dvh = cell / (p.t * rho2);
        const double w_dsig = std::sqrt(p.t * p.t + r2) / p.t * cell;
        fn(p, w_dvh, w_dsig);
      }
}

Mat4 projector_derivative_residual(const GammaSet& g, const SpacetimePoint& p, int mu, int sign,
                                   double h) {
  const auto pick = [&](const ProjectorPair& pp) { return sign > 0 ? pp.p_plus : pp.p_minus; };
  SpacetimePoint lo = p, hi = p;
  if (mu == 0) {
    lo.t -= h;
    hi.t += h;
  } else {
    lo.x[mu - 1] -= h;
    hi.x[mu - 1] += h;
  }
  const Mat4 fd = (pick(projectors_at(g, hi.t, hi.x)) - pick(projectors_at(g, lo.t, lo.x))) *
                  (1.0 / (2.0 * h));
  const double lambda = std::sqrt(p.lorentz_q());
  const double x_mu = mu == 0 ? -p.t : p.x[mu - 1];
  const Mat4 exact = (g.lower(mu) + gamma_H(g, p.t, p.x) * x_mu * (1.0 / lambda)) *
                     (-sign / (2.0 * lambda));
  return fd - exact;
}

QuadratureResult hyperboloid_quadrature(const HyperboloidChart& chart,
                                        const std::function<cplx(const SpacetimePoint&)>& f,
                                        bool use_dsigma) {
  QuadratureResult res;
  const int half = (chart.nodes_per_axis() - 1) / 2;
  const double edge = (half - 1.5) * chart.h;  // outer two node shells
  chart.for_each_node([&](const SpacetimePoint& p, double w_dvh, double w_dsig) {
    const double w = use_dsigma ? w_dsig : w_dvh;
    const cplx val = f(p);
    res.value += w * val;
    const double m = std::abs(val) * w;
    res.abs_total += m;
    const double off = std::max({std::abs(p.x[0] - chart.center[0]),
                                 std::abs(p.x[1] - chart.center[1]),
                                 std::abs(p.x[2] - chart.center[2])});
    if (off > edge) res.abs_boundary += m;
  });
  return res;
}

}  // namespace mdlab
