#include "mdlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdlab {

namespace {

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// v^alpha A_alpha = A_0 + v.A for lower-index A along the ray.
double ray_contraction(const std::array<double, 3>& v, const std::array<double, 4>& a_lower) {
  return a_lower[0] + v[0] * a_lower[1] + v[1] * a_lower[2] + v[2] * a_lower[3];
}

double norm_h_at(const GammaSet& g, const Spinor& s, const BoostVelocity& v) {
  return std::sqrt(std::max(0.0, inner_product_H(g, s, s, v).real()));
}

}  // namespace

HyperboloidChart packet_chart(const BoostVelocity& v, double rho, double h, double pad) {
  if (rho <= 0.0 || h <= 0.0) throw std::invalid_argument("packet_chart: bad rho or h");
  const double gamma_v = 1.0 / std::sqrt(1.0 - v.abs() * v.abs());
  const double t_c = rho * gamma_v;
  std::array<double, 3> center = {v.v[0] * t_c, v.v[1] * t_c, v.v[2] * t_c};
  for (double& c : center) c = std::round(c / h) * h;

  // Extent of the cutoff support d_H(w, v) <= rho^{-1/2}: sample the boundary
  // sphere in the rest frame and boost out.
  const GammaSet g = build_gamma_set();
  const LorentzBoost lab = lorentz_boost(g, v);
  const double wr = std::tanh(1.0 / std::sqrt(rho));
  double extent = 0.0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        const double nn = std::sqrt(double(a * a + b * b + c * c));
        const SpacetimePoint rest{1.0, {wr * a / nn, wr * b / nn, wr * c / nn}};
        const SpacetimePoint out = lab.apply(rest);
        const std::array<double, 3> w = {out.x[0] / out.t, out.x[1] / out.t, out.x[2] / out.t};
        const double tw = rho / std::sqrt(1.0 - dot3(w, w));
        for (int d = 0; d < 3; ++d)
          extent = std::max(extent, std::abs(w[d] * tw - center[d]));
      }
  const double radius = std::max(pad * extent + 2.0 * h, 4.0 * h);
  return HyperboloidChart(rho, radius, h, center);
}

ProfileSample test_profile(const GammaSet& g, const PsiSampler& psi, const BoostVelocity& v,
                           const HyperboloidChart& chart) {
  const double rho = chart.rho;
  const double prefac = rho * rho * rho;  // (t^2 - (vt)^2)^{3/2} on the level

  ProfileSample out;
  out.rho = rho;
  out.t = rho / std::sqrt(1.0 - v.abs() * v.abs());
  out.v = v.v;

  for (int s : {1, -1}) {
    std::array<cplx, 2> coeff{};
    for (int j = 0; j < 2; ++j) {
      std::array<cplx, 2> unit{};
      unit[j] = 1.0;
      const WavePacket packet(g, v, s, WavePacket::Order::corrected, unit);
      const QuadratureResult q = hyperboloid_quadrature(
          chart, [&](const SpacetimePoint& p) -> cplx {
            const Spinor pk = packet(p);
            // skip the field sample where the packet vanishes
            if (std::abs(pk[0]) + std::abs(pk[1]) + std::abs(pk[2]) + std::abs(pk[3]) == 0.0)
              return cplx(0.0);
            return inner_product_H(g, psi(p), pk, p.t, p.x);
          });
      if (q.truncated())
        throw std::runtime_error("test_profile: packet support truncated by the chart");
      coeff[j] = prefac * q.value;
    }
    const auto basis = basis_V(g, v, s);
    const Spinor value = coeff[0] * basis[0] + coeff[1] * basis[1];
    if (s == 1) {
      out.coeff_plus = coeff;
      out.rho_plus = value;
    } else {
      out.coeff_minus = coeff;
      out.rho_minus = value;
    }
  }
  return out;
}

ProfileSample modulation_step(const GammaSet& g, const ProfileSample& in,
                              const std::function<std::array<double, 4>(double)>& A_lower,
                              double dt, ModulationMode mode) {
  const BoostVelocity v(in.v);
  const double sq = std::sqrt(1.0 - v.abs() * v.abs());
  const ProjectorPair proj = projectors_v(g, v);

  const auto rhs = [&](double t, const Spinor& p, const Spinor& m) {
    const std::array<double, 4> a = A_lower(t);
    const cplx iva(0.0, ray_contraction(in.v, a));
    Spinor dp = iva * p;
    Spinor dm = iva * m;
    if (mode == ModulationMode::with_nonresonant) {
      Mat4 slash_a{};
      for (int mu = 0; mu < 4; ++mu) slash_a = slash_a + g.gamma[mu] * cplx(a[mu]);
      const cplx osc = std::exp(cplx(0.0, 2.0 * t * sq));
      // range of p_minus is V^+, range of p_plus is V^-
      dp = dp + (cplx(0.0, sq) * osc) * (proj.p_minus * (slash_a * m));
      dm = dm + (cplx(0.0, sq) * std::conj(osc)) * (proj.p_plus * (slash_a * p));
    }
    return std::pair<Spinor, Spinor>(dp, dm);
  };

  const double t0 = in.t;
  const auto [k1p, k1m] = rhs(t0, in.rho_plus, in.rho_minus);
  const auto [k2p, k2m] = rhs(t0 + 0.5 * dt, in.rho_plus + (0.5 * dt) * k1p,
                              in.rho_minus + (0.5 * dt) * k1m);
  const auto [k3p, k3m] = rhs(t0 + 0.5 * dt, in.rho_plus + (0.5 * dt) * k2p,
                              in.rho_minus + (0.5 * dt) * k2m);
  const auto [k4p, k4m] =
      rhs(t0 + dt, in.rho_plus + dt * k3p, in.rho_minus + dt * k3m);

  ProfileSample out = in;
  out.t = t0 + dt;
  out.rho = out.t * sq;
  out.rho_plus = in.rho_plus + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  out.rho_minus = in.rho_minus + (dt / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);

  const auto bp = basis_V(g, v, 1);
  const auto bm = basis_V(g, v, -1);
  for (int j = 0; j < 2; ++j) {
    out.coeff_plus[j] = inner_product_H(g, out.rho_plus, bp[j], v);
    out.coeff_minus[j] = inner_product_H(g, out.rho_minus, bm[j], v);
  }
  return out;
}

PhaseAccumulator accumulate_theta(PhaseAccumulator acc, const std::vector<double>& t,
                                  const std::vector<std::array<double, 4>>& a_upper) {
  if (t.size() != a_upper.size())
    throw std::invalid_argument("accumulate_theta: sample arrays differ in length");
  for (std::size_t k = 0; k < t.size(); ++k) {
    // v_alpha A^alpha with v_0 = -1
    const double f = -a_upper[k][0] + acc.v[0] * a_upper[k][1] + acc.v[1] * a_upper[k][2] +
                     acc.v[2] * a_upper[k][3];
    if (acc.has_last) {
      if (t[k] < acc.t_last - 1e-12)
        throw std::invalid_argument("accumulate_theta: samples not monotone in t");
      acc.theta += 0.5 * (acc.f_last + f) * (t[k] - acc.t_last);
    }
    acc.t_last = t[k];
    acc.f_last = f;
    acc.has_last = true;
  }
  return acc;
}

ExtractionResult extract_rho_infinity(const GammaSet& g, const ProfileHistory& hist,
                                      const std::array<double, 4>* a_inf_lower) {
  const std::size_t n = hist.samples.size();
  if (n < 3) throw std::invalid_argument("extract_rho_infinity: needs >= 3 samples");
  if (!hist.theta.empty() && hist.theta.size() != n)
    throw std::invalid_argument("extract_rho_infinity: theta history misaligned");

  const BoostVelocity v(hist.v);
  const double sq = std::sqrt(1.0 - v.abs() * v.abs());

  std::vector<Spinor> rp(n), rm(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = hist.samples[k].t;
    double phase = 0.0;
    if (a_inf_lower != nullptr) {
      phase = ray_contraction(hist.v, *a_inf_lower) / sq * std::log(t * sq);
    } else if (!hist.theta.empty()) {
      phase = hist.theta[k];
    }
    const cplx un = std::exp(cplx(0.0, -phase));
    rp[k] = un * hist.samples[k].rho_plus;
    rm[k] = un * hist.samples[k].rho_minus;
  }

  ExtractionResult out;
  out.rho_inf_plus = rp.back();
  out.rho_inf_minus = rm.back();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    out.cauchy_plus.push_back(norm_h_at(g, rp[k + 1] - rp[k], v));
    out.cauchy_minus.push_back(norm_h_at(g, rm[k + 1] - rm[k], v));
  }
  const auto nonincreasing = [](const std::vector<double>& d) {
    for (std::size_t k = 0; k + 1 < d.size(); ++k)
      if (d[k + 1] > d[k] * (1.0 + 1e-9) + 1e-15) return false;
    return true;
  };
  out.converged_plus = nonincreasing(out.cauchy_plus);
  out.converged_minus = nonincreasing(out.cauchy_minus);
  return out;
}

void ProfileLimits::allocate() {
  const std::size_t sz = size();
  valid.assign(sz, 0);
  rho_plus.assign(sz, Spinor{});
  rho_minus.assign(sz, Spinor{});
  a_inf.assign(sz, std::array<double, 4>{});
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j)
      for (int k = 0; k < nv; ++k) {
        const std::array<double, 3> w = {vcoord(i), vcoord(j), vcoord(k)};
        valid[index(i, j, k)] = dot3(w, w) <= v_max * v_max + 1e-12 ? 1 : 0;
      }
}

Spinor reconstruct_psi(const GammaSet& g, const ProfileLimits& pf, const SpacetimePoint& p) {
  (void)g;
  const double q = p.lorentz_q();
  if (p.t <= 0.0 || q <= 0.0)
    throw std::domain_error("reconstruct_psi: point outside the light cone");
  const std::array<double, 3> w = {p.x[0] / p.t, p.x[1] / p.t, p.x[2] / p.t};

  Spinor rho_w[2];
  std::array<double, 4> a_w{};
  if (pf.nv == 1) {
    if (std::sqrt(dot3(w, w)) > 1e-9)
      throw std::out_of_range("reconstruct_psi: outside the velocity hull");
    rho_w[0] = pf.rho_plus[0];
    rho_w[1] = pf.rho_minus[0];
    a_w = pf.a_inf[0];
  } else {
    const double dv = pf.dv();
    int i0[3];
    double fr[3];
    for (int d = 0; d < 3; ++d) {
      const double s = (w[d] + pf.v_max) / dv;
      i0[d] = static_cast<int>(std::floor(s));
      if (i0[d] == pf.nv - 1 && s <= pf.nv - 1 + 1e-12) i0[d] = pf.nv - 2;
      if (i0[d] < 0 || i0[d] > pf.nv - 2)
        throw std::out_of_range("reconstruct_psi: outside the velocity hull");
      fr[d] = s - i0[d];
    }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const std::size_t at = pf.index(i0[0] + a, i0[1] + b, i0[2] + c);
          if (!pf.valid[at])
            throw std::out_of_range("reconstruct_psi: cell touches masked velocity nodes");
          const double wgt = (a ? fr[0] : 1.0 - fr[0]) * (b ? fr[1] : 1.0 - fr[1]) *
                             (c ? fr[2] : 1.0 - fr[2]);
          rho_w[0] = rho_w[0] + wgt * pf.rho_plus[at];
          rho_w[1] = rho_w[1] + wgt * pf.rho_minus[at];
          for (int mu = 0; mu < 4; ++mu) a_w[mu] += wgt * pf.a_inf[at][mu];
        }
  }

  const double lam = std::sqrt(q);
  // x_mu a^mu from the lower-index a: = t a_0 + x.a
  const double xa = p.t * a_w[0] + p.x[0] * a_w[1] + p.x[1] * a_w[2] + p.x[2] * a_w[3];
  const cplx logphase = std::exp(cplx(0.0, xa * std::log(q) / (2.0 * lam)));
  const double amp = std::pow(q, -0.75);

  Spinor out{};
  for (int s = 0; s < 2; ++s) {
    const double sg = s == 0 ? 1.0 : -1.0;
    const cplx osc = std::exp(cplx(0.0, sg * lam));
    out = out + (amp * osc * logphase) * rho_w[s];
  }
  return out;
}

EnergyIdentity energy_identity_check(const GammaSet& g, const ProfileLimits& pf,
                                     double psi0_l2_sq) {
  if (pf.nv < 2) throw std::invalid_argument("energy_identity_check: needs nv >= 2");
  const double cell = pf.dv() * pf.dv() * pf.dv();
  double lhs = 0.0;
  for (int i = 0; i < pf.nv; ++i)
    for (int j = 0; j < pf.nv; ++j)
      for (int k = 0; k < pf.nv; ++k) {
        const std::size_t at = pf.index(i, j, k);
        if (!pf.valid[at]) continue;
        const std::array<double, 3> w = {pf.vcoord(i), pf.vcoord(j), pf.vcoord(k)};
        const double w2 = dot3(w, w);
        const BoostVelocity v(w);
        const double np = norm_h_at(g, pf.rho_plus[at], v);
        const double nm = norm_h_at(g, pf.rho_minus[at], v);
        lhs += (np * np + nm * nm) / ((1.0 - w2) * (1.0 - w2)) * cell;
      }
  EnergyIdentity out;
  out.lhs = lhs;
  out.rhs = psi0_l2_sq;
  out.rel_gap = std::abs(lhs - psi0_l2_sq) / std::max(psi0_l2_sq, 1e-300);
  return out;
}

}  // namespace mdlab
