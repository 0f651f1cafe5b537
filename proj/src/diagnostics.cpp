#include "mdlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mdlab/io.hpp"
#include "mdlab/parallel.hpp"

namespace mdlab {

void DiagnosticsRecord::write_csv(const std::string& dir) const {
  io::ensure_dir(dir);
  io::CsvWriter diag(dir + "/diagnostics.csv",
                     {"t", "charge", "psi_l2", "a_hhalf", "adot_hmhalf", "lorenz"});
  for (const auto& r : rows)
    diag.row({r.t, r.charge, r.psi_l2, r.a_hhalf, r.adot_hmhalf, r.lorenz});
  io::CsvWriter reg(dir + "/regions.csv", {"t", "kind", "S", "sup_psi", "sup_psi_plus",
                                           "sup_psi_minus", "sup_a", "sup_ta"});
  for (const auto& r : region_rows)
    reg.row({r.t, static_cast<double>(static_cast<int>(r.kind)), r.S, r.sup_psi, r.sup_psi_plus,
             r.sup_psi_minus, r.sup_a, r.sup_ta});
}

DiagSample measure_state(const SpectralGrid& sg, const FieldState& s) {
  DiagSample d;
  d.t = s.t;
  d.charge = charge(sg.spec, s.psi);
  const auto h0 = h0_norm(sg, s);
  d.psi_l2 = h0[0];
  d.a_hhalf = h0[1];
  d.adot_hmhalf = h0[2];
  d.lorenz = lorenz_residual(sg, s);
  return d;
}

std::vector<RegionSample> measure_regions(const SpectralGrid& sg, const FieldState& s, double T,
                                          bool with_derivatives) {
  const GridSpec& g = s.grid;

  std::array<RField, 4> grad_dot;  // (d_t + d_r) A_mu when requested
  if (with_derivatives) {
    cplx* pk = sg.scratch(0);
    cplx* gx = sg.scratch(1);
    cplx* gy = sg.scratch(2);
    cplx* gz = sg.scratch(3);
    for (int pair = 0; pair < 2; ++pair) {
      const int m0 = 2 * pair, m1 = 2 * pair + 1;
      par::for_n(g.size(), [&](std::ptrdiff_t p) { pk[p] = cplx{s.a[m0][p], s.a[m1][p]}; });
      sg.gradient(pk, gx, gy, gz);
      for (int m : {m0, m1}) grad_dot[m].assign(g.size(), 0.0);
      par::for_n(g.n, [&](std::ptrdiff_t ii) {
        const int i = static_cast<int>(ii);
        const double x = g.coord(i);
        for (int j = 0; j < g.n; ++j) {
          const double y = g.coord(j);
          std::size_t idx = g.index(i, j, 0);
          for (int k = 0; k < g.n; ++k, ++idx) {
            const double z = g.coord(k);
            const double r = std::sqrt(x * x + y * y + z * z);
            if (r == 0.0) continue;
            const cplx rad = (x * gx[idx] + y * gy[idx] + z * gz[idx]) / r;
            grad_dot[m0][idx] = s.adot[m0][idx] + rad.real();
            grad_dot[m1][idx] = s.adot[m1][idx] + rad.imag();
          }
        }
      });
    }
  }

  struct Key {
    int kind;
    double S;
    bool operator<(const Key& o) const { return kind != o.kind ? kind < o.kind : S < o.S; }
  };
  std::map<Key, RegionSample> bins;

  // Serial sweep: the map insertions don't parallelize cleanly and this is
  // a diagnostics pass, not a stepper kernel.
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < g.n; ++j) {
      const double y = g.coord(j);
      std::size_t idx = g.index(i, j, 0);
      for (int k = 0; k < g.n; ++k, ++idx) {
        const double z = g.coord(k);
        const double r = std::sqrt(x * x + y * y + z * z);
        const RegionLabel lab = region_classify(T, SpacetimePoint{s.t, {x, y, z}});
        auto& bin = bins[Key{static_cast<int>(lab.kind), lab.S}];
        bin.t = s.t;
        bin.kind = lab.kind;
        bin.S = lab.S;

        const cplx u1 = s.psi[0][idx], u2 = s.psi[1][idx];
        const cplx l1 = s.psi[2][idx], l2 = s.psi[3][idx];
        const double psi2 = std::norm(u1) + std::norm(u2) + std::norm(l1) + std::norm(l2);
        bin.sup_psi = std::max(bin.sup_psi, std::sqrt(psi2));

        if (r > 0.0) {
          const double t1 = x / r, t2 = y / r, t3 = z / r;
          const cplx tm{t1, -t2}, tp{t1, t2};
          // sigma.theta on the two blocks
          const cplx sl1 = t3 * l1 + tm * l2, sl2 = tp * l1 - t3 * l2;
          const cplx su1 = t3 * u1 + tm * u2, su2 = tp * u1 - t3 * u2;
          const double plus2 = 0.25 * (std::norm(u1 + sl1) + std::norm(u2 + sl2) +
                                       std::norm(l1 + su1) + std::norm(l2 + su2));
          const double minus2 = 0.25 * (std::norm(u1 - sl1) + std::norm(u2 - sl2) +
                                        std::norm(l1 - su1) + std::norm(l2 - su2));
          bin.sup_psi_plus = std::max(bin.sup_psi_plus, std::sqrt(plus2));
          bin.sup_psi_minus = std::max(bin.sup_psi_minus, std::sqrt(minus2));
        }

        double a2 = 0.0, ta2 = 0.0;
        for (int mu = 0; mu < 4; ++mu) {
          a2 += s.a[mu][idx] * s.a[mu][idx];
          if (with_derivatives) ta2 += grad_dot[mu][idx] * grad_dot[mu][idx];
        }
        bin.sup_a = std::max(bin.sup_a, std::sqrt(a2));
        if (with_derivatives) bin.sup_ta = std::max(bin.sup_ta, std::sqrt(ta2));
      }
    }
  }

  std::vector<RegionSample> out;
  out.reserve(bins.size());
  for (auto& [key, v] : bins) out.push_back(v);
  return out;
}

const RegionSample* find_region(const std::vector<RegionSample>& rows, double t, RegionKind kind,
                                double S) {
  for (const auto& r : rows)
    if (r.kind == kind && std::abs(r.t - t) < 1e-9 && (kind != RegionKind::CTS_plus &&
                                                       kind != RegionKind::CTS_minus
                                                           ? true
                                                           : r.S == S))
      return &r;
  return nullptr;
}

DecayFit decay_probe(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw std::invalid_argument("decay_probe: size mismatch");
  std::vector<double> lt, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0 && y[i] > 0.0) {
      lt.push_back(std::log(t[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const auto n = lt.size();
  if (n < 5) throw std::invalid_argument("decay_probe: need at least 5 positive samples");
  const auto [tmin, tmax] = std::minmax_element(lt.begin(), lt.end());
  if (*tmax - *tmin < std::log(4.0) - 1e-12)
    throw std::invalid_argument("decay_probe: samples must span a factor >= 4 in t");

  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lt[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lt[i] - mx) * (lt[i] - mx);
    sxy += (lt[i] - mx) * (ly[i] - my);
  }
  DecayFit fit;
  fit.samples = static_cast<int>(n);
  fit.slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - my - fit.slope * (lt[i] - mx);
    ss_res += r * r;
  }
  fit.stderr_slope = n > 2 ? std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
  return fit;
}

DecayFit decay_probe(const std::vector<RegionSample>& rows, RegionKind kind, double S,
                     DecayField field) {
  std::vector<double> t, y;
  for (const auto& r : rows) {
    if (r.kind != kind) continue;
    if ((kind == RegionKind::CTS_plus || kind == RegionKind::CTS_minus) && r.S != S) continue;
    t.push_back(r.t);
    switch (field) {
      case DecayField::psi: y.push_back(r.sup_psi); break;
      case DecayField::psi_plus: y.push_back(r.sup_psi_plus); break;
      case DecayField::psi_minus: y.push_back(r.sup_psi_minus); break;
      case DecayField::a: y.push_back(r.sup_a); break;
      case DecayField::ta: y.push_back(r.sup_ta); break;
    }
  }
  return decay_probe(t, y);
}

HyperboloidEnergy hyperboloid_energy(const GammaSet& G, const HyperboloidChart& chart,
                                     const std::function<Spinor(const SpacetimePoint&)>& at) {
  HyperboloidEnergy e;
  const double rho = chart.rho;
  const double h3 = chart.h * chart.h * chart.h;
  chart.for_each_node([&](const SpacetimePoint& p, double w_dvh, double /*w_dsigma*/) {
    const Spinor psi = at(p);
    const auto J = current_at(psi[0], psi[1], psi[2], psi[3]);
    const double dens = -J[0];  // |psi|^2
    const double xdotj = p.x[0] * J[1] + p.x[1] * J[2] + p.x[2] * J[3];
    const double flux = (dens - xdotj / p.t) * h3;
    const double hn = norm_H(G, psi, p.t, p.x);
    const double hform = hn * hn * rho * rho * rho * w_dvh;
    e.flux_form += flux;
    e.hnorm_form += hform;
    const double scale = std::abs(flux) + std::abs(hform);
    if (scale > 1e-300)
      e.max_rel_gap = std::max(e.max_rel_gap, std::abs(flux - hform) / scale);
  });
  return e;
}

double charge_outside(const GridSpec& g, const std::array<CField, 4>& psi, double R) {
  const double h3 = g.h() * g.h() * g.h();
  const double R2 = R * R;
  return h3 * par::sum_n(g.n, [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double x = g.coord(i);
    double acc = 0.0;
    for (int j = 0; j < g.n; ++j) {
      const double y = g.coord(j);
      std::size_t idx = g.index(i, j, 0);
      for (int k = 0; k < g.n; ++k, ++idx) {
        const double z = g.coord(k);
        if (x * x + y * y + z * z < R2) continue;
        acc += std::norm(psi[0][idx]) + std::norm(psi[1][idx]) + std::norm(psi[2][idx]) +
               std::norm(psi[3][idx]);
      }
    }
    return acc;
  });
}

}  // namespace mdlab
