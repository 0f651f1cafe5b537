#include "mdlab/initial_data.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "mdlab/io.hpp"
#include "mdlab/parallel.hpp"

namespace mdlab {

CauchyData zero_data(GridSpec g) {
  CauchyData d;
  d.grid = g;
  for (auto& c : d.psi) c.assign(g.size(), cplx{});
  for (auto& r : d.a) r.assign(g.size(), 0.0);
  for (auto& r : d.adot) r.assign(g.size(), 0.0);
  d.constrained = true;
  return d;
}

namespace {

template <class F>
void for_each_point(const GridSpec& g, F&& fn) {
  par::for_n(g.n, [&](std::ptrdiff_t i) {
    const double x = g.coord(static_cast<int>(i));
    for (int j = 0; j < g.n; ++j) {
      const double y = g.coord(j);
      std::size_t idx = g.index(static_cast<int>(i), j, 0);
      for (int k = 0; k < g.n; ++k, ++idx) fn(idx, x, y, g.coord(k));
    }
  });
}

}  // namespace

void fill_gaussian_spinor(const GridSpec& g, const GaussianSpec& spec, std::array<CField, 4>& psi) {
  for (auto& c : psi) c.assign(g.size(), cplx{});
  const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
  for_each_point(g, [&](std::size_t idx, double x, double y, double z) {
    const double dx = x - spec.center[0], dy = y - spec.center[1], dz = z - spec.center[2];
    const double r2 = dx * dx + dy * dy + dz * dz;
    const double phase = spec.k0[0] * x + spec.k0[1] * y + spec.k0[2] * z;
    const cplx env = spec.amplitude * std::exp(-r2 * inv2s2) *
                     std::exp(cplx{0.0, phase});
    for (int c = 0; c < 4; ++c) psi[c][idx] = env * spec.weights[c];
  });
}

void fill_gaussian_scalar(const GridSpec& g, double amplitude, double sigma,
                          const std::array<double, 3>& center, RField& f) {
  f.assign(g.size(), 0.0);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for_each_point(g, [&](std::size_t idx, double x, double y, double z) {
    const double dx = x - center[0], dy = y - center[1], dz = z - center[2];
    f[idx] = amplitude * std::exp(-(dx * dx + dy * dy + dz * dz) * inv2s2);
  });
}

double charge(const GridSpec& g, const std::array<CField, 4>& psi) {
  const double cell = g.h() * g.h() * g.h();
  const double total = par::sum_n(g.size(), [&](std::ptrdiff_t i) {
    return std::norm(psi[0][i]) + std::norm(psi[1][i]) + std::norm(psi[2][i]) +
           std::norm(psi[3][i]);
  });
  return -cell * total;
}

CauchyData solve_constraints(const SpectralGrid& sg, std::array<CField, 4> psi0,
                             std::array<RField, 3> a_spatial, std::array<RField, 3> adot_spatial,
                             bool allow_mean_subtraction) {
  const GridSpec& g = sg.spec;
  CauchyData d;
  d.grid = g;
  d.psi = std::move(psi0);

  // adot_0 = div a, and the Poisson source div adot + |psi|^2.
  RField div_a(g.size(), 0.0), source(g.size(), 0.0), tmp(g.size());
  for (int j = 0; j < 3; ++j) {
    sg.deriv(a_spatial[j].data(), j, tmp.data());
    par::for_n(g.size(), [&](std::ptrdiff_t i) { div_a[i] += tmp[i]; });
    sg.deriv(adot_spatial[j].data(), j, tmp.data());
    par::for_n(g.size(), [&](std::ptrdiff_t i) { source[i] += tmp[i]; });
  }
  par::for_n(g.size(), [&](std::ptrdiff_t i) {
    source[i] += std::norm(d.psi[0][i]) + std::norm(d.psi[1][i]) + std::norm(d.psi[2][i]) +
                 std::norm(d.psi[3][i]);
  });

  const double mean =
      par::sum_n(g.size(), [&](std::ptrdiff_t i) { return source[i]; }) / g.size();
  const double scale = sup_norm(g, source.data()) + 1.0;
  if (!allow_mean_subtraction && std::abs(mean) > 1e-12 * scale)
    throw std::runtime_error(
        "constraint source has nonzero mean (charge obstruction): the |psi|^2 "
        "charge density is not periodically solvable; enable mean subtraction "
        "and use the charge-fix potential");

  RField a0(g.size());
  sg.poisson_zero_mean(source.data(), a0.data(), true);

  d.a[0] = std::move(a0);
  d.adot[0] = std::move(div_a);
  for (int j = 0; j < 3; ++j) {
    d.a[j + 1] = std::move(a_spatial[j]);
    d.adot[j + 1] = std::move(adot_spatial[j]);
  }
  d.constrained = true;
  d.subtracted_mean = mean;
  return d;
}

std::array<double, 2> constraint_residual(const SpectralGrid& sg, const CauchyData& data) {
  const GridSpec& g = sg.spec;
  RField lap(g.size()), tmp(g.size());
  sg.laplacian(data.a[0].data(), lap.data());
  RField res1(g.size());
  par::for_n(g.size(), [&](std::ptrdiff_t i) {
    const double psi2 = std::norm(data.psi[0][i]) + std::norm(data.psi[1][i]) +
                        std::norm(data.psi[2][i]) + std::norm(data.psi[3][i]);
    res1[i] = lap[i] - psi2 + data.subtracted_mean;
  });
  RField res2 = data.adot[0];
  for (int j = 0; j < 3; ++j) {
    sg.deriv(data.adot[j + 1].data(), j, tmp.data());
    par::for_n(g.size(), [&](std::ptrdiff_t i) { res1[i] -= tmp[i]; });
    sg.deriv(data.a[j + 1].data(), j, tmp.data());
    par::for_n(g.size(), [&](std::ptrdiff_t i) { res2[i] -= tmp[i]; });
  }
  return {sup_norm(g, res1.data()), sup_norm(g, res2.data())};
}

double ChargeFixProfile::rho(double s) {
  if (s <= 0.5) return 0.0;
  if (s >= 1.0) return 1.0;
  const double u = 2.0 * (s - 0.5);
  return u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}

double ChargeFixProfile::rho_prime(double s) {
  if (s <= 0.5 || s >= 1.0) return 0.0;
  const double u = 2.0 * (s - 0.5);
  const double w = u * (1.0 - u);
  return 280.0 * w * w * w;
}

double ChargeFixProfile::Q(double t, double r) const {
  if (r <= 0.0) return 0.0;  // rho vanishes near the origin for t >= -1/2
  return rho(r - t) * q / (4.0 * M_PI * r);
}

double ChargeFixProfile::Qdot(double t, double r) const {
  if (r <= 0.0) return 0.0;
  return -rho_prime(r - t) * q / (4.0 * M_PI * r);
}

CauchyData charge_fix(const SpectralGrid& sg, CauchyData data, const ChargeFixProfile& profile) {
  const GridSpec& g = sg.spec;
  if (!data.constrained) throw std::invalid_argument("charge_fix needs constrained data");
  if (profile.q == 0.0) return data;
  for_each_point(g, [&](std::size_t idx, double x, double y, double z) {
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r <= 0.0) return;
    const double coul = profile.q / (4.0 * M_PI * r);
    data.a[0][idx] -= ChargeFixProfile::rho(r) * coul;
    data.adot[0][idx] += ChargeFixProfile::rho_prime(r) * coul;
  });
  data.charge_fixed = true;
  return data;
}

namespace {

// |xi|^m multiplier applied to a complex field, output in physical space.
void frac_deriv(const SpectralGrid& sg, const cplx* f, double m, cplx* out) {
  sg.fft(f, out);
  sg.for_each_mode([&](std::size_t idx, double kx, double ky, double kz) {
    const double k2 = kx * kx + ky * ky + kz * kz;
    out[idx] *= k2 == 0.0 ? (m == 0.0 ? 1.0 : 0.0) : std::pow(k2, 0.5 * m);
  });
  sg.ifft(out, out);
}

void apply_radial_weight(const GridSpec& g, int power, cplx* f) {
  if (power == 0) return;
  for_each_point(g, [&](std::size_t idx, double x, double y, double z) {
    f[idx] *= std::pow(std::sqrt(x * x + y * y + z * z), power);
  });
}

double weighted_term(const SpectralGrid& sg, const CField& f, int j0, double m, double s) {
  const GridSpec& g = sg.spec;
  CField buf(g.size());
  frac_deriv(sg, f.data(), m, buf.data());
  apply_radial_weight(g, j0, buf.data());
  return s == 0.0 ? l2_norm(g, buf.data()) : sg.sobolev(buf.data(), s);
}

}  // namespace

double smallness_norm(const SpectralGrid& sg, const CauchyData& data, double nu) {
  if (nu <= 0.0) throw std::invalid_argument("smallness_norm: nu must be positive");
  const GridSpec& g = sg.spec;
  CField abuf(g.size());
  auto to_cfield = [&](const RField& r) {
    par::for_n(g.size(), [&](std::ptrdiff_t i) { abuf[i] = r[i]; });
    return &abuf;
  };

  double sum = 0.0;
  for (int j0 = 0; 3 * j0 <= 9; ++j0) {
    for (int k0 = 0; 3 * j0 + k0 <= 9; ++k0) {
      const int order = j0 + k0;
      // psi takes every derivative order up to j0+k0, a/adot exactly j0+k0.
      double t_psi = 0.0;
      for (int m = 0; m <= order; ++m) {
        double acc = 0.0;
        for (int c = 0; c < 4; ++c) {
          const double v = weighted_term(sg, data.psi[c], j0, m, 0.0);
          acc += v * v;
        }
        t_psi += std::sqrt(acc);
      }
      double t_a = 0.0, t_adot = 0.0;
      for (int mu = 0; mu < 4; ++mu) {
        double v = weighted_term(sg, *to_cfield(data.a[mu]), j0, order, 0.5);
        t_a += v * v;
        v = weighted_term(sg, *to_cfield(data.adot[mu]), j0, order, -0.5);
        t_adot += v * v;
      }
      sum += t_psi + std::sqrt(t_a) + std::sqrt(t_adot);
    }
  }

  double low_a = 0.0, low_adot = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    double v = sg.sobolev(data.a[mu].data(), 0.5 - nu);
    low_a += v * v;
    v = sg.sobolev(data.adot[mu].data(), -0.5 - nu);
    low_adot += v * v;
  }
  return std::max(sum, std::sqrt(low_a) + std::sqrt(low_adot));
}

namespace {

const char* kPsiNames[4] = {"psi0", "psi1", "psi2", "psi3"};
const char* kANames[4] = {"a0", "a1", "a2", "a3"};
const char* kAdotNames[4] = {"adot0", "adot1", "adot2", "adot3"};

}  // namespace

void save_cauchy_data(const std::string& base_path, const CauchyData& d) {
  const auto n = static_cast<std::size_t>(d.grid.n);
  std::vector<io::NamedField> fields;
  for (int c = 0; c < 4; ++c)
    fields.push_back({kPsiNames[c], reinterpret_cast<const double*>(d.psi[c].data()),
                      {n, n, n, 2}});
  for (int mu = 0; mu < 4; ++mu) fields.push_back({kANames[mu], d.a[mu].data(), {n, n, n}});
  for (int mu = 0; mu < 4; ++mu)
    fields.push_back({kAdotNames[mu], d.adot[mu].data(), {n, n, n}});
  io::json meta;
  meta["grid"] = {{"n", d.grid.n}, {"L", d.grid.L}};
  meta["constrained"] = d.constrained;
  meta["charge_fixed"] = d.charge_fixed;
  meta["subtracted_mean"] = d.subtracted_mean;
  meta["complex_fields"] = {"psi0", "psi1", "psi2", "psi3"};  // trailing axis = (re, im)
  io::write_field_file(base_path, fields, meta);
}

CauchyData load_cauchy_data(const std::string& base_path) {
  io::FieldFile f = io::read_field_file(base_path);
  CauchyData d;
  d.grid.n = f.metadata.at("grid").at("n").get<int>();
  d.grid.L = f.metadata.at("grid").at("L").get<double>();
  d.constrained = f.metadata.at("constrained").get<bool>();
  d.charge_fixed = f.metadata.at("charge_fixed").get<bool>();
  d.subtracted_mean = f.metadata.at("subtracted_mean").get<double>();
  if (f.at("psi0").size() != 2 * d.grid.size())
    throw std::runtime_error("cauchy data shape mismatch in " + base_path);
  for (int c = 0; c < 4; ++c) {
    const auto& raw = f.at(kPsiNames[c]);
    d.psi[c].resize(d.grid.size());
    std::memcpy(d.psi[c].data(), raw.data(), raw.size() * sizeof(double));
  }
  for (int mu = 0; mu < 4; ++mu) {
    d.a[mu] = f.at(kANames[mu]);
    d.adot[mu] = f.at(kAdotNames[mu]);
  }
  return d;
}

}  // namespace mdlab
