#include "mdlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdlab/coupling.hpp"
#include "mdlab/diagnostics.hpp"
#include "mdlab/evolution.hpp"
#include "mdlab/io.hpp"
#include "mdlab/oracle.hpp"
#include "mdlab/parallel.hpp"
#include "mdlab/profiles.hpp"
#include "mdlab/trajectory.hpp"
#include "mdlab/vector_fields.hpp"

namespace mdlab {
namespace {

namespace fs = std::filesystem;
using io::json;

std::string join(const std::string& a, const std::string& b) { return a + "/" + b; }

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json platform_info() {
  json p;
#if defined(__linux__)
  p["os"] = "linux";
#elif defined(__APPLE__)
  p["os"] = "darwin";
#else
  p["os"] = "other";
#endif
  p["compiler"] = __VERSION__;
  p["pointer_bits"] = 8 * static_cast<int>(sizeof(void*));
  p["threads"] = thread_count();
  return p;
}

// Data artifacts are byte-identical across re-runs; the manifest is the one
// file carrying timing, so it is written last, atomically.
void write_manifest(const std::string& stage_dir, const std::string& stage,
                    const ExperimentConfig* cfg, const std::string& status, double wall_s) {
  json m;
  m["stage"] = stage;
  m["status"] = status;
  m["tool_version"] = kToolVersion;
  m["platform"] = platform_info();
  if (cfg != nullptr) {
    m["config"] = cfg->to_json();
    m["config_hash"] = config_hash(*cfg);
  }
  m["wall_clock_seconds"] = wall_s;
  std::vector<std::string> names;
  for (const auto& e : fs::recursive_directory_iterator(stage_dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), stage_dir).string();
    if (rel == "manifest.json" || rel.size() > 4 && rel.substr(rel.size() - 4) == ".tmp") continue;
    names.push_back(rel);
  }
  std::sort(names.begin(), names.end());
  json files = json::array();
  for (const auto& nm : names) {
    files.push_back({{"path", nm},
                     {"bytes", static_cast<std::uint64_t>(fs::file_size(join(stage_dir, nm)))}});
  }
  m["files"] = files;
  const std::string tmp = join(stage_dir, "manifest.json.tmp");
  io::write_json(tmp, m);
  fs::rename(tmp, join(stage_dir, "manifest.json"));
}

std::string fresh_stage_dir(const std::string& out, const std::string& stage, bool keep) {
  io::ensure_dir(out);
  const std::string dir = join(out, stage);
  if (!keep && fs::exists(dir)) fs::remove_all(dir);
  io::ensure_dir(dir);
  return dir;
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opt) {
  if (opt.linear_mode) cfg.linear_mode = *opt.linear_mode;
  if (opt.charge_fix) cfg.charge_fix = *opt.charge_fix;
  validate_config(cfg);
  return cfg;
}

// Downstream stages reuse the resolved config an upstream stage persisted
// unless --config points elsewhere.
ExperimentConfig resolve_stage_config(const RunOptions& opt,
                                      const std::vector<std::string>& fallback_json) {
  if (!opt.config_path.empty()) return load_run_config(opt);
  for (const auto& f : fallback_json)
    if (io::file_exists(f)) return apply_overrides(config_from_json(io::read_json(f)), opt);
  throw std::invalid_argument("no --config given and no upstream config.json under " +
                              opt.out_dir);
}

bool near_multiple(double t, double cad) {
  if (cad <= 0.0) return false;
  return std::abs(t - std::round(t / cad) * cad) <= 1e-9;
}

std::vector<double> build_stops(const ExperimentConfig& cfg) {
  std::vector<double> s{0.0, cfg.t_end};
  const auto add = [&](double cad) {
    if (cad <= 0.0) return;
    const long n = static_cast<long>(std::floor(cfg.t_end / cad + 1e-9));
    for (long k = 0; k <= n; ++k) s.push_back(static_cast<double>(k) * cad);
  };
  add(cfg.diag_cadence);
  add(cfg.snapshot_cadence);
  add(cfg.checkpoint_cadence);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(),
                      [](double a, double b) { return std::abs(a - b) < 1e-9; }),
          s.end());
  return s;
}

double vec3_norm2(const std::array<double, 3>& v) {
  return v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
}

// ---------------------------------------------------------------------------
// algebra-check

struct SuiteResult {
  std::string name;
  double value = 0.0;       // max error, or observed order for order_mode
  double bound = 0.0;       // tolerance ceiling, or order floor
  bool order_mode = false;  // pass iff value >= bound instead of <=
  bool pass = false;

  void judge() { pass = order_mode ? value >= bound : value <= bound; }
};

double metric_upper(int mu, int nu) { return mu == nu ? metric_diag[mu] : 0.0; }

Spinor smooth_spinor4(const Point4& q) {
  const double t = q[0], x = q[1], y = q[2], z = q[3];
  const double g = std::exp(-0.05 * (x * x + 2.0 * y * y + 1.5 * z * z) - 0.02 * t * t);
  Spinor s;
  s[0] = g * cplx(std::sin(0.7 * x + 0.3 * t), std::cos(0.4 * y - 0.2 * z));
  s[1] = g * cplx(std::cos(0.5 * z + 0.1 * t), std::sin(0.6 * x + 0.2 * y));
  s[2] = g * cplx(std::sin(0.3 * y + 0.4 * z), std::cos(0.2 * x - 0.5 * t));
  s[3] = g * cplx(std::cos(0.6 * x - 0.3 * y), std::sin(0.5 * z + 0.4 * t));
  return s;
}

std::array<double, 4> smooth_potential4(const Point4& q) {
  const double t = q[0], x = q[1], y = q[2], z = q[3];
  const double g = std::exp(-0.04 * (x * x + y * y + z * z));
  return {g * std::sin(0.4 * t + 0.2 * x), g * std::cos(0.3 * y + 0.1 * t),
          g * std::sin(0.5 * z - 0.2 * t), g * std::cos(0.2 * x + 0.3 * z)};
}

const std::array<Point4, 3> kStudyPoints{
    {{1.3, 0.4, -0.2, 0.7}, {2.1, -0.6, 0.5, -0.3}, {1.7, 0.2, 0.9, 0.1}}};

// Smallest observed order across the last refinement of a three-level study.
template <class ErrAtH>
double observed_order(const std::array<double, 3>& hs, ErrAtH&& err_at) {
  std::array<double, 3> e{};
  for (int k = 0; k < 3; ++k) e[k] = err_at(hs[k]);
  const double o1 = std::log2(e[0] / e[1]);
  const double o2 = std::log2(e[1] / e[2]);
  return std::min(o1, o2);
}

std::vector<SuiteResult> run_algebra_suites(bool* injected) {
  GammaSet G = build_gamma_set();
  const char* inj = std::getenv("MDLAB_INJECT_GAMMA_FLIP");
  *injected = inj != nullptr && *inj != '\0' && std::string(inj) != "0";
  if (*injected) G.gamma[2](0, 3) = -G.gamma[2](0, 3);

  std::mt19937 rng(20260815u);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto rand_unit3 = [&] {
    std::array<double, 3> u{};
    double n2 = 0.0;
    do {
      for (int d = 0; d < 3; ++d) u[d] = gauss(rng);
      n2 = vec3_norm2(u);
    } while (n2 < 1e-12);
    const double inv = 1.0 / std::sqrt(n2);
    for (int d = 0; d < 3; ++d) u[d] *= inv;
    return u;
  };
  const auto rand_spinor = [&] {
    Spinor s;
    for (int c = 0; c < 4; ++c) s[c] = cplx(gauss(rng), gauss(rng));
    return (1.0 / s.norm()) * s;
  };

  std::vector<SuiteResult> out;

  {
    SuiteResult r{"gamma anticommutator", 0.0, 1e-14};
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        Mat4 acom = G.gamma[mu] * G.gamma[nu] + G.gamma[nu] * G.gamma[mu] +
                    Mat4::identity() * (2.0 * metric_upper(mu, nu));
        r.value = std::max(r.value, acom.max_abs());
      }
    r.judge();
    out.push_back(r);
  }
  {
    SuiteResult r{"gamma adjoint", 0.0, 1e-14};
    r.value = (G.gamma[0].adjoint() - G.gamma[0]).max_abs();
    for (int j = 1; j < 4; ++j)
      r.value = std::max(r.value, (G.gamma[j].adjoint() + G.gamma[j]).max_abs());
    r.judge();
    out.push_back(r);
  }
  {
    // two independent arithmetic paths for the current, plus J_0 = -|psi|^2
    SuiteResult r{"current density", 0.0, 1e-13};
    for (int trial = 0; trial < 50; ++trial) {
      const Spinor s = rand_spinor();
      const auto a = current_density(G, s);
      const auto b = current_at(s[0], s[1], s[2], s[3]);
      for (int mu = 0; mu < 4; ++mu) r.value = std::max(r.value, std::abs(a[mu] - b[mu]));
      r.value = std::max(r.value, std::abs(a[0] + s.norm2()));
    }
    r.judge();
    out.push_back(r);
  }
  {
    SuiteResult r{"radial projector eigenstructure", 0.0, 1e-12};
    for (int trial = 0; trial < 100; ++trial) {
      const auto th = rand_unit3();
      const ProjectorPair pp = projectors_theta(G, th);
      const Mat4 w = G.gamma[0] * gamma_theta(G, th);
      const Mat4 id = Mat4::identity();
      r.value = std::max(r.value, (pp.p_plus * pp.p_plus - pp.p_plus).max_abs());
      r.value = std::max(r.value, (pp.p_minus * pp.p_minus - pp.p_minus).max_abs());
      r.value = std::max(r.value, (pp.p_plus + pp.p_minus - id).max_abs());
      r.value = std::max(r.value, (w * pp.p_plus - pp.p_plus).max_abs());
      r.value = std::max(r.value, (w * pp.p_minus + pp.p_minus).max_abs());
      r.value = std::max(r.value, (G.gamma[0] * pp.p_plus * G.gamma[0] - pp.p_minus).max_abs());
    }
    r.judge();
    out.push_back(r);
  }
  {
    SuiteResult r{"boost projector family", 0.0, 1e-12};
    for (int trial = 0; trial < 100; ++trial) {
      const auto e = rand_unit3();
      const double s = 0.95 * uni(rng);
      const BoostVelocity v({s * e[0], s * e[1], s * e[2]});
      const ProjectorPair pp = projectors_v(G, v);
      const Mat4 gh = gamma_H(G, 1.0, v.v);
      const Mat4 id = Mat4::identity();
      r.value = std::max(r.value, (pp.p_plus * pp.p_plus - pp.p_plus).max_abs());
      r.value = std::max(r.value, (pp.p_minus * pp.p_minus - pp.p_minus).max_abs());
      r.value = std::max(r.value, (pp.p_plus + pp.p_minus - id).max_abs());
      r.value = std::max(r.value, (gh * gh - id).max_abs());
      // twisted commutation: P^pm gamma^mu - gamma^mu P^mp = pm (x^mu/lambda) I
      const double lam = std::sqrt(1.0 - s * s);
      const auto vup = v.upper();
      for (int mu = 0; mu < 4; ++mu) {
        const Mat4 lhs = pp.p_plus * G.gamma[mu] - G.gamma[mu] * pp.p_minus;
        r.value = std::max(r.value, (lhs - id * (vup[mu] / lam)).max_abs());
        const Mat4 lhs2 = pp.p_minus * G.gamma[mu] - G.gamma[mu] * pp.p_plus;
        r.value = std::max(r.value, (lhs2 + id * (vup[mu] / lam)).max_abs());
      }
      // the two kernels are H-orthogonal
      const Spinor a = pp.p_minus * rand_spinor();
      const Spinor b = pp.p_plus * rand_spinor();
      r.value = std::max(r.value, std::abs(inner_product_H(G, a, b, v)));
    }
    r.judge();
    out.push_back(r);
  }
  {
    SuiteResult r{"projector derivative order", 1e9, 1.8, true};
    double worst_resid = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      SpacetimePoint p;
      p.t = 1.5 + 1.5 * uni(rng);
      const auto e = rand_unit3();
      const double rr = 0.6 * p.t * uni(rng);
      p.x = {rr * e[0], rr * e[1], rr * e[2]};
      const auto err_at = [&](double h) {
        double m = 0.0;
        for (int mu = 0; mu < 4; ++mu)
          for (int sign : {+1, -1})
            m = std::max(m, projector_derivative_residual(G, p, mu, sign, h).max_abs());
        return m;
      };
      const double e1 = err_at(0.04), e2 = err_at(0.02);
      worst_resid = std::max(worst_resid, e2);
      r.value = std::min(r.value, std::log2(e1 / e2));
    }
    r.judge();
    if (worst_resid > 1e-3) r.pass = false;
    out.push_back(r);
  }

  const SpinorField4 psi = smooth_spinor4;
  const Potential4 A = smooth_potential4;
  const std::array<double, 3> hs{0.2, 0.1, 0.05};
  const auto pair_loop = [&](auto&& residual_norm) {
    return [&, residual_norm](double h) {
      double m = 0.0;
      for (const auto& p : kStudyPoints)
        for (int a = 0; a < 4; ++a)
          for (int b = a + 1; b < 4; ++b) m = std::max(m, residual_norm(p, a, b, h));
      return m;
    };
  };
  {
    SuiteResult r{"generator commutation order", 0.0, 1.8, true};
    r.value = observed_order(hs, pair_loop([&](const Point4& p, int a, int b, double h) {
                               return commutator_residual(G, psi, p, a, b, h).norm();
                             }));
    r.judge();
    out.push_back(r);
  }
  {
    SuiteResult r{"product rule (spinor) order", 0.0, 1.8, true};
    r.value = observed_order(hs, pair_loop([&](const Point4& p, int a, int b, double h) {
                               return product_rule_psi_residual(G, psi, A, p, a, b, h).norm();
                             }));
    r.judge();
    out.push_back(r);
  }
  {
    SuiteResult r{"product rule (current) order", 0.0, 1.8, true};
    r.value = observed_order(hs, pair_loop([&](const Point4& p, int a, int b, double h) {
                               const auto res = product_rule_current_residual(G, psi, p, a, b, h);
                               double m = 0.0;
                               for (double c : res) m = std::max(m, std::abs(c));
                               return m;
                             }));
    r.judge();
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// profile/coupling artifact container

struct ProfileArtifacts {
  ProfileLimits pf;
  std::vector<double> levels;           // ascending
  std::vector<char> hist_valid;         // [node][level]
  std::vector<ProfileSample> hist;      // same layout, defaulted where invalid
};

std::vector<double> pack_spinors(const std::vector<Spinor>& v) {
  std::vector<double> out;
  out.reserve(v.size() * 8);
  for (const auto& s : v)
    for (int c = 0; c < 4; ++c) {
      out.push_back(s[c].real());
      out.push_back(s[c].imag());
    }
  return out;
}

std::vector<Spinor> unpack_spinors(const std::vector<double>& d) {
  std::vector<Spinor> out(d.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int c = 0; c < 4; ++c) out[i][c] = cplx(d[8 * i + 2 * c], d[8 * i + 2 * c + 1]);
  return out;
}

void save_profile_artifacts(const std::string& base, const ProfileArtifacts& pa) {
  const std::size_t nn = pa.pf.size();
  const std::size_t nlev = pa.levels.size();
  std::vector<double> valid(nn), hvalid(nn * nlev), ht(nn * nlev), ainf(nn * 4);
  std::vector<Spinor> hp(nn * nlev), hm(nn * nlev);
  for (std::size_t i = 0; i < nn; ++i) {
    valid[i] = pa.pf.valid[i];
    for (int mu = 0; mu < 4; ++mu) ainf[4 * i + mu] = pa.pf.a_inf[i][mu];
  }
  for (std::size_t s = 0; s < nn * nlev; ++s) {
    hvalid[s] = pa.hist_valid[s];
    ht[s] = pa.hist[s].t;
    hp[s] = pa.hist[s].rho_plus;
    hm[s] = pa.hist[s].rho_minus;
  }
  const auto rp = pack_spinors(pa.pf.rho_plus);
  const auto rm = pack_spinors(pa.pf.rho_minus);
  const auto hpd = pack_spinors(hp);
  const auto hmd = pack_spinors(hm);
  json meta;
  meta["kind"] = "profiles";
  meta["v_max"] = pa.pf.v_max;
  meta["nv"] = pa.pf.nv;
  meta["levels"] = pa.levels;
  io::write_field_file(base,
                       {{"valid", valid.data(), {nn}},
                        {"rho_inf_plus", rp.data(), {nn, 4, 2}},
                        {"rho_inf_minus", rm.data(), {nn, 4, 2}},
                        {"a_inf", ainf.data(), {nn, 4}},
                        {"hist_valid", hvalid.data(), {nn, nlev}},
                        {"hist_t", ht.data(), {nn, nlev}},
                        {"hist_plus", hpd.data(), {nn, nlev, 4, 2}},
                        {"hist_minus", hmd.data(), {nn, nlev, 4, 2}}},
                       meta);
}

ProfileArtifacts load_profile_artifacts(const std::string& base) {
  const io::FieldFile f = io::read_field_file(base);
  ProfileArtifacts pa;
  pa.pf.v_max = f.metadata.at("v_max").get<double>();
  pa.pf.nv = f.metadata.at("nv").get<int>();
  pa.levels = f.metadata.at("levels").get<std::vector<double>>();
  pa.pf.allocate();
  const std::size_t nn = pa.pf.size();
  const std::size_t nlev = pa.levels.size();
  const auto& valid = f.at("valid");
  if (valid.size() != nn) throw std::runtime_error("profile artifacts: size mismatch");
  for (std::size_t i = 0; i < nn; ++i) pa.pf.valid[i] = valid[i] != 0.0 ? 1 : 0;
  pa.pf.rho_plus = unpack_spinors(f.at("rho_inf_plus"));
  pa.pf.rho_minus = unpack_spinors(f.at("rho_inf_minus"));
  const auto& ainf = f.at("a_inf");
  for (std::size_t i = 0; i < nn; ++i)
    for (int mu = 0; mu < 4; ++mu) pa.pf.a_inf[i][mu] = ainf[4 * i + mu];
  const auto& hvalid = f.at("hist_valid");
  const auto& ht = f.at("hist_t");
  const auto hp = unpack_spinors(f.at("hist_plus"));
  const auto hm = unpack_spinors(f.at("hist_minus"));
  if (hvalid.size() != nn * nlev) throw std::runtime_error("profile artifacts: history mismatch");
  pa.hist_valid.assign(nn * nlev, 0);
  pa.hist.assign(nn * nlev, ProfileSample{});
  for (int i = 0; i < pa.pf.nv; ++i)
    for (int j = 0; j < pa.pf.nv; ++j)
      for (int k = 0; k < pa.pf.nv; ++k) {
        const std::size_t idx = pa.pf.index(i, j, k);
        const std::array<double, 3> v{pa.pf.vcoord(i), pa.pf.vcoord(j), pa.pf.vcoord(k)};
        for (std::size_t li = 0; li < nlev; ++li) {
          const std::size_t s = idx * nlev + li;
          pa.hist_valid[s] = hvalid[s] != 0.0 ? 1 : 0;
          ProfileSample& ps = pa.hist[s];
          ps.t = ht[s];
          ps.rho = pa.levels[li];
          ps.v = v;
          ps.rho_plus = hp[s];
          ps.rho_minus = hm[s];
        }
      }
  return pa;
}

}  // namespace

ExperimentConfig load_run_config(const RunOptions& opt) {
  ExperimentConfig cfg =
      opt.config_path.empty() ? ExperimentConfig{} : parse_config_file(opt.config_path);
  return apply_overrides(std::move(cfg), opt);
}

int cmd_algebra_check(const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = fresh_stage_dir(opt.out_dir, "algebra", false);

  bool injected = false;
  const std::vector<SuiteResult> suites = run_algebra_suites(&injected);
  if (injected) std::printf("fault injection active: one gamma entry sign-flipped\n");

  const SuiteResult* first_fail = nullptr;
  json jsuites = json::array();
  for (const auto& s : suites) {
    if (s.order_mode)
      std::printf("  %-32s order %6.3f  (floor %.2f)  %s\n", s.name.c_str(), s.value, s.bound,
                  s.pass ? "PASS" : "FAIL");
    else
      std::printf("  %-32s max err %9.3e  (tol %.1e)  %s\n", s.name.c_str(), s.value, s.bound,
                  s.pass ? "PASS" : "FAIL");
    if (!s.pass && first_fail == nullptr) first_fail = &s;
    jsuites.push_back({{"name", s.name},
                       {"value", s.value},
                       {"bound", s.bound},
                       {"order_mode", s.order_mode},
                       {"pass", s.pass}});
  }
  const bool all = first_fail == nullptr;
  if (all)
    std::printf("algebra-check: %zu/%zu suites passed\n", suites.size(), suites.size());
  else
    std::printf("algebra-check: FAIL: %s\n", first_fail->name.c_str());

  json summary;
  summary["stage"] = "algebra";
  summary["status"] = all ? "ok" : "failed";
  summary["fault_injection"] = injected;
  summary["suites"] = jsuites;
  if (!all) summary["first_failure"] = first_fail->name;
  io::write_json(join(dir, "summary.json"), summary);
  write_manifest(dir, "algebra", nullptr, summary["status"], elapsed_s(t0));
  return all ? 0 : 1;
}

int cmd_evolve(const RunOptions& opt) {
  const auto wall0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_run_config(opt);
  const std::string dir = fresh_stage_dir(opt.out_dir, "evolve", opt.resume);
  io::write_json(join(dir, "config.json"), cfg.to_json());

  const GridSpec spec{cfg.grid_n, cfg.grid_L};
  SpectralGrid sg(spec);

  // Data synthesis: Gaussian spinor bump, spatial potential zero, constraints
  // solved, optional exterior Coulomb subtraction.
  GaussianSpec gspec;
  gspec.amplitude = cfg.epsilon;
  gspec.sigma = cfg.data_sigma;
  gspec.k0 = cfg.data_k0;
  std::array<CField, 4> psi0;
  fill_gaussian_spinor(spec, gspec, psi0);
  std::array<RField, 3> a_sp, adot_sp;
  for (int d = 0; d < 3; ++d) {
    a_sp[d].assign(spec.size(), 0.0);
    adot_sp[d].assign(spec.size(), 0.0);
  }
  CauchyData data =
      solve_constraints(sg, std::move(psi0), std::move(a_sp), std::move(adot_sp), true);
  ChargeFixProfile fix;
  fix.q = charge(spec, data.psi);
  if (cfg.charge_fix) data = charge_fix(sg, std::move(data), fix);
  save_cauchy_data(join(dir, "data"), data);
  const std::array<double, 2> res0 = constraint_residual(sg, data);
  const double small_norm = smallness_norm(sg, data, 0.25);
  double psi0_l2_sq = 0.0;
  for (int c = 0; c < 4; ++c) {
    const double n = l2_norm(spec, data.psi[c].data());
    psi0_l2_sq += n * n;
  }

  StepperConfig sc;
  sc.dt = cfg.dt;
  sc.t_end = cfg.t_end;
  sc.dealias = cfg.dealias;
  sc.linear_mode = cfg.linear_mode;
  sc.charge_fix = cfg.charge_fix;
  sc.fix = fix;

  const bool instant = cfg.epsilon == 0.0;
  const std::string ckpt_base = join(dir, "checkpoint");

  FieldState init = state_from_data(data);
  DiagnosticsRecord rec;
  double skip_until = -1.0;
  if (opt.resume && io::file_exists(ckpt_base + ".json")) {
    init = load_checkpoint(sg, ckpt_base);
    skip_until = init.t;
    std::printf("resuming from checkpoint at t = %.6f\n", init.t);
    const std::string dcsv = join(dir, "diagnostics.csv");
    if (io::file_exists(dcsv)) {
      const io::CsvTable tbl = io::read_csv(dcsv);
      for (const auto& row : tbl.rows) {
        if (row[0] > skip_until + 1e-9) continue;
        rec.rows.push_back({row[0], row[1], row[2], row[3], row[4], row[5]});
      }
    }
    const std::string rcsv = join(dir, "regions.csv");
    if (io::file_exists(rcsv)) {
      const io::CsvTable tbl = io::read_csv(rcsv);
      for (const auto& row : tbl.rows) {
        if (row[0] > skip_until + 1e-9) continue;
        rec.region_rows.push_back({row[0], static_cast<RegionKind>(static_cast<int>(row[1])),
                                   row[2], row[3], row[4], row[5], row[6], row[7]});
      }
    }
  }

  std::optional<SnapshotWriter> snap;
  if (cfg.snapshot_cadence > 0.0) {
    const double rad = cfg.snapshot_radius > 0.0 ? cfg.snapshot_radius : cfg.grid_L;
    snap.emplace(join(dir, "snapshots"), sg, window_for_radius(spec, {0.0, 0.0, 0.0}, rad),
                 cfg.snapshot_cadence);
  }

  std::optional<Evolver> ev;
  FieldState zstate;
  if (instant) {
    zstate = std::move(init);
  } else {
    ev.emplace(sg, sc);
    ev->set_state(std::move(init));
  }
  const auto current = [&]() -> const FieldState& { return instant ? zstate : ev->state(); };

  const auto record_diag = [&](const FieldState& s) {
    rec.rows.push_back(measure_state(sg, s));
    if (s.t >= 1.0 - 1e-12) {
      const double T = std::exp2(std::floor(std::log2(s.t)));
      const auto rr = measure_regions(sg, s, T, true);
      rec.region_rows.insert(rec.region_rows.end(), rr.begin(), rr.end());
    }
  };

  std::string status = "ok";
  std::string error_msg;
  int exit_code = 0;
  try {
    for (double stop : build_stops(cfg)) {
      if (stop <= skip_until + 1e-9) continue;
      if (instant) {
        zstate.t = stop;
      } else if (stop > ev->state().t + 1e-12) {
        ev->advance_to(stop);
        ev->check_finite();
      }
      const FieldState& s = current();
      if (near_multiple(stop, cfg.diag_cadence) || stop == 0.0 ||
          std::abs(stop - cfg.t_end) < 1e-9)
        record_diag(s);
      if (snap && near_multiple(stop, cfg.snapshot_cadence)) snap->maybe_write(s);
      if (cfg.checkpoint_cadence > 0.0 && stop > 0.0 &&
          near_multiple(stop, cfg.checkpoint_cadence))
        save_checkpoint(ckpt_base, s);
    }
  } catch (const std::exception& e) {
    status = "aborted";
    error_msg = e.what();
    exit_code = 3;
    save_checkpoint(join(dir, "abort_checkpoint"), current());
    std::fprintf(stderr, "evolve aborted: %s\n", e.what());
  }

  rec.write_csv(dir);
  if (status == "ok") save_checkpoint(join(dir, "final_state"), current());

  const FieldState& fin = current();
  json summary;
  summary["stage"] = "evolve";
  summary["status"] = status;
  if (!error_msg.empty()) summary["error"] = error_msg;
  summary["run_name"] = cfg.run_name;
  summary["config_hash"] = config_hash(cfg);
  summary["instant_path"] = instant;
  summary["t_final"] = fin.t;
  summary["psi0_l2_sq"] = psi0_l2_sq;
  summary["psi_l2_initial"] = std::sqrt(psi0_l2_sq);
  summary["smallness_norm"] = small_norm;
  summary["constraint_residual_initial"] = res0;
  summary["charge_initial"] = fix.q;
  const double qf = charge(spec, fin.psi);
  summary["charge_final"] = qf;
  summary["charge_drift"] = std::abs(qf - fix.q);
  double lor_max = 0.0;
  for (const auto& row : rec.rows) lor_max = std::max(lor_max, row.lorenz);
  summary["lorenz_max"] = lor_max;
  summary["lorenz_final"] = rec.rows.empty() ? 0.0 : rec.rows.back().lorenz;
  const double lorenz_budget =
      cfg.budget_lorenz > 0.0 ? cfg.budget_lorenz : spec.h() * spec.h();
  summary["budgets"] = {{"charge_drift", cfg.budget_charge_drift},
                        {"lorenz", lorenz_budget},
                        {"charge_drift_ok", std::abs(qf - fix.q) <= cfg.budget_charge_drift},
                        {"lorenz_ok", lor_max <= lorenz_budget}};
  if (snap)
    summary["snapshots"] = {{"frames", snap->frames_written()},
                            {"cadence", cfg.snapshot_cadence},
                            {"dir", "snapshots"}};

  if (cfg.linear_mode && status == "ok" && !instant) {
    std::array<CField, 4> pref;
    for (int c = 0; c < 4; ++c) pref[c].resize(spec.size());
    oracle_linear_dirac(sg, data.psi, fin.t, pref);
    const double h3 = spec.h() * spec.h() * spec.h();
    double dnum = 0.0, dden = 0.0;
    for (int c = 0; c < 4; ++c)
      for (std::size_t i = 0; i < spec.size(); ++i) {
        dnum += std::norm(fin.psi[c][i] - pref[c][i]);
        dden += std::norm(pref[c][i]);
      }
    RField wf(spec.size()), wfd(spec.size());
    double wnum = 0.0, wdnum = 0.0;
    for (int mu = 0; mu < 4; ++mu) {
      oracle_linear_wave(sg, data.a[mu], data.adot[mu], fin.t, wf, &wfd);
      for (std::size_t i = 0; i < spec.size(); ++i) {
        wnum += (fin.a[mu][i] - wf[i]) * (fin.a[mu][i] - wf[i]);
        wdnum += (fin.adot[mu][i] - wfd[i]) * (fin.adot[mu][i] - wfd[i]);
      }
    }
    summary["oracle"] = {{"psi_l2_error", std::sqrt(dnum * h3)},
                         {"psi_l2_ref", std::sqrt(dden * h3)},
                         {"a_l2_error", std::sqrt(wnum * h3)},
                         {"adot_l2_error", std::sqrt(wdnum * h3)}};
    std::printf("linear-mode oracle: |psi - exact|_L2 = %.3e\n", std::sqrt(dnum * h3));
  }

  io::write_json(join(dir, "summary.json"), summary);
  write_manifest(dir, "evolve", &cfg, status, elapsed_s(wall0));
  std::printf("evolve: %s at t = %.4f (charge drift %.3e, lorenz max %.3e)\n", status.c_str(),
              fin.t, std::abs(qf - fix.q), lor_max);
  return exit_code;
}

int cmd_profiles(const RunOptions& opt) {
  const auto wall0 = std::chrono::steady_clock::now();
  const std::string evodir = join(opt.out_dir, "evolve");
  const ExperimentConfig cfg = resolve_stage_config(opt, {join(evodir, "config.json")});
  const std::string dir = fresh_stage_dir(opt.out_dir, "profiles", false);
  io::write_json(join(dir, "config.json"), cfg.to_json());

  SnapshotSeries series(join(evodir, "snapshots"));
  const auto sampler = series.sampler();
  const GammaSet G = build_gamma_set();

  ProfileArtifacts pa;
  pa.pf.nv = cfg.vgrid_nv;
  pa.pf.v_max = cfg.vgrid_vmax;
  pa.pf.allocate();
  pa.levels = cfg.levels;
  std::sort(pa.levels.begin(), pa.levels.end());
  const std::size_t nn = pa.pf.size();
  const std::size_t nlev = pa.levels.size();
  pa.hist_valid.assign(nn * nlev, 0);
  pa.hist.assign(nn * nlev, ProfileSample{});

  int nodes_lattice = 0;
  for (char v : pa.pf.valid) nodes_lattice += v;

  io::CsvWriter hist_csv(join(dir, "histories.csv"),
                         {"ni", "nj", "nk", "vx", "vy", "vz", "rho", "t", "cp0_re", "cp0_im",
                          "cp1_re", "cp1_im", "cm0_re", "cm0_im", "cm1_re", "cm1_im", "norm_plus",
                          "norm_minus"});
  io::CsvWriter cauchy_csv(join(dir, "cauchy.csv"), {"ni", "nj", "nk", "vx", "vy", "vz", "k",
                                                     "t_k", "cauchy_plus", "cauchy_minus"});

  json node_report = json::array();
  int extracted = 0, converged = 0;
  for (int i = 0; i < pa.pf.nv; ++i)
    for (int j = 0; j < pa.pf.nv; ++j)
      for (int k = 0; k < pa.pf.nv; ++k) {
        const std::size_t idx = pa.pf.index(i, j, k);
        if (!pa.pf.valid[idx]) continue;
        const std::array<double, 3> vv{pa.pf.vcoord(i), pa.pf.vcoord(j), pa.pf.vcoord(k)};
        const BoostVelocity V(vv);
        const double one_m_v2 = 1.0 - vec3_norm2(vv);
        const double tgate =
            cfg.t0_init > 0.0 ? cfg.t0_init * std::pow(one_m_v2, -cfg.t0_exponent_p) : 0.0;

        ProfileHistory hist;
        hist.v = vv;
        json levrep = json::array();
        for (std::size_t li = 0; li < nlev; ++li) {
          const double rho = pa.levels[li];
          const double t_node = rho / std::sqrt(one_m_v2);
          if (t_node < tgate) {
            levrep.push_back({{"rho", rho}, {"skip", "below the start-time gate"}});
            continue;
          }
          try {
            const HyperboloidChart chart =
                packet_chart(V, rho, series.grid_h(), cfg.chart_pad);
            const ProfileSample ps = test_profile(G, sampler, V, chart);
            hist.samples.push_back(ps);
            pa.hist[idx * nlev + li] = ps;
            pa.hist_valid[idx * nlev + li] = 1;
            const double np =
                std::sqrt(std::abs(inner_product_H(G, ps.rho_plus, ps.rho_plus, V).real()));
            const double nm =
                std::sqrt(std::abs(inner_product_H(G, ps.rho_minus, ps.rho_minus, V).real()));
            hist_csv.row({double(i), double(j), double(k), vv[0], vv[1], vv[2], rho, ps.t,
                          ps.coeff_plus[0].real(), ps.coeff_plus[0].imag(),
                          ps.coeff_plus[1].real(), ps.coeff_plus[1].imag(),
                          ps.coeff_minus[0].real(), ps.coeff_minus[0].imag(),
                          ps.coeff_minus[1].real(), ps.coeff_minus[1].imag(), np, nm});
            levrep.push_back({{"rho", rho}, {"t", ps.t}});
          } catch (const std::exception& e) {
            levrep.push_back({{"rho", rho}, {"skip", e.what()}});
          }
        }

        json nrep;
        nrep["node"] = {i, j, k};
        nrep["v"] = vv;
        nrep["levels"] = levrep;
        if (hist.samples.size() >= 3) {
          const ExtractionResult ex = extract_rho_infinity(G, hist, nullptr);
          pa.pf.rho_plus[idx] = ex.rho_inf_plus;
          pa.pf.rho_minus[idx] = ex.rho_inf_minus;
          ++extracted;
          if (ex.converged_plus && ex.converged_minus) ++converged;
          nrep["converged_plus"] = ex.converged_plus;
          nrep["converged_minus"] = ex.converged_minus;
          nrep["cauchy_plus"] = ex.cauchy_plus;
          nrep["cauchy_minus"] = ex.cauchy_minus;
          for (std::size_t c = 0; c < ex.cauchy_plus.size(); ++c)
            cauchy_csv.row({double(i), double(j), double(k), vv[0], vv[1], vv[2], double(c + 1),
                            hist.samples[c + 1].t, ex.cauchy_plus[c], ex.cauchy_minus[c]});
        } else {
          pa.pf.valid[idx] = 0;
          nrep["error"] = "fewer than 3 usable levels";
        }
        node_report.push_back(nrep);
      }

  save_profile_artifacts(join(dir, "profiles"), pa);

  json summary;
  summary["stage"] = "profiles";
  summary["status"] = "ok";
  summary["config_hash"] = config_hash(cfg);
  summary["levels"] = pa.levels;
  summary["nodes_lattice"] = nodes_lattice;
  summary["nodes_extracted"] = extracted;
  summary["nodes_converged_raw"] = converged;
  summary["snapshot_span"] = {series.t_min(), series.t_max()};
  summary["nodes"] = node_report;
  io::write_json(join(dir, "summary.json"), summary);
  write_manifest(dir, "profiles", &cfg, "ok", elapsed_s(wall0));
  std::printf("profiles: extracted %d/%d nodes (%d with nonincreasing raw differences)\n",
              extracted, nodes_lattice, converged);
  return 0;
}

int cmd_coupling(const RunOptions& opt) {
  const auto wall0 = std::chrono::steady_clock::now();
  const std::string evodir = join(opt.out_dir, "evolve");
  const std::string prodir = join(opt.out_dir, "profiles");
  const ExperimentConfig cfg = resolve_stage_config(
      opt, {join(prodir, "config.json"), join(evodir, "config.json")});
  const std::string dir = fresh_stage_dir(opt.out_dir, "coupling", false);
  io::write_json(join(dir, "config.json"), cfg.to_json());

  ProfileArtifacts pa = load_profile_artifacts(join(prodir, "profiles"));
  const GammaSet G = build_gamma_set();
  const std::size_t nn = pa.pf.size();
  const std::size_t nlev = pa.levels.size();

  const DiskField b = source_b(G, pa.pf);
  const DiskField a = solve_coupling(b);
  const double resid = helmholtz_residual(a, b);

  json summary;
  summary["stage"] = "coupling";
  summary["status"] = "ok";
  summary["config_hash"] = config_hash(cfg);
  summary["helmholtz_residual"] = resid;
  summary["boundary_warning"] = a.boundary_warning;

  // source sanity + the (1-v^2)^{1/2} boundedness ratio of the solution
  double b0_max = 0.0, a_ratio = 0.0, a_sup = 0.0;
  for (int i = 0; i < a.nv; ++i)
    for (int j = 0; j < a.nv; ++j)
      for (int k = 0; k < a.nv; ++k) {
        const std::size_t idx = a.index(i, j, k);
        if (!a.valid[idx]) continue;
        const std::array<double, 3> vv{a.vcoord(i), a.vcoord(j), a.vcoord(k)};
        b0_max = std::max(b0_max, b.value[idx][0]);
        double amp = 0.0;
        for (int mu = 0; mu < 4; ++mu) amp = std::max(amp, std::abs(a.value[idx][mu]));
        a_sup = std::max(a_sup, amp);
        a_ratio = std::max(a_ratio, amp / std::sqrt(1.0 - vec3_norm2(vv)));
      }
  summary["b0_max"] = b0_max;  // nonpositive by construction
  summary["a_sup"] = a_sup;
  summary["a_over_sqrt_1mv2_max"] = a_ratio;

  // energy identity against the stored initial mass
  if (io::file_exists(join(evodir, "summary.json"))) {
    const json esum = io::read_json(join(evodir, "summary.json"));
    if (esum.contains("psi0_l2_sq") && pa.pf.nv >= 2) {
      const EnergyIdentity ei = energy_identity_check(G, pa.pf, esum["psi0_l2_sq"].get<double>());
      summary["energy_identity"] = {{"lhs", ei.lhs}, {"rhs", ei.rhs}, {"rel_gap", ei.rel_gap}};
      std::printf("energy identity: lhs %.6e vs rhs %.6e (gap %.2f%%)\n", ei.lhs, ei.rhs,
                  100.0 * ei.rel_gap);
    } else {
      summary["energy_identity"] = {{"skip", "needs nv >= 2 and the evolve summary"}};
    }
  } else {
    summary["energy_identity"] = {{"skip", "no evolve summary found"}};
  }

  // log-phase renormalized re-extraction (the modified-scattering signature)
  for (std::size_t idx = 0; idx < nn; ++idx) {
    const std::array<double, 4>& au = a.value[idx];
    pa.pf.a_inf[idx] = {-au[0], au[1], au[2], au[3]};  // lower the index
  }
  io::CsvWriter renorm_csv(join(dir, "cauchy_renorm.csv"),
                           {"ni", "nj", "nk", "vx", "vy", "vz", "k", "t_k", "raw_plus",
                            "renorm_plus", "raw_minus", "renorm_minus"});
  json renorm_nodes = json::array();
  int tested = 0, improved = 0, tested_half = 0, improved_half = 0;
  for (int i = 0; i < pa.pf.nv; ++i)
    for (int j = 0; j < pa.pf.nv; ++j)
      for (int k = 0; k < pa.pf.nv; ++k) {
        const std::size_t idx = pa.pf.index(i, j, k);
        if (!pa.pf.valid[idx] || !a.valid[idx]) continue;
        ProfileHistory hist;
        hist.v = {pa.pf.vcoord(i), pa.pf.vcoord(j), pa.pf.vcoord(k)};
        for (std::size_t li = 0; li < nlev; ++li)
          if (pa.hist_valid[idx * nlev + li]) hist.samples.push_back(pa.hist[idx * nlev + li]);
        if (hist.samples.size() < 3) continue;
        const ExtractionResult raw = extract_rho_infinity(G, hist, nullptr);
        const ExtractionResult ren = extract_rho_infinity(G, hist, &pa.pf.a_inf[idx]);
        pa.pf.rho_plus[idx] = ren.rho_inf_plus;
        pa.pf.rho_minus[idx] = ren.rho_inf_minus;
        for (std::size_t c = 0; c < raw.cauchy_plus.size(); ++c)
          renorm_csv.row({double(i), double(j), double(k), hist.v[0], hist.v[1], hist.v[2],
                          double(c + 1), hist.samples[c + 1].t, raw.cauchy_plus[c],
                          ren.cauchy_plus[c], raw.cauchy_minus[c], ren.cauchy_minus[c]});
        const bool node_improved = ren.cauchy_plus.back() < raw.cauchy_plus.back() &&
                                   ren.cauchy_minus.back() < raw.cauchy_minus.back();
        ++tested;
        improved += node_improved;
        const bool half_ball = vec3_norm2(hist.v) <= 0.25 + 1e-12;
        if (half_ball) {
          ++tested_half;
          improved_half += node_improved;
        }
        renorm_nodes.push_back({{"node", {i, j, k}},
                                {"v", hist.v},
                                {"raw_last_plus", raw.cauchy_plus.back()},
                                {"renorm_last_plus", ren.cauchy_plus.back()},
                                {"raw_last_minus", raw.cauchy_minus.back()},
                                {"renorm_last_minus", ren.cauchy_minus.back()},
                                {"improved", node_improved},
                                {"renorm_converged_plus", ren.converged_plus},
                                {"renorm_converged_minus", ren.converged_minus}});
      }
  summary["renormalization"] = {{"nodes_tested", tested},
                                {"nodes_improved", improved},
                                {"half_ball_tested", tested_half},
                                {"half_ball_improved", improved_half},
                                {"half_ball_all_improved", tested_half > 0 &&
                                                               improved_half == tested_half},
                                {"nodes", renorm_nodes}};

  // main-term reconstruction against the recorded late-time field
  json recon;
  try {
    SnapshotSeries series(join(evodir, "snapshots"));
    double rho_top = 0.0;
    for (std::size_t idx = 0; idx < nn; ++idx)
      for (std::size_t li = 0; li < nlev; ++li)
        if (pa.hist_valid[idx * nlev + li]) rho_top = std::max(rho_top, pa.levels[li]);
    if (rho_top <= 0.0) throw std::runtime_error("no usable history level");
    const GridSpec gs{series.grid_n(), series.grid_L()};
    const SnapshotWindow& win = series.window();
    double num = 0.0, den = 0.0;
    int npts = 0;
    for (int i = win.lo[0]; i < win.lo[0] + win.m; ++i)
      for (int j = win.lo[1]; j < win.lo[1] + win.m; ++j)
        for (int k = win.lo[2]; k < win.lo[2] + win.m; ++k) {
          const std::array<double, 3> x{gs.coord(i), gs.coord(j), gs.coord(k)};
          const double r2 = vec3_norm2(x);
          const double t = std::sqrt(rho_top * rho_top + r2);
          if (t < series.t_min() - 1e-9 || t > series.t_max() + 1e-9) continue;
          if (std::sqrt(r2) > pa.pf.v_max * t + 1e-12) continue;
          Spinor rc;
          try {
            rc = reconstruct_psi(G, pa.pf, {t, x});
          } catch (const std::exception&) {
            continue;
          }
          const Spinor ns = series.sample(t, {i, j, k});
          const double w = gs.h() * gs.h() * gs.h() / (t * rho_top * rho_top);
          const double de = norm_H(G, rc - ns, t, x);
          const double dn = norm_H(G, ns, t, x);
          num += w * de * de;
          den += w * dn * dn;
          ++npts;
        }
    recon = {{"points", npts},
             {"level", rho_top},
             {"rel_error", den > 0.0 ? std::sqrt(num / den) : 0.0}};
  } catch (const std::exception& e) {
    recon = {{"skip", e.what()}};
  }
  summary["reconstruction"] = recon;

  // persist the solved field (upper index) next to its source
  {
    std::vector<double> aflat(nn * 4), bflat(nn * 4), valid(nn);
    for (std::size_t idx = 0; idx < nn; ++idx) {
      valid[idx] = a.valid[idx];
      for (int mu = 0; mu < 4; ++mu) {
        aflat[4 * idx + mu] = a.value[idx][mu];
        bflat[4 * idx + mu] = b.value[idx][mu];
      }
    }
    json meta;
    meta["kind"] = "a_inf";
    meta["v_max"] = a.v_max;
    meta["nv"] = a.nv;
    meta["boundary_warning"] = a.boundary_warning;
    meta["helmholtz_residual"] = resid;
    io::write_field_file(join(dir, "a_inf"),
                         {{"a", aflat.data(), {nn, 4}},
                          {"b", bflat.data(), {nn, 4}},
                          {"valid", valid.data(), {nn}}},
                         meta);
  }

  io::write_json(join(dir, "summary.json"), summary);
  write_manifest(dir, "coupling", &cfg, "ok", elapsed_s(wall0));
  std::printf("coupling: residual %.3e, %d/%d nodes improved by renormalization\n", resid,
              improved, tested);
  return 0;
}

int cmd_report(const RunOptions& opt) {
  const std::array<const char*, 4> stages{"algebra", "evolve", "profiles", "coupling"};
  json rep;
  bool found = false, all_ok = true;
  std::printf("%-10s %-8s %s\n", "stage", "status", "highlights");
  for (const char* st : stages) {
    const std::string sj = join(join(opt.out_dir, st), "summary.json");
    if (!io::file_exists(sj)) continue;
    found = true;
    const json j = io::read_json(sj);
    rep["stages"][st] = j;
    const std::string status = j.value("status", "unknown");
    all_ok = all_ok && status == "ok";
    std::string hl;
    char buf[160];
    if (std::string(st) == "algebra") {
      std::snprintf(buf, sizeof(buf), "%zu suites", j.value("suites", json::array()).size());
      hl = buf;
    } else if (std::string(st) == "evolve") {
      std::snprintf(buf, sizeof(buf), "t_final %.3f  charge drift %.2e  lorenz max %.2e",
                    j.value("t_final", 0.0), j.value("charge_drift", 0.0),
                    j.value("lorenz_max", 0.0));
      hl = buf;
    } else if (std::string(st) == "profiles") {
      std::snprintf(buf, sizeof(buf), "extracted %d/%d nodes", j.value("nodes_extracted", 0),
                    j.value("nodes_lattice", 0));
      hl = buf;
    } else {
      std::snprintf(buf, sizeof(buf), "residual %.2e  improved %d/%d",
                    j.value("helmholtz_residual", 0.0),
                    j.contains("renormalization") ? j["renormalization"].value("nodes_improved", 0)
                                                  : 0,
                    j.contains("renormalization") ? j["renormalization"].value("nodes_tested", 0)
                                                  : 0);
      hl = buf;
    }
    std::printf("%-10s %-8s %s\n", st, status.c_str(), hl.c_str());
    const std::string mj = join(join(opt.out_dir, st), "manifest.json");
    if (io::file_exists(mj))
      rep["wall_clock_seconds"][st] = io::read_json(mj).value("wall_clock_seconds", 0.0);
  }
  if (!found) {
    std::fprintf(stderr, "report: no stage summaries under %s\n", opt.out_dir.c_str());
    return 2;
  }
  rep["all_ok"] = all_ok;
  io::write_json(join(opt.out_dir, "report.json"), rep);
  return all_ok ? 0 : 1;
}

}  // namespace mdlab
