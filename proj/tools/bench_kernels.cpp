// Times the OpenMP kernels against the serial reference paths and checks that
// both produce the same numbers.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "mdlab/evolution.hpp"
#include "mdlab/gamma.hpp"
#include "mdlab/geometry.hpp"
#include "mdlab/grid.hpp"
#include "mdlab/initial_data.hpp"
#include "mdlab/parallel.hpp"
#include "mdlab/wave_packet.hpp"

using namespace mdlab;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

struct BenchRow {
  std::string name;
  double serial_s = 0.0;
  double parallel_s = 0.0;
  double max_diff = 0.0;
};

void print_row(const BenchRow& r) {
  std::printf("%-28s serial %8.4f s   parallel %8.4f s   speedup %5.2fx   max diff %.3e\n",
              r.name.c_str(), r.serial_s, r.parallel_s, r.serial_s / r.parallel_s, r.max_diff);
}

}  // namespace

int main(int argc, char** argv) {
  init_threads();
  const int n = argc > 1 ? std::atoi(argv[1]) : 48;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("grid %d^3, best of %d, %d thread(s)\n", n, reps, thread_count());

  const GridSpec spec{n, 16.0};
  SpectralGrid sg(spec);
  GaussianSpec gspec;
  gspec.amplitude = 0.1;
  gspec.sigma = 2.0;
  std::array<CField, 4> psi0;
  fill_gaussian_spinor(spec, gspec, psi0);
  std::array<RField, 3> asp, adotsp;
  for (int d = 0; d < 3; ++d) {
    asp[d].assign(spec.size(), 0.0);
    adotsp[d].assign(spec.size(), 0.0);
  }
  const CauchyData data =
      solve_constraints(sg, std::move(psi0), std::move(asp), std::move(adotsp), true);

  StepperConfig sc;
  sc.dt = 0.01;
  Evolver ev(sg, sc);
  ev.set_state(state_from_data(data));
  FieldState ds_ser = ev.state(), ds_par = ev.state();

  {
    BenchRow r{"coupled rhs"};
    set_parallel_enabled(false);
    r.serial_s = time_best_of(reps, [&] { ev.eval_rhs(ev.state(), ds_ser); });
    set_parallel_enabled(true);
    r.parallel_s = time_best_of(reps, [&] { ev.eval_rhs(ev.state(), ds_par); });
    for (int c = 0; c < 4; ++c)
      for (std::size_t i = 0; i < spec.size(); ++i)
        r.max_diff = std::max(r.max_diff, std::abs(ds_ser.psi[c][i] - ds_par.psi[c][i]));
    for (int mu = 0; mu < 4; ++mu)
      for (std::size_t i = 0; i < spec.size(); ++i)
        r.max_diff = std::max({r.max_diff, std::abs(ds_ser.a[mu][i] - ds_par.a[mu][i]),
                               std::abs(ds_ser.adot[mu][i] - ds_par.adot[mu][i])});
    print_row(r);
  }

  {
    BenchRow r{"rk4 step"};
    Evolver e1(sg, sc), e2(sg, sc);
    e1.set_state(state_from_data(data));
    e2.set_state(state_from_data(data));
    set_parallel_enabled(false);
    r.serial_s = time_best_of(reps, [&] { e1.step(); });
    set_parallel_enabled(true);
    r.parallel_s = time_best_of(reps, [&] { e2.step(); });
    // after `reps` steps each, the states must agree bit-for-bit up to roundoff
    for (int c = 0; c < 4; ++c)
      for (std::size_t i = 0; i < spec.size(); ++i)
        r.max_diff = std::max(r.max_diff, std::abs(e1.state().psi[c][i] - e2.state().psi[c][i]));
    print_row(r);
  }

  {
    BenchRow r{"packet quadrature"};
    const GammaSet G = build_gamma_set();
    const BoostVelocity v({0.3, 0.1, 0.0});
    const WavePacket pk(G, v, +1, WavePacket::Order::corrected);
    const HyperboloidChart chart(8.0, 3.0, 0.1, v.v);
    cplx q_ser, q_par;
    const auto integrand = [&](const SpacetimePoint& p) {
      return cplx(norm_H(G, pk(p), p.t, p.x), 0.0);
    };
    set_parallel_enabled(false);
    r.serial_s = time_best_of(reps, [&] { q_ser = hyperboloid_quadrature(chart, integrand).value; });
    set_parallel_enabled(true);
    r.parallel_s =
        time_best_of(reps, [&] { q_par = hyperboloid_quadrature(chart, integrand).value; });
    r.max_diff = std::abs(q_ser - q_par);
    print_row(r);
  }

  set_parallel_enabled(true);
  return 0;
}
