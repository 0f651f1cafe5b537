#include "mdlab/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "mdlab/parallel.hpp"

namespace mdlab {

namespace {

struct Node {
  std::size_t at;
  std::array<double, 3> v;
  double w;  // hyperbolic cell volume dv^3/(1-v^2)^2
};

std::vector<Node> valid_nodes(const DiskField& f) {
  std::vector<Node> nodes;
  const double cell = f.dv() * f.dv() * f.dv();
  for (int i = 0; i < f.nv; ++i)
    for (int j = 0; j < f.nv; ++j)
      for (int k = 0; k < f.nv; ++k) {
        const std::size_t at = f.index(i, j, k);
        if (!f.valid[at]) continue;
        const std::array<double, 3> v = {f.vcoord(i), f.vcoord(j), f.vcoord(k)};
        const double w2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        nodes.push_back({at, v, cell / ((1.0 - w2) * (1.0 - w2))});
      }
  return nodes;
}

// Geodesic ball radius with hyperbolic volume W: pi (sinh 2r - 2r) = W.
double equal_volume_radius(double w) {
  double r = std::cbrt(3.0 * w / (4.0 * M_PI));
  for (int it = 0; it < 30; ++it) {
    const double f = M_PI * (std::sinh(2.0 * r) - 2.0 * r) - w;
    const double df = 2.0 * M_PI * (std::cosh(2.0 * r) - 1.0);
    const double step = f / df;
    r -= step;
    if (std::abs(step) < 1e-15 * r) break;
  }
  return r;
}

}  // namespace

void DiskField::allocate() {
  const std::size_t sz = size();
  valid.assign(sz, 0);
  value.assign(sz, std::array<double, 4>{});
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j)
      for (int k = 0; k < nv; ++k) {
        const double x = vcoord(i), y = vcoord(j), z = vcoord(k);
        valid[index(i, j, k)] = x * x + y * y + z * z <= v_max * v_max + 1e-12 ? 1 : 0;
      }
}

double greens_kernel(double d) {
  if (d <= 0.0) throw std::domain_error("greens_kernel: d must be positive");
  if (d < 1e-6) return (1.0 - d * d / 6.0) / (4.0 * M_PI * d);
  return 1.0 / (4.0 * M_PI * std::sinh(d));
}

KernelTable::KernelTable(double d_max, int n) : dx_(d_max / n), k_(n + 2) {
  if (d_max <= 0.0 || n < 16) throw std::invalid_argument("KernelTable: bad range");
  for (std::size_t i = 1; i < k_.size(); ++i) k_[i] = greens_kernel(i * dx_);
  k_[0] = 2.0 * k_[1];  // never used below the exact-formula crossover
}

double KernelTable::operator()(double d) const {
  if (d < 4.0 * dx_) return greens_kernel(d);
  const double s = d / dx_;
  std::size_t i = static_cast<std::size_t>(s);
  if (i + 1 >= k_.size()) throw std::domain_error("KernelTable: d beyond tabulated range");
  const double f = s - i;
  return (1.0 - f) * k_[i] + f * k_[i + 1];
}

DiskField source_b(const GammaSet& g, const ProfileLimits& profiles) {
  DiskField b;
  b.v_max = profiles.v_max;
  b.nv = profiles.nv;
  b.allocate();
  for (int i = 0; i < b.nv; ++i)
    for (int j = 0; j < b.nv; ++j)
      for (int k = 0; k < b.nv; ++k) {
        const std::size_t at = b.index(i, j, k);
        if (!b.valid[at]) continue;
        const std::array<double, 3> w = {b.vcoord(i), b.vcoord(j), b.vcoord(k)};
        const double w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
        const BoostVelocity v(w);
        const cplx np = inner_product_H(g, profiles.rho_plus[at], profiles.rho_plus[at], v);
        const cplx nm = inner_product_H(g, profiles.rho_minus[at], profiles.rho_minus[at], v);
        const double mass = np.real() + nm.real();
        const double fac = -mass / std::sqrt(1.0 - w2);
        b.value[at] = {fac, fac * w[0], fac * w[1], fac * w[2]};
      }
  return b;
}

DiskField solve_coupling(const DiskField& b) {
  const std::vector<Node> nodes = valid_nodes(b);
  DiskField a;
  a.v_max = b.v_max;
  a.nv = b.nv;
  a.allocate();

  // |b| mass on the outermost valid shell (nodes with an invalid/outside
  // lattice neighbor) against the total.
  double shell = 0.0, total = 0.0;
  for (const Node& nd : nodes) {
    double mag = 0.0;
    for (int mu = 0; mu < 4; ++mu) mag += std::abs(b.value[nd.at][mu]);
    total += mag * nd.w;
    const std::size_t i = nd.at / (static_cast<std::size_t>(b.nv) * b.nv);
    const std::size_t j = (nd.at / b.nv) % b.nv;
    const std::size_t k = nd.at % b.nv;
    bool edge = false;
    for (int d = 0; d < 3; ++d) {
      const int c[3] = {static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)};
      for (int pm : {-1, 1}) {
        int cc[3] = {c[0], c[1], c[2]};
        cc[d] += pm;
        if (cc[d] < 0 || cc[d] >= b.nv || !b.valid[b.index(cc[0], cc[1], cc[2])]) edge = true;
      }
    }
    if (edge) shell += mag * nd.w;
  }
  a.boundary_warning = shell > 0.01 * total && total > 0.0;

  // Pairwise kernel sum; d_max on the lattice is bounded by the diameter of
  // the v_max ball.
  const double d_max = 2.0 * std::atanh(std::min(b.v_max, 1.0 - 1e-12)) + 1.0;
  const KernelTable kernel(d_max);

  par::for_n(static_cast<std::ptrdiff_t>(nodes.size()), [&](std::ptrdiff_t ti) {
    const Node& tgt = nodes[ti];
    std::array<double, 4> acc{};
    for (const Node& src : nodes) {
      double kw;
      if (src.at == tgt.at) {
        kw = std::cosh(equal_volume_radius(src.w)) - 1.0;  // int_ball K dV
      } else {
        kw = kernel(hyperbolic_distance(src.v, tgt.v)) * src.w;
      }
      for (int mu = 0; mu < 4; ++mu) acc[mu] += kw * b.value[src.at][mu];
    }
    a.value[tgt.at] = acc;
  });
  return a;
}

double helmholtz_residual(const DiskField& a, const DiskField& b) {
  if (a.nv != b.nv || a.v_max != b.v_max)
    throw std::invalid_argument("helmholtz_residual: lattice mismatch");
  const int nv = a.nv;
  const double h = a.dv();
  const double cell = h * h * h;

  double rnorm = 0.0, bnorm = 0.0;
  for (int i = 1; i + 1 < nv; ++i)
    for (int j = 1; j + 1 < nv; ++j)
      for (int k = 1; k + 1 < nv; ++k) {
        // full 3x3x3 stencil box must be valid
        bool ok = true;
        for (int di = -1; di <= 1 && ok; ++di)
          for (int dj = -1; dj <= 1 && ok; ++dj)
            for (int dk = -1; dk <= 1 && ok; ++dk)
              if (!a.valid[a.index(i + di, j + dj, k + dk)]) ok = false;
        if (!ok) continue;

        const std::array<double, 3> v = {a.vcoord(i), a.vcoord(j), a.vcoord(k)};
        const double w2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        const double wq = cell / ((1.0 - w2) * (1.0 - w2));

        for (int mu = 0; mu < 4; ++mu) {
          const auto val = [&](int di, int dj, int dk) {
            return a.value[a.index(i + di, j + dj, k + dk)][mu];
          };
          const double f0 = val(0, 0, 0);
          double grad[3], hess[3][3];
          for (int d = 0; d < 3; ++d) {
            int e[3] = {0, 0, 0};
            e[d] = 1;
            grad[d] = (val(e[0], e[1], e[2]) - val(-e[0], -e[1], -e[2])) / (2.0 * h);
            hess[d][d] = (val(e[0], e[1], e[2]) - 2.0 * f0 + val(-e[0], -e[1], -e[2])) / (h * h);
          }
          const auto cross = [&](int d1, int d2) {
            int ep[3] = {0, 0, 0}, em[3] = {0, 0, 0};
            ep[d1] = 1;
            ep[d2] += 1;
            em[d1] = 1;
            em[d2] -= 1;
            return (val(ep[0], ep[1], ep[2]) - val(em[0], em[1], em[2]) -
                    val(-em[0], -em[1], -em[2]) + val(-ep[0], -ep[1], -ep[2])) /
                   (4.0 * h * h);
          };
          hess[0][1] = hess[1][0] = cross(0, 1);
          hess[0][2] = hess[2][0] = cross(0, 2);
          hess[1][2] = hess[2][1] = cross(1, 2);

          double contr = 0.0;
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
              contr += ((p == q ? 1.0 : 0.0) - v[p] * v[q]) * hess[p][q];
          const double vgrad = v[0] * grad[0] + v[1] * grad[1] + v[2] * grad[2];
          const double lap = (1.0 - w2) * (contr - 2.0 * vgrad);

          const double res = (-f0 - lap) - b.value[b.index(i, j, k)][mu];
          rnorm += res * res * wq;
          bnorm += b.value[b.index(i, j, k)][mu] * b.value[b.index(i, j, k)][mu] * wq;
        }
      }
  if (bnorm == 0.0) return rnorm == 0.0 ? 0.0 : std::sqrt(rnorm);
  return std::sqrt(rnorm / bnorm);
}

}  // namespace mdlab
