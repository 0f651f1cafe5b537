#pragma once

#include <array>
#include <vector>

#include "mdlab/profiles.hpp"

namespace mdlab {

// 4-vector field on the velocity lattice (same layout as ProfileLimits);
// carries the asymptotic potential a^mu and its source b^mu, upper index.
struct DiskField {
  double v_max = 0.0;
  int nv = 0;
  std::vector<char> valid;
  std::vector<std::array<double, 4>> value;
  bool boundary_warning = false;

  std::size_t size() const { return static_cast<std::size_t>(nv) * nv * nv; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * nv + j) * nv + k;
  }
  double dv() const { return nv > 1 ? 2.0 * v_max / (nv - 1) : 0.0; }
  double vcoord(int i) const { return nv > 1 ? -v_max + i * dv() : 0.0; }
  void allocate();
};

// Radial Green's kernel of (-1-Delta_H) on H^3, K(d) = 1/(4 pi sinh d), with
// the series form below d = 1e-6. Rejects d <= 0.
double greens_kernel(double d);

// Uniform table with linear interpolation for the bulk of the pairwise solve;
// falls back to the exact formula below the first few bins.
class KernelTable {
 public:
  explicit KernelTable(double d_max, int n = 4096);
  double operator()(double d) const;

 private:
  double dx_;
  std::vector<double> k_;
};

// Source of the coupling equation from extracted limits:
//   b^mu(v) = -(v^mu / sqrt(1-v^2)) (|rho^+|_H^2 + |rho^-|_H^2),  v^0 = 1.
DiskField source_b(const GammaSet& g, const ProfileLimits& profiles);

// a(v') = Int K(d_H(v,v')) b(v) dV_H by node summation; the self cell is
// integrated analytically over the geodesic ball of equal hyperbolic volume.
// Sets boundary_warning when >1% of the |b| mass sits on the outer node shell.
DiskField solve_coupling(const DiskField& b);

// || (-1 - Delta_H) a - b ||_{L2(H)} / ||b||_{L2(H)} with the discrete
// Laplace-Beltrami operator in Klein coordinates,
//   Delta_H f = (1-v^2) [ (delta_ij - v_i v_j) d_i d_j f - 2 v . grad f ],
// restricted to nodes whose full difference stencil is inside the ball.
double helmholtz_residual(const DiskField& a, const DiskField& b);

}  // namespace mdlab
