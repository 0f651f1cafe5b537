#pragma once

#include <array>
#include <string>

#include "mdlab/grid.hpp"

namespace mdlab {

// Cauchy data for the coupled spinor/potential system: psi is the C^4 field,
// a[mu]/adot[mu] the potential and its time derivative at t = 0.
struct CauchyData {
  GridSpec grid;
  std::array<CField, 4> psi;
  std::array<RField, 4> a;
  std::array<RField, 4> adot;
  bool constrained = false;
  bool charge_fixed = false;
  // Uniform background removed from the constraint source for periodic
  // solvability; equals -charge/L^3. The exterior Coulomb subtraction plays
  // this role on unbounded domains.
  double subtracted_mean = 0.0;
};

CauchyData zero_data(GridSpec g);

// psi0 = amplitude * exp(-|x-c|^2 / (2 sigma^2)) * exp(i k0.x) * weights
struct GaussianSpec {
  double amplitude = 0.1;
  double sigma = 2.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> k0{0.0, 0.0, 0.0};
  std::array<cplx, 4> weights{cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}};
};

void fill_gaussian_spinor(const GridSpec& g, const GaussianSpec& spec, std::array<CField, 4>& psi);
void fill_gaussian_scalar(const GridSpec& g, double amplitude, double sigma,
                          const std::array<double, 3>& center, RField& f);

// Charge q = -int |psi|^2 dx (grid quadrature).
double charge(const GridSpec& g, const std::array<CField, 4>& psi);

// Given free data (psi0, spatial a_j, spatial adot_j), produce the dependent
// pair: adot_0 = div a (spectrally exact) and a_0 solving lap a_0 =
// div adot + |psi0|^2. The source mean is the charge obstruction: with
// allow_mean_subtraction it is removed (recorded in subtracted_mean),
// otherwise a mean beyond 1e-12 relative is an error.
CauchyData solve_constraints(const SpectralGrid& sg, std::array<CField, 4> psi0,
                             std::array<RField, 3> a_spatial, std::array<RField, 3> adot_spatial,
                             bool allow_mean_subtraction = true);

// Max-norm of (lap a_0 - div adot - |psi0|^2 - subtracted_mean, adot_0 - div a).
std::array<double, 2> constraint_residual(const SpectralGrid& sg, const CauchyData& data);

// Exterior Coulomb-matching cutoff: rho(s) = 0 for s <= 1/2, 1 for s >= 1,
// a fixed degree-7 smoothstep in between (C^3).
struct ChargeFixProfile {
  double q = 0.0;

  static double rho(double s);
  static double rho_prime(double s);
  // Q(t,x) = rho(|x| - t) q / (4 pi |x|); solves the homogeneous wave
  // equation away from the origin since rho(r - t)/r is an outgoing wave.
  double Q(double t, double r) const;
  double Qdot(double t, double r) const;  // d/dt of the above
};

// a_0 -> a_0 - rho(|x|) q/(4 pi |x|), adot_0 -> adot_0 + rho'(|x|) q/(4 pi |x|);
// all other fields untouched. Evolution must then add the i*Q*psi source term.
CauchyData charge_fix(const SpectralGrid& sg, CauchyData data, const ChargeFixProfile& profile);

// Weighted-Sobolev smallness functional: max of the sum over 3*j0 + k0 <= 9 of
//   || |x|^j0 D^{<=j0+k0} psi ||_{L2} + || |x|^j0 D^{j0+k0} a ||_{Hdot 1/2}
//   + || |x|^j0 D^{j0+k0} adot ||_{Hdot -1/2}
// and the low-frequency term ||a||_{Hdot 1/2-nu} + ||adot||_{Hdot -1/2-nu}.
// D^m acts as the |xi|^m multiplier; weights multiply in physical space; the
// k = 0 mode is dropped from every homogeneous multiplier.
double smallness_norm(const SpectralGrid& sg, const CauchyData& data, double nu);

void save_cauchy_data(const std::string& base_path, const CauchyData& data);
CauchyData load_cauchy_data(const std::string& base_path);

}  // namespace mdlab
