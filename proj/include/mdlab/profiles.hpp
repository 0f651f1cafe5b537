#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mdlab/gamma.hpp"
#include "mdlab/geometry.hpp"
#include "mdlab/wave_packet.hpp"

namespace mdlab {

using PsiSampler = std::function<Spinor(const SpacetimePoint&)>;

// Asymptotic profile pair at one (hyperboloid level, velocity node): the
// rho^s spinors live in V^s_v; coeff are their components in the transported
// orthonormal basis sigma_j = basis_V(g, v, s).
struct ProfileSample {
  double t{};  // time coordinate of the node: t = rho / sqrt(1-v^2)
  double rho{};
  std::array<double, 3> v{};
  Spinor rho_plus{}, rho_minus{};
  std::array<cplx, 2> coeff_plus{}, coeff_minus{};
};

// Cubical chart centered on the packet around velocity v at level rho, padded
// to hold the cutoff support. The center is snapped to the grid lattice of
// spacing h so chart nodes can coincide with field-grid nodes.
HyperboloidChart packet_chart(const BoostVelocity& v, double rho, double h, double pad = 1.3);

// Profile extraction by packet testing:
//   <rho^s, sigma_j>_H = (t^2-(vt)^2)^{3/2} Int_H <psi, packet_{s,j}>_H dV_H
// with corrected packets of unit basis amplitude. Throws if more than 1% of
// the integrand mass sits on the chart boundary (support truncation).
ProfileSample test_profile(const GammaSet& g, const PsiSampler& psi, const BoostVelocity& v,
                           const HyperboloidChart& chart);

// One RK4 step of the asymptotic ODE system along the ray x = vt,
//   i d/dt rho^s = -v^alpha A_alpha rho^s
//                  - e^{2 i phi_s} sqrt(1-v^2) A_alpha P_res^s gamma^alpha rho^{-s},
// phi_s = s t sqrt(1-v^2). A_lower(t) supplies the lower-index potential on
// the ray; the coupled term is kept only in with_nonresonant mode. The flow
// preserves the V^s_v constraint; the resonant part is an H-isometry.
enum class ModulationMode { resonant_only, with_nonresonant };

ProfileSample modulation_step(const GammaSet& g, const ProfileSample& in,
                              const std::function<std::array<double, 4>(double)>& A_lower,
                              double dt, ModulationMode mode);

// Running phase theta(t,v) = Int v_alpha A^alpha dt along the ray, v_0 = -1,
// by trapezoid over monotone samples of the upper-index potential. The
// accumulator bridges consecutive calls, so splitting the sample stream at
// any point is exact.
struct PhaseAccumulator {
  std::array<double, 3> v{};
  double theta = 0.0;
  double t_last = 0.0;
  double f_last = 0.0;
  bool has_last = false;
};

PhaseAccumulator accumulate_theta(PhaseAccumulator acc, const std::vector<double>& t,
                                  const std::vector<std::array<double, 4>>& a_upper);

// Time-extrapolation of the profile at one node. The renormalized sequence is
//   with a_inf:   rho~(t) = exp(-i v^alpha a_alpha ln(t sqrt(1-v^2)) / sqrt(1-v^2)) rho(t)
//   with thetas:  rho~(t) = exp(-i theta(t)) rho(t)
// (the first removes the logarithmic phase of the asymptotic expansion, the
// second the accumulated potential phase). Returns the last renormalized
// value plus the Cauchy-difference sequence; `converged` means the
// differences never increased.
struct ProfileHistory {
  std::array<double, 3> v{};
  std::vector<ProfileSample> samples;  // monotone in t
  std::vector<double> theta;           // optional, aligned with samples
};

struct ExtractionResult {
  Spinor rho_inf_plus{}, rho_inf_minus{};
  std::vector<double> cauchy_plus, cauchy_minus;
  bool converged_plus = false, converged_minus = false;
};

ExtractionResult extract_rho_infinity(const GammaSet& g, const ProfileHistory& hist,
                                      const std::array<double, 4>* a_inf_lower);

// Extracted limits over a uniform velocity lattice [-v_max, v_max]^3 with nv
// nodes per axis; nodes outside |v| <= v_max are masked invalid. a_inf is the
// lower-index asymptotic potential per node (zero when absent).
struct ProfileLimits {
  double v_max = 0.0;
  int nv = 0;
  std::vector<char> valid;
  std::vector<Spinor> rho_plus, rho_minus;
  std::vector<std::array<double, 4>> a_inf;

  std::size_t size() const { return static_cast<std::size_t>(nv) * nv * nv; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * nv + j) * nv + k;
  }
  double dv() const { return nv > 1 ? 2.0 * v_max / (nv - 1) : 0.0; }
  double vcoord(int i) const { return nv > 1 ? -v_max + i * dv() : 0.0; }
  void allocate();  // sizes the vectors and marks lattice nodes inside the ball
};

// Main term of the asymptotic expansion at an interior point,
//   psi = q^{-3/4} Sum_s exp(s i sqrt(q)) exp(i x_mu a^mu ln(q)/(2 sqrt(q))) rho^s(x/t),
// q = t^2-|x|^2, with trilinear interpolation of rho^s and a_inf over the
// velocity lattice. Throws outside the valid-cell hull.
Spinor reconstruct_psi(const GammaSet& g, const ProfileLimits& pf, const SpacetimePoint& p);

// Charge carried by the limits, Int (|rho^+|_H^2 + |rho^-|_H^2) dV_{H^3}, with
// the Klein-ball volume element dv/(1-|v|^2)^2, against a reference ||psi_0||^2.
struct EnergyIdentity {
  double lhs{}, rhs{}, rel_gap{};
};

EnergyIdentity energy_identity_check(const GammaSet& g, const ProfileLimits& pf,
                                     double psi0_l2_sq);

}  // namespace mdlab
