#pragma once

#include <array>

#include "mdlab/linalg.hpp"

namespace mdlab {

// Metric g = diag(-1,1,1,1). Indices are raised/lowered with it everywhere.
inline constexpr std::array<double, 4> metric_diag{-1.0, 1.0, 1.0, 1.0};

// Dirac representation: gamma^0 = diag(I2,-I2), gamma^j off-diagonal Pauli blocks,
// satisfying gamma^mu gamma^nu + gamma^nu gamma^mu = -2 g^{mu nu} I4.
struct GammaSet {
  std::array<Mat4, 4> gamma;   // gamma^mu, upper index
  std::array<Mat2, 3> pauli;   // sigma^1..sigma^3 (index 0..2)

  // gamma_mu = g_{mu mu} gamma^mu (diagonal metric)
  Mat4 lower(int mu) const { return gamma[mu] * metric_diag[mu]; }
};

GammaSet build_gamma_set();

// psibar = psi^dagger gamma^0, as a row covector.
std::array<cplx, 4> dirac_adjoint(const GammaSet& g, const Spinor& psi);

// psibar M psi for a 4x4 matrix M.
cplx bar_sandwich(const GammaSet& g, const Spinor& psi, const Mat4& m);

// J_mu = psibar gamma_mu psi (lower index). Real because gamma^0 gamma_mu is Hermitian;
// J_0 = -|psi|^2.
std::array<double, 4> current_density(const GammaSet& g, const Spinor& psi);

// gamma^theta = theta_j gamma^j for a unit vector theta.
Mat4 gamma_theta(const GammaSet& g, const std::array<double, 3>& theta);

// gamma^H = x_alpha gamma^alpha / sqrt(t^2-|x|^2), defined strictly inside the cone.
// Rejects near-null points: t^2-|x|^2 < 1e-10 (t^2+|x|^2).
Mat4 gamma_H(const GammaSet& g, double t, const std::array<double, 3>& x);

struct BoostVelocity {
  std::array<double, 3> v{};

  explicit BoostVelocity(const std::array<double, 3>& vin);

  double abs() const;
  double rapidity() const;                 // atanh|v|
  std::array<double, 3> dir() const;       // v/|v| (e1 for v = 0)
  std::array<double, 4> upper() const {    // v^alpha = (1, v)
    return {1.0, v[0], v[1], v[2]};
  }
  std::array<double, 4> lower() const {    // v_alpha = (-1, v)
    return {-1.0, v[0], v[1], v[2]};
  }
};

enum class ProjectorFlavor { theta, v };

struct ProjectorPair {
  Mat4 p_plus;
  Mat4 p_minus;
  ProjectorFlavor flavor;
};

// P^theta_pm = (I,pm gamma^0 gamma^theta)/2; Hermitian, rank 2, exchanged by gamma^0.
ProjectorPair projectors_theta(const GammaSet& g, const std::array<double, 3>& theta);

// 2 P^pm_v = I -/+ gamma^H, evaluated at (t,x) = (1,v) on the unit hyperboloid ray.
ProjectorPair projectors_v(const GammaSet& g, const BoostVelocity& v);

// Same projectors from an arbitrary interior point (they depend only on x/t).
ProjectorPair projectors_at(const GammaSet& g, double t, const std::array<double, 3>& x);

// <psi1,psi2>_H = -<gamma^0 gamma^H psi1, psi2> with <a,b> = b^dagger a.
// Positive definite inside the cone.
cplx inner_product_H(const GammaSet& g, const Spinor& psi1, const Spinor& psi2,
                     double t, const std::array<double, 3>& x);
cplx inner_product_H(const GammaSet& g, const Spinor& psi1, const Spinor& psi2,
                     const BoostVelocity& v);
double norm_H(const GammaSet& g, const Spinor& psi, double t,
              const std::array<double, 3>& x);

// Spinor boost S = exp((chi/2) gamma^0 gamma^e) transporting fibers along the boost
// that maps the rest ray to the v-ray; S gamma^H(1,0) S^-1 = gamma^H(1,v).
Mat4 spinor_boost(const GammaSet& g, const BoostVelocity& v);

// H-orthonormal basis of V^pm_v = ker P^pm_v, boost-transported from v = 0
// (so the fields sigma_j(x/t) satisfy Omega-hat sigma = 0 by construction).
std::array<Spinor, 2> basis_V(const GammaSet& g, const BoostVelocity& v, int sign);

}  // namespace mdlab
