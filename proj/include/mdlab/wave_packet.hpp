#pragma once

#include <array>

#include "mdlab/gamma.hpp"
#include "mdlab/geometry.hpp"

namespace mdlab {

// Approximate solutions of the free Dirac equation (-i gamma^mu d_mu + 1) psi = 0,
// concentrated along the ray x = v t inside the light cone. A packet of sign
// s = +/-1 rides the phase exp(s i sqrt(t^2-x^2)); its amplitude lives in the
// resonant subspace V^s_{x/t} and is transported along rays, and the cutoff
// localizes to hyperbolic distance d_H(x/t, v) <~ (t^2-x^2)^{-1/4}.
//
// Order::leading is the bare ansatz
//   psi = chi(y) exp(s i lambda) sigma(x/t),   y = d_H^2(x/t, v) lambda,
//   lambda = sqrt(t^2-x^2),
// whose Dirac residual is only lambda^{-1/2} small relative to the packet.
// Order::corrected subtracts half the nonresonant projection of the residual
// terms, which upgrades the relative residual to ~lambda^{-1}:
//   psi_corr = psi - (1/2) P^s_{x/t} (R2 + R3 + R4 + R5).
class WavePacket {
 public:
  enum class Order { leading, corrected };

  // coeff expands the amplitude in the transported basis of V^s_v.
  WavePacket(const GammaSet& g, const BoostVelocity& v, int sign, Order order,
             std::array<cplx, 2> coeff = {cplx(1.0, 0.0), cplx(0.0, 0.0)});

  // Evaluate at an interior point (t^2 > |x|^2, t > 0); zero where the cutoff
  // vanishes. Throws std::domain_error outside the cone.
  Spinor operator()(const SpacetimePoint& p) const;

  // Cutoff chi(y) = c (1-y^2)^4 on [0,1), zero beyond, with c chosen so that
  // eta -> chi(|eta|^2) has unit integral over R^3; chi_d1/chi_d2 are the first
  // two derivatives in y. The |eta|^2 convention matches y, which is quadratic
  // in the hyperbolic distance.
  static double chi(double y);
  static double chi_d1(double y);
  static double chi_d2(double y);

  int sign() const { return sign_; }
  Order order() const { return order_; }
  const BoostVelocity& velocity() const { return v_; }

 private:
  // Everything is computed in the rest frame of the packet and boosted back;
  // the construction is Lorentz covariant, so this is exact.
  Spinor eval_rest(const SpacetimePoint& p) const;

  GammaSet g_;
  BoostVelocity v_;
  int sign_;
  Order order_;
  std::array<cplx, 2> coeff_;
  LorentzBoost to_rest_;  // coordinates: lab frame -> packet rest frame
  Mat4 from_rest_;        // spinor factor: rest frame -> lab frame
};

// Pointwise residual of the free Dirac operator on the packet, by centered
// differences of step h, together with the rescaled amplitude r defined by
// factoring f = (-i gamma d + 1) psi = (t^2-x^2)^{-1/2} exp(i phi) r.
struct PacketResidual {
  Spinor f;
  Spinor r;
};

PacketResidual packet_residual(const GammaSet& g, const WavePacket& packet,
                               const SpacetimePoint& p, double h = 1e-3);

}  // namespace mdlab
