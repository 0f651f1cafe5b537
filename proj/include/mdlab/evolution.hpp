#pragma once

#include <array>
#include <functional>
#include <string>

#include "mdlab/initial_data.hpp"

namespace mdlab {

struct FieldState {
  double t = 0.0;
  GridSpec grid;
  std::array<CField, 4> psi;
  std::array<RField, 4> a;
  std::array<RField, 4> adot;
};

FieldState state_from_data(const CauchyData& d);

struct StepperConfig {
  double dt = 0.01;
  double t_end = 1.0;
  bool dealias = true;        // 2/3-rule on the quadratic current
  bool linear_mode = false;   // drop the coupling both ways: free spinor + free wave
  bool charge_fix = false;    // add the i Q psi source from the exterior Coulomb term
  ChargeFixProfile fix{};
  double cfl_limit = 0.5;
};

// Throws (naming the bound) unless dt * N * pi / L <= cfl_limit.
void validate_cfl(const GridSpec& g, const StepperConfig& cfg);

// Classical RK4 method-of-lines stepper for
//   d/dt psi   = -g0 g^j d_j psi - i g0 psi + i (A_0 + Q) psi + i A_j g0 g^j psi
//   d/dt A_mu  = Adot_mu
//   d/dt Adot_mu = lap A_mu - J_mu,   J_mu = psibar gamma_mu psi.
class Evolver {
 public:
  Evolver(const SpectralGrid& sg, StepperConfig cfg);

  void set_state(FieldState s);
  const FieldState& state() const { return state_; }
  const StepperConfig& config() const { return cfg_; }

  void step();                 // one RK4 step of size cfg.dt
  void advance_to(double t);   // integer steps, then one short step onto t

  // Time derivative of s into ds (allocated by caller via state shape).
  void eval_rhs(const FieldState& s, FieldState& ds) const;

  // Throws std::runtime_error naming the time if the state has lost finiteness.
  void check_finite() const;

 private:
  void rk_step(double dt);

  const SpectralGrid& sg_;
  StepperConfig cfg_;
  FieldState state_;
  mutable FieldState k_, acc_, stage_;
};

// L2 norm of the gauge functional -d_t A_0 + d_j A_j (index raised with
// g = diag(-1,1,1,1)).
double lorenz_residual(const SpectralGrid& sg, const FieldState& s);

// (||psi||_L2, ||A||_{Hdot 1/2}, ||Adot||_{Hdot -1/2}); the potential norms
// combine the four components in quadrature, zero mode dropped.
std::array<double, 3> h0_norm(const SpectralGrid& sg, const FieldState& s);

// Pointwise residual of d_t |psi|^2 + d_j (psi+ g0 g^j psi) + 2 Im(psi+ g0 F)
// with F the first-order source (potential term plus charge-fix term),
// evaluated at mid.t from three equally spaced snapshots (centered d_t).
RField charge_flux_residual(const SpectralGrid& sg, const FieldState& prev, const FieldState& mid,
                            const FieldState& next, bool charge_fixed, const ChargeFixProfile& fix);

// J_mu = psibar gamma_mu psi at one point, hand-coded Pauli blocks (kernel
// route; the matrix-algebra module provides the independent reference).
std::array<double, 4> current_at(const cplx u1, const cplx u2, const cplx l1, const cplx l2);

}  // namespace mdlab
