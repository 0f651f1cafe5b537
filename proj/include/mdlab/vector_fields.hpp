#pragma once

#include <array>
#include <functional>

#include "mdlab/gamma.hpp"

namespace mdlab {

// Finite-difference realization of the Lorentz generators on spacetime
// closures. Points are (t, x1, x2, x3); potentials carry the lower index.
using Point4 = std::array<double, 4>;
using SpinorField4 = std::function<Spinor(const Point4&)>;
using ScalarField4 = std::function<double(const Point4&)>;
using Potential4 = std::function<std::array<double, 4>(const Point4&)>;

// Centered O(h^2) partial derivative along coordinate mu (0 = time).
Spinor fd_partial(const SpinorField4& f, const Point4& p, int mu, double h);
double fd_partial(const ScalarField4& f, const Point4& p, int mu, double h);

// Base generator on components: x_beta d_alpha - x_alpha d_beta, with the
// coordinate index lowered (x_0 = -t).
Spinor omega(const SpinorField4& f, const Point4& p, int alpha, int beta, double h);

// Spinor generator: omega + (1/2) gamma_alpha gamma_beta (both indices lowered).
Spinor omega_hat(const GammaSet& G, const SpinorField4& f, const Point4& p, int alpha, int beta,
                 double h);

// Potential generator: (omega A)_delta + g_{beta delta} A_alpha - g_{alpha delta} A_beta.
std::array<double, 4> omega_tilde(const Potential4& A, const Point4& p, int alpha, int beta,
                                  double h);

// (-i gamma^mu d_mu + 1) psi with FD derivatives.
Spinor dirac_op(const GammaSet& G, const SpinorField4& f, const Point4& p, double h);

// [omega_hat, -i gamma^mu d_mu + 1] psi at p; vanishes at O(h^2) for smooth psi.
Spinor commutator_residual(const GammaSet& G, const SpinorField4& psi, const Point4& p, int alpha,
                           int beta, double h);

// omega_hat(gamma^mu A_mu psi) - (omega_tilde A)_mu gamma^mu psi
//   - A_mu gamma^mu omega_hat(psi); vanishes identically, discretely O(h^2).
Spinor product_rule_psi_residual(const GammaSet& G, const SpinorField4& psi, const Potential4& A,
                                 const Point4& p, int alpha, int beta, double h);

// omega_tilde applied to the current J_delta = psibar gamma_delta psi, minus
// bar(omega_hat psi) gamma_delta psi + psibar gamma_delta (omega_hat psi).
std::array<double, 4> product_rule_current_residual(const GammaSet& G, const SpinorField4& psi,
                                                    const Point4& p, int alpha, int beta, double h);

// FD d'Alembertian d_t^2 - lap, O(h^2).
double fd_box(const ScalarField4& f, const Point4& p, double h);

}  // namespace mdlab
