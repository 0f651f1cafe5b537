#pragma once

#include <array>

#include "mdlab/grid.hpp"

namespace mdlab {

// Exact free-flow propagators used as references for the time stepper. The
// spinor symbol is hand-coded in Pauli blocks here, independent of the matrix
// algebra module, so solver/reference share no arithmetic.

// Free spinor flow: each Fourier mode evolves by exp(-i t M(xi)) with
// M(xi) = gamma^0 (gamma^j xi_j + I), M^2 = (1 + |xi|^2) I, so
// exp(-i t M) = cos(w t) I - i sin(w t)/w M, w = sqrt(1 + |xi|^2). Unitary.
void oracle_linear_dirac(const SpectralGrid& sg, const std::array<CField, 4>& psi0, double t,
                         std::array<CField, 4>& out);

// Free wave flow for (f, fdot): mode k evolves by
//   f(t) = cos(|k| t) f0 + sin(|k| t)/|k| fdot0   (k = 0: f0 + t fdot0).
void oracle_linear_wave(const SpectralGrid& sg, const RField& f0, const RField& fdot0, double t,
                        RField& f, RField* fdot = nullptr);

}  // namespace mdlab
