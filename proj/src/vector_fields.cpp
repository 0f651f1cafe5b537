#include "mdlab/vector_fields.hpp"

namespace mdlab {

namespace {

Point4 shifted(Point4 p, int mu, double d) {
  p[mu] += d;
  return p;
}

double x_lower(const Point4& p, int mu) { return metric_diag[mu] * p[mu]; }

// psibar1 gamma_delta psi2 (mixed bilinear; complex in general).
cplx bar_between(const GammaSet& G, const Spinor& psi1, const Mat4& m, const Spinor& psi2) {
  const auto bar = dirac_adjoint(G, psi1);
  const Spinor mp = m * psi2;
  cplx acc{};
  for (int i = 0; i < 4; ++i) acc += bar[i] * mp[i];
  return acc;
}

}  // namespace

Spinor fd_partial(const SpinorField4& f, const Point4& p, int mu, double h) {
  return (f(shifted(p, mu, h)) - f(shifted(p, mu, -h))) * (0.5 / h);
}

double fd_partial(const ScalarField4& f, const Point4& p, int mu, double h) {
  return (f(shifted(p, mu, h)) - f(shifted(p, mu, -h))) * (0.5 / h);
}

Spinor omega(const SpinorField4& f, const Point4& p, int alpha, int beta, double h) {
  return fd_partial(f, p, alpha, h) * x_lower(p, beta) -
         fd_partial(f, p, beta, h) * x_lower(p, alpha);
}

Spinor omega_hat(const GammaSet& G, const SpinorField4& f, const Point4& p, int alpha, int beta,
                 double h) {
  return omega(f, p, alpha, beta, h) + (G.lower(alpha) * G.lower(beta)) * f(p) * 0.5;
}

std::array<double, 4> omega_tilde(const Potential4& A, const Point4& p, int alpha, int beta,
                                  double h) {
  const auto a = A(p);
  std::array<double, 4> out{};
  for (int mu = 0; mu < 4; ++mu) {
    auto comp = [&](const Point4& q) { return A(q)[mu]; };
    out[mu] = fd_partial(comp, p, alpha, h) * x_lower(p, beta) -
              fd_partial(comp, p, beta, h) * x_lower(p, alpha);
    if (mu == beta) out[mu] += metric_diag[beta] * a[alpha];
    if (mu == alpha) out[mu] -= metric_diag[alpha] * a[beta];
  }
  return out;
}

Spinor dirac_op(const GammaSet& G, const SpinorField4& f, const Point4& p, double h) {
  Spinor out = f(p);
  constexpr cplx mi{0.0, -1.0};
  for (int mu = 0; mu < 4; ++mu) out = out + (G.gamma[mu] * fd_partial(f, p, mu, h)) * mi;
  return out;
}

Spinor commutator_residual(const GammaSet& G, const SpinorField4& psi, const Point4& p, int alpha,
                           int beta, double h) {
  SpinorField4 ohat = [&](const Point4& q) { return omega_hat(G, psi, q, alpha, beta, h); };
  SpinorField4 dpsi = [&](const Point4& q) { return dirac_op(G, psi, q, h); };
  return dirac_op(G, ohat, p, h) - omega_hat(G, dpsi, p, alpha, beta, h);
}

Spinor product_rule_psi_residual(const GammaSet& G, const SpinorField4& psi, const Potential4& A,
                                 const Point4& p, int alpha, int beta, double h) {
  SpinorField4 apsi = [&](const Point4& q) {
    const auto a = A(q);
    const Spinor v = psi(q);
    Spinor out{};
    for (int mu = 0; mu < 4; ++mu) out = out + (G.gamma[mu] * v) * a[mu];
    return out;
  };
  Spinor lhs = omega_hat(G, apsi, p, alpha, beta, h);

  const auto ta = omega_tilde(A, p, alpha, beta, h);
  const Spinor psip = psi(p);
  const Spinor ohp = omega_hat(G, psi, p, alpha, beta, h);
  const auto ap = A(p);
  for (int mu = 0; mu < 4; ++mu)
    lhs = lhs - (G.gamma[mu] * psip) * ta[mu] - (G.gamma[mu] * ohp) * ap[mu];
  return lhs;
}

std::array<double, 4> product_rule_current_residual(const GammaSet& G, const SpinorField4& psi,
                                                    const Point4& p, int alpha, int beta,
                                                    double h) {
  Potential4 J = [&](const Point4& q) { return current_density(G, psi(q)); };
  auto lhs = omega_tilde(J, p, alpha, beta, h);
  const Spinor psip = psi(p);
  const Spinor ohp = omega_hat(G, psi, p, alpha, beta, h);
  for (int mu = 0; mu < 4; ++mu) {
    const cplx rhs =
        bar_between(G, ohp, G.lower(mu), psip) + bar_between(G, psip, G.lower(mu), ohp);
    lhs[mu] -= rhs.real();  // the pair sum is real (conjugate terms)
  }
  return lhs;
}

double fd_box(const ScalarField4& f, const Point4& p, double h) {
  const double c = f(p);
  double out = (f(shifted(p, 0, h)) - 2.0 * c + f(shifted(p, 0, -h))) / (h * h);
  for (int j = 1; j < 4; ++j)
    out -= (f(shifted(p, j, h)) - 2.0 * c + f(shifted(p, j, -h))) / (h * h);
  return out;
}

}  // namespace mdlab
