#pragma once

#include <array>
#include <functional>

#include "mdlab/gamma.hpp"
#include "mdlab/linalg.hpp"

namespace mdlab {

struct SpacetimePoint {
  double t{};
  std::array<double, 3> x{};

  double r() const { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }
  double lorentz_q() const { return t * t - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]; }
};

// Geodesic distance on the Klein ball: cosh d = (1 - v.w) / sqrt((1-|v|^2)(1-|w|^2)),
// i.e. the induced distance between the rays (1,v) and (1,w) on a unit hyperboloid.
double hyperbolic_distance(const std::array<double, 3>& v, const std::array<double, 3>& w);

// Gradient of d_H^2(w, v) with respect to w (v held fixed). Smooth through w = v.
std::array<double, 3> dist2_grad(const std::array<double, 3>& w, const std::array<double, 3>& v);

// Coordinate boost taking the (1,0,0,0)-ray to the v-ray, with its spinor factor
// S = exp((chi/2) gamma^0 gamma^e), chi = atanh|v|; S^-1 gamma^mu S = Lambda^mu_nu gamma^nu.
struct LorentzBoost {
  std::array<double, 16> lambda{};  // Lambda^mu_nu, row-major
  Mat4 spinor;

  double l(int mu, int nu) const { return lambda[4 * mu + nu]; }
  SpacetimePoint apply(const SpacetimePoint& p) const;
};

LorentzBoost lorentz_boost(const GammaSet& g, const BoostVelocity& v);

// Spacetime region bookkeeping on the slab T <= t <= 4T (dyadic T):
//   CT_int:            T^2/4 <= t^2-|x|^2 <= 4T^2
//   CT1:               |t-r| <= 2 near-cone band (owns the S < 2 dyadic bins)
//   CTS_plus/minus(S): S <= +/-(t-r) <= 2S, dyadic 2 <= S <= T/2
//   CT_ext:            far exterior catch-all (covers r >= 2t)
// Precedence CT_int > CT1 > CTS > CT_ext; dyadic ties resolve toward the larger S.
// Points above the top hyperboloid (t^2-|x|^2 > 4T^2) or off the slab are errors.
enum class RegionKind { CT_int, CTS_plus, CTS_minus, CT1, CT_ext };

struct RegionLabel {
  RegionKind kind;
  double S{0.0};  // dyadic scale for the CTS bins, 0 otherwise
};

RegionLabel region_classify(double T, const SpacetimePoint& p);

// Graph chart of the hyperboloid t^2-|x|^2 = rho^2: t = sqrt(rho^2+|x|^2), x in a box
// patch. Node weights: dV_H = dx/(t rho^2), dsigma = sqrt(t^2+|x|^2)/t dx, so that
// dsigma = sqrt(t^2+x^2)(t^2-x^2) dV_H holds exactly per node.
struct HyperboloidChart {
  double rho;
  std::array<double, 3> center{};  // patch center in x
  double radius;                   // half-width of the cubical patch
  double h;                        // node spacing

  HyperboloidChart(double rho_, double radius_, double h_,
                   const std::array<double, 3>& center_ = {0.0, 0.0, 0.0});

  // fn(p, w_dVH, w_dsigma); nodes on the cubic lattice centered at `center`.
  void for_each_node(const std::function<void(const SpacetimePoint&, double, double)>& fn) const;

  int nodes_per_axis() const { return n_; }

 private:
  int n_;
};

// Centered-difference derivative of P^pm_{x/t} along coordinate mu at p minus
// the closed form -/+ (gamma_mu + x_mu gamma^H / lambda) / (2 lambda) (indices
// lowered, lambda = sqrt(t^2-|x|^2)); O(h^2) for interior points.
Mat4 projector_derivative_residual(const GammaSet& g, const SpacetimePoint& p, int mu, int sign,
                                   double h);

struct QuadratureResult {
  cplx value{};
  double abs_total{};     // integral of |f| dV_H
  double abs_boundary{};  // same, restricted to the outer two node shells
  bool truncated() const { return abs_boundary > 0.01 * abs_total; }
};

// Integral of f dV_H over the chart patch (set use_dsigma for the dsigma measure).
QuadratureResult hyperboloid_quadrature(
    const HyperboloidChart& chart,
    const std::function<cplx(const SpacetimePoint&)>& f, bool use_dsigma = false);

}  // namespace mdlab
