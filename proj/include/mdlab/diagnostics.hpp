#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mdlab/evolution.hpp"
#include "mdlab/gamma.hpp"
#include "mdlab/geometry.hpp"

namespace mdlab {

struct DiagSample {
  double t = 0.0;
  double charge = 0.0;
  double psi_l2 = 0.0;
  double a_hhalf = 0.0;      // ||A||_{Hdot 1/2} over the four components
  double adot_hmhalf = 0.0;  // ||Adot||_{Hdot -1/2}
  double lorenz = 0.0;
};

// Per-(time, region-bin) sup norms. psi splits by the radial projectors
// (I +- g0 g^theta)/2, theta = x/|x| (origin cell skipped). a is the
// four-component Euclidean magnitude; ta is |(d_t + d_r) A| (outgoing
// tangential derivative), filled only when requested.
struct RegionSample {
  double t = 0.0;
  RegionKind kind = RegionKind::CT_ext;
  double S = 0.0;
  double sup_psi = 0.0;
  double sup_psi_plus = 0.0;
  double sup_psi_minus = 0.0;
  double sup_a = 0.0;
  double sup_ta = 0.0;
};

struct DiagnosticsRecord {
  std::vector<DiagSample> rows;
  std::vector<RegionSample> region_rows;

  // diagnostics.csv: t,charge,psi_l2,a_hhalf,adot_hmhalf,lorenz
  // regions.csv: t,kind,S,sup_psi,sup_psi_plus,sup_psi_minus,sup_a,sup_ta
  // (kind encoded as the RegionKind enum value)
  void write_csv(const std::string& dir) const;
};

DiagSample measure_state(const SpectralGrid& sg, const FieldState& s);

// Classifies every grid point with region_classify(T, .) at the state's time
// and records per-bin sups. with_derivatives adds the sup_ta column.
std::vector<RegionSample> measure_regions(const SpectralGrid& sg, const FieldState& s, double T,
                                          bool with_derivatives = false);

const RegionSample* find_region(const std::vector<RegionSample>& rows, double t, RegionKind kind,
                                double S);

struct DecayFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  int samples = 0;
};

// Least-squares slope of log(y) vs log(t). Requires >= 5 positive samples
// spanning a factor >= 4 in t; throws otherwise.
DecayFit decay_probe(const std::vector<double>& t, const std::vector<double>& y);

enum class DecayField { psi, psi_plus, psi_minus, a, ta };

// Collects the (t, sup) series of one field in one region bin and fits it.
DecayFit decay_probe(const std::vector<RegionSample>& rows, RegionKind kind, double S,
                     DecayField field);

// Truncated-hyperboloid energy, computed two ways that agree pointwise:
//   flux form:    sum (|psi|^2 - x.J/t) h^3           (normal flux through H)
//   H-norm form:  sum ||psi||_H^2 rho^3 dV_H
// max_rel_gap is the worst pointwise relative disagreement between the two
// integrands (identity check; should sit at roundoff).
struct HyperboloidEnergy {
  double flux_form = 0.0;
  double hnorm_form = 0.0;
  double max_rel_gap = 0.0;
};

HyperboloidEnergy hyperboloid_energy(const GammaSet& G, const HyperboloidChart& chart,
                                     const std::function<Spinor(const SpacetimePoint&)>& at);

// Flat-top remainder: sum of |psi|^2 h^3 over grid points with |x| >= R.
double charge_outside(const GridSpec& g, const std::array<CField, 4>& psi, double R);

}  // namespace mdlab
