#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flock/core.hpp"
#include "flock/kernel.hpp"

namespace flock {

/// Result of a sufficient-condition check.  holds is the strict inequality
/// measured < threshold (conjoined with kernel positivity where a theorem
/// demands it).  threshold is +infinity when the relevant kernel integral
/// diverges, making the condition vacuously true.  extras carries named
/// scalars specific to each checker (K_star, x_M, decay_rate_bound, psi_m,
/// confinement_radius).
struct ConditionReport {
  bool holds = false;
  double threshold = 0.0;
  double measured = 0.0;
  std::map<std::string, double> extras;
};

/// Flat key=value text block, one line per field, for report files.
std::string report_text(const std::string& name, const ConditionReport& r);

/// Symmetric-model flocking condition on initial data:
///   |v0|_inf < (K/2) * integral_{|x0|_inf}^inf psi(2r) dr.
/// extras: K_star (smallest coupling making the condition hold), and when
/// the condition holds also x_M (radius exhausting the Lyapunov budget,
/// solving (K/2) int_{|x0|_inf}^{x_M} psi(2r) dr = |v0|_inf) and
/// decay_rate_bound = psi(2 x_M).  Requires |x0|_inf > 0.
ConditionReport check_symmetric(const Ensemble& e0, double K,
                                const Kernel& psi);

/// Normalized-model flocking condition:
///   D(v0) < integral_{D(x0)}^inf psi(r)^2 dr.
/// Requires a strictly positive kernel.
ConditionReport check_motsch_tadmor(const Ensemble& e0, const Kernel& psi);

/// Bonding-model hypotheses, evaluated in the zero-mean frame:
///   E(0) < K2 R^2 N  and  psi_m := psi(2R + sqrt(2 N E(0) / K2)) > 0.
/// extras: psi_m, confinement_radius.
ConditionReport check_bonding(const Ensemble& e0, double K2, double R,
                              const Kernel& psi);

/// Mass-weighted surrogate condition on the particle support:
///   D(v0) < integral_{D(x0)}^inf psi(r) dr.
/// Requires masses.
ConditionReport check_hydro(const Ensemble& e0, const Kernel& psi);

/// Lyapunov pair for the symmetric model:
///   L_pm = |v|_inf +- (K/2) * integral_0^{2|x|_inf} psi(s) ds.
/// Both are non-increasing along symmetric-model trajectories.
std::pair<double, double> lyapunov_pm(const Ensemble& e, double K,
                                      const Kernel& psi);

/// Bonding-model energy: kinetic = 0.5 sum_i |v_i|^2 (frame-dependent;
/// use the zero-mean frame for dissipation statements), potential =
/// (K2 / 4N) sum_{i != j} (|x_j - x_i| - 2R)^2.
struct EnergyPair {
  double kinetic = 0.0, potential = 0.0;
};
EnergyPair energy(const Ensemble& e, double K2, double R);

/// Instantaneous energy production rate
///   P = (K0/2N) sum_{i != j} psi(r_ij) |v_j - v_i|^2
///     + (K1/2N) sum_{i != j} (d/dt r_ij)^2,
/// with d/dt r_ij = <v_j - v_i, x_j - x_i> / r_ij.  Always >= 0; the
/// bonding energy obeys dE/dt = -P.  Throws CollisionError when K1 > 0 and
/// two agents (nearly) coincide.
double energy_production(const Ensemble& e, double K0, double K1,
                         const Kernel& psi);

/// Least-squares slope of log Dv against t over the trailing `window`
/// samples of the series: rate is the decay exponent (positive for decay),
/// r_squared the fit quality (1 for a perfect or constant fit).
struct DecayFit {
  double rate = 0.0;
  double r_squared = 0.0;
};
DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& series,
                        int window);

enum class Outcome { flocking, dispersing, undetermined };

struct OutcomeLabel {
  Outcome outcome = Outcome::undetermined;
  double final_Dv = 0.0;
  double dx_growth_rate = 0.0;  // slope of Dx over the trailing half
};

const char* outcome_name(Outcome o);

/// Flocking: final Dv < tol and the trailing-half Dx slope stays below
/// growth_factor * initial Dv.  Dispersing: Dv stays bounded away from zero
/// while Dx keeps growing.  Fewer than 10 samples: undetermined.
OutcomeLabel classify_outcome(const std::vector<DiagnosticsRecord>& traj,
                              double tol = 1e-6,
                              double growth_factor = 1e-3);

}  // namespace flock
