#pragma once

#include <functional>
#include <span>
#include <vector>

namespace flock {

/// One agent: position and velocity of equal dimension.
struct AgentState {
  std::vector<double> x, v;
};

/// Finite particle ensemble in phase space, stored flat (agent-major).
/// Masses are optional; when absent every agent weighs 1/N.  When present
/// they must be positive and sum to 1 within 1e-12.  Treat instances as
/// values: library operations never mutate their inputs.
struct Ensemble {
  int dim = 0;
  double time = 0.0;
  std::vector<double> x;  // size N * dim
  std::vector<double> v;  // size N * dim
  std::vector<double> m;  // empty, or size N

  int size() const { return dim > 0 ? static_cast<int>(x.size()) / dim : 0; }
  bool has_masses() const { return !m.empty(); }
  double mass(int i) const { return m.empty() ? 1.0 / size() : m[i]; }
  std::span<const double> pos(int i) const {
    return {x.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
  }
  std::span<const double> vel(int i) const {
    return {v.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
  }
};

/// Build and validate an ensemble from flat coordinate arrays.
Ensemble make_ensemble(int dim, std::vector<double> x, std::vector<double> v,
                       std::vector<double> masses = {}, double time = 0.0);

/// Build and validate an ensemble from per-agent states.
Ensemble make_ensemble(const std::vector<AgentState>& agents,
                       std::vector<double> masses = {}, double time = 0.0);

/// Throws ValidationError when the ensemble violates its invariants
/// (inconsistent sizes, non-finite entries, bad masses, negative time).
void validate_ensemble(const Ensemble& e);

/// Position and velocity diameters: max over agent pairs of the Euclidean
/// distance.  Zero for a single agent.
struct Diameters {
  double Dx = 0.0, Dv = 0.0;
};
Diameters diameters(const Ensemble& e);

/// Max Euclidean agent norm after shifting positions and velocities by
/// their arithmetic means.
struct SupNorms {
  double x_sup = 0.0, v_sup = 0.0;
};
SupNorms sup_norms(const Ensemble& e);

/// Per-step scalar diagnostics shared by every model family.  Fields that a
/// model does not define are zero: potential_energy outside the bonding
/// model, the Lyapunov pair outside the symmetric continuous model.
struct DiagnosticsRecord {
  double time = 0.0;
  double Dx = 0.0, Dv = 0.0;
  double x_sup = 0.0, v_sup = 0.0;
  double kinetic_energy = 0.0;
  double potential_energy = 0.0;
  double lyapunov_plus = 0.0, lyapunov_minus = 0.0;
};

/// Callback invoked after every completed step with the new state and its
/// diagnostics.  An empty target disables the callback.
using StepObserver =
    std::function<void(const Ensemble&, const DiagnosticsRecord&)>;

/// 0.5 * sum_i |v_i|^2 in the frame of the stored velocities.
double kinetic_energy(const Ensemble& e);

/// Mass-weighted total momentum, one component per dimension.
std::vector<double> total_momentum(const Ensemble& e);

}  // namespace flock
