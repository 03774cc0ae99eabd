#pragma once

#include <variant>
#include <vector>

#include "flock/core.hpp"
#include "flock/kernel.hpp"
#include "flock/topology.hpp"

namespace flock {

/// Synchronous discrete-time update laws.  Unlike the continuous family
/// the coupling carries no K or 1/N factor: the weights are psi(r) over
/// the influence set, and the step size h alone controls stability.  Every
/// evaluation enforces h * (max row degree) < 1 and reports a
/// StabilityError naming the offending agent otherwise.

struct AllToAll {};

struct Leadership {
  Digraph graph;
};

/// Leader following plus a state-dependent individual preference: agent i
/// adds h * delta_i * q_i, where delta_i averages |v_j - v_i| over its
/// leaders (delta_0 is identically zero).  H > 0 scales the social
/// weights, phi_ij = H * psi(r_ij), trading off against the preference
/// bound nu >= |q_i|.
struct Preference {
  Digraph graph;
  double H = 1.0;
  std::vector<double> q;  // agent-major preferred accelerations
  double nu = 0.0;
};

/// Time-varying topology: the signal picks which graph is active at each
/// step.  Graphs may be rooted at different agents (alternating leaders).
struct Switching {
  std::vector<Digraph> graphs;
  SwitchingSignal signal;
};

struct DtModel {
  double h = 0.1;
  Kernel kernel;
  std::variant<AllToAll, Leadership, Preference, Switching> law;
};

void validate_model(const DtModel& model, const Ensemble& e);

/// One synchronous step: the position and the velocity rule both read the
/// time-t state.  t selects the active graph for Switching and is ignored
/// otherwise.
Ensemble step(const DtModel& model, const Ensemble& e, long t = 0);

/// P_t = I - h L_t over the followers 1..N, acting componentwise on the
/// fluctuations (v_1 - v_0, ..., v_N - v_0).  Requires a graph rooted at
/// agent 0.  strength scales the weights (the preference model's H); the
/// row entries are nonnegative exactly when the stability check passes.
Matrix flocking_matrix(const Ensemble& e, const Digraph& graph, double h,
                       const Kernel& kernel, double strength = 1.0);

/// Iterates step() in place and returns one diagnostics record per state
/// visited (steps + 1 rows, the initial state first).  The observer fires
/// after each step; the switching signal is indexed from this call's
/// start.  A StabilityError mid-run is rethrown tagged with the step.
std::vector<DiagnosticsRecord> simulate(const DtModel& model, Ensemble& e,
                                        long steps,
                                        const StepObserver& observer = {});

}  // namespace flock
