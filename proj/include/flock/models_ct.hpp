#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "flock/core.hpp"
#include "flock/kernel.hpp"

namespace flock {

/// All-to-all alignment, coupling K/N per pair.
struct Symmetric {
  double K = 1.0;
};

/// Alignment normalized by each agent's total kernel weight (self term
/// included), coupling K.
struct MotschTadmor {
  double K = 1.0;
};

/// Alignment (K0) plus radial velocity damping (K1) plus a spring toward
/// pairwise rest distance 2R (K2).  The K1 and K2 terms act along the unit
/// separation vector, which makes the energy functional dissipate exactly.
struct Bonding {
  double K0 = 1.0;
  double K1 = 1.0;
  double K2 = 1.0;
  double R = 1.0;
};

/// Mass-weighted alignment: quadrature particles for a continuum velocity
/// field, coupling K with weights m_j summing to 1.
struct Weighted {
  double K = 1.0;
};

struct CtModel {
  std::variant<Symmetric, MotschTadmor, Bonding, Weighted> law;
  Kernel kernel;
};

/// Time derivative of an ensemble, same flat layout.
struct Derivative {
  std::vector<double> dx, dv;
};

/// dv_i = (K/N) sum_j psi(|x_j - x_i|) (v_j - v_i);  dx_i = v_i.
Derivative rhs_symmetric(const Ensemble& e, double K, const Kernel& psi);

/// dv_i = K * sum_j psi_ij (v_j - v_i) / sum_k psi_ik, self term included
/// in the denominator.  Throws ModelError on a vanishing denominator.
Derivative rhs_motsch_tadmor(const Ensemble& e, double K, const Kernel& psi);

/// dv_i = (K0/N) sum_j psi(r_ij) (v_j - v_i)
///      + (K1/N) sum_j (<v_j - v_i, x_j - x_i> / r_ij^2) (x_j - x_i)
///      + (K2/N) sum_j ((r_ij - 2R) / r_ij) (x_j - x_i).
/// Pairs closer than 1e-10 raise CollisionError when K1 or K2 is active.
Derivative rhs_bonding(const Ensemble& e, double K0, double K1, double K2,
                       double R, const Kernel& psi);

/// dv_i = K sum_j m_j psi(|x_j - x_i|) (v_j - v_i); needs masses.
Derivative rhs_weighted(const Ensemble& e, double K, const Kernel& psi);

/// Dispatch on the model variant.
Derivative rhs(const CtModel& model, const Ensemble& e);

/// Throws ValidationError when the coupling constants are invalid or the
/// ensemble lacks what the variant needs (masses for Weighted).
void validate_model(const CtModel& model, const Ensemble& e);

/// Scalar diagnostics of the current state.  The Lyapunov pair is filled
/// for the Symmetric variant, potential energy for Bonding; other fields
/// of inapplicable variants stay zero.
DiagnosticsRecord diagnose(const CtModel& model, const Ensemble& e);

/// Classical fixed-step 4-stage Runge-Kutta.  Advances e in place by
/// `steps` steps of size h; the observer (when set) runs after every
/// accepted step.  Model errors rethrow tagged with the offending step.
void integrate(const CtModel& model, Ensemble& e, double h, long steps,
               const StepObserver& observer = {});

/// 1e-2 * min(1, 1/K_total) with K_total the largest coupling constant:
/// small enough for desk-scale accuracy across the model family.
double default_step(const CtModel& model);

}  // namespace flock
