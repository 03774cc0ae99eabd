#pragma once

namespace flock {

/// Two agents on a line under the symmetric alignment model with a
/// (1+r)^(-beta) kernel, reduced to the difference variables
///   x = x_2 - x_1 >= 0,  v = v_2 - v_1 >= 0,
/// which obey  dx/dt = v,  dv/dt = -K psi(x) v.  The per-agent coupling
/// K/2 composes to coefficient K on these differences.
struct TwoParticleCase {
  double x0 = 0.0;
  double v0 = 0.0;
  double K = 1.0;
  double beta = 2.0;
};

/// Throws ValidationError unless x0 >= 0, v0 >= 0, K >= 0, all finite.
void validate_case(const TwoParticleCase& c);

/// Separation threshold K * (1+x0)^(1-beta) / (beta - 1): the exact kernel
/// mass K * integral_{x0}^inf (1+s)^(-beta) ds.  Requires beta > 1; the
/// integral diverges otherwise.
double critical_velocity(const TwoParticleCase& c);

struct PositionVelocity {
  double x = 0.0, v = 0.0;
};

/// Exact solution when v0 equals the critical velocity (within 1e-12):
///   x(t) = (beta K t / (beta-1) + (1+x0)^beta)^(1/beta) - 1
///   v(t) = (K / (beta-1)) * (beta K t / (beta-1) + (1+x0)^beta)^(1/beta - 1)
/// The pair separates forever while v decays to zero like t^-(1-1/beta).
PositionVelocity critical_trajectory(const TwoParticleCase& c, double t);

/// v0 - critical_velocity for strictly supercritical data (v0 above the
/// threshold); the persistent velocity gap of the diverging pair.
double asymptotic_velocity(const TwoParticleCase& c);

enum class TwoParticleRegime { subcritical, critical, supercritical };

/// divergent_tail marks beta <= 1, where the kernel mass is infinite and
/// every initial condition is subcritical.
struct TwoParticleClass {
  TwoParticleRegime regime = TwoParticleRegime::subcritical;
  bool divergent_tail = false;
};

/// Compares v0 against the critical velocity with absolute tolerance 1e-12.
TwoParticleClass classify(const TwoParticleCase& c);

}  // namespace flock
