#include "flock/oracle2p.hpp"

#include <cmath>
#include <string>

#include "flock/errors.hpp"

namespace flock {

void validate_case(const TwoParticleCase& c) {
  if (!std::isfinite(c.x0) || c.x0 < 0.0)
    throw ValidationError("two-particle case: x0 must be finite and >= 0");
  if (!std::isfinite(c.v0) || c.v0 < 0.0)
    throw ValidationError("two-particle case: v0 must be finite and >= 0");
  if (!std::isfinite(c.K) || c.K < 0.0)
    throw ValidationError("two-particle case: K must be finite and >= 0");
  if (!std::isfinite(c.beta))
    throw ValidationError("two-particle case: beta must be finite");
}

double critical_velocity(const TwoParticleCase& c) {
  validate_case(c);
  if (c.beta <= 1.0)
    throw ValidationError(
        "critical velocity undefined: kernel mass diverges for beta <= 1");
  return c.K * std::pow(1.0 + c.x0, 1.0 - c.beta) / (c.beta - 1.0);
}

PositionVelocity critical_trajectory(const TwoParticleCase& c, double t) {
  double vc = critical_velocity(c);
  if (std::abs(c.v0 - vc) > 1e-12)
    throw ModelError("case is not critical: v0 = " + std::to_string(c.v0) +
                     ", critical velocity = " + std::to_string(vc));
  if (!std::isfinite(t) || t < 0.0)
    throw ValidationError("critical_trajectory: t must be finite and >= 0");
  if (t == 0.0) return {c.x0, vc};  // avoid the pow round trip
  double a = c.beta * c.K * t / (c.beta - 1.0) + std::pow(1.0 + c.x0, c.beta);
  PositionVelocity out;
  out.x = std::pow(a, 1.0 / c.beta) - 1.0;
  out.v = c.K / (c.beta - 1.0) * std::pow(a, 1.0 / c.beta - 1.0);
  return out;
}

double asymptotic_velocity(const TwoParticleCase& c) {
  double vc = critical_velocity(c);
  if (!(c.v0 > vc))
    throw ValidationError(
        "asymptotic velocity needs supercritical data: v0 = " +
        std::to_string(c.v0) + " <= critical " + std::to_string(vc));
  return c.v0 - vc;
}

TwoParticleClass classify(const TwoParticleCase& c) {
  validate_case(c);
  TwoParticleClass out;
  if (c.beta <= 1.0) {
    out.regime = TwoParticleRegime::subcritical;
    out.divergent_tail = true;
    return out;
  }
  double vc = critical_velocity(c);
  if (std::abs(c.v0 - vc) <= 1e-12)
    out.regime = TwoParticleRegime::critical;
  else if (c.v0 < vc)
    out.regime = TwoParticleRegime::subcritical;
  else
    out.regime = TwoParticleRegime::supercritical;
  return out;
}

}  // namespace flock
