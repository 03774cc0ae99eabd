#pragma once

#include <limits>
#include <vector>

namespace flock {

/// Radially symmetric, non-negative, non-increasing communication weight
/// psi(r) for r >= 0.  Four families:
///   power_law_plain:    psi(r) = (1 + r)^(-beta)
///   power_law_squared:  psi(r) = (1 + r^2)^(-beta)
///   constant:           psi(r) = c
///   tabulated:          piecewise-linear through (r_k, psi_k) samples,
///                       clamped to the last value beyond the table.
/// The two power-law families are kept distinct on purpose: they coincide
/// only up to reparametrization of beta, and callers reason about decay
/// conditions in the parametrization they chose.
class Kernel {
 public:
  enum class Family { power_law_plain, power_law_squared, constant, tabulated };

  /// beta >= 0 required.
  static Kernel power_law_plain(double beta);
  /// beta >= 0 required.
  static Kernel power_law_squared(double beta);
  /// c > 0 required.
  static Kernel constant(double c);
  /// Samples must start at r = 0, have strictly increasing radii, and
  /// non-increasing non-negative values.
  static Kernel tabulated(std::vector<double> radii, std::vector<double> values);

  Family family() const { return family_; }
  double beta() const;            // power-law families only
  double constant_value() const;  // constant family only
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }

  /// Evaluate psi(r).  r < 0 is a validation error.
  double operator()(double r) const;

  /// True when psi(r) > 0 for every r >= 0 (under the clamped extension for
  /// tabulated kernels).
  bool strictly_positive() const;

 private:
  Kernel() = default;
  Family family_ = Family::constant;
  double beta_ = 0.0;
  double c_ = 1.0;
  std::vector<double> radii_, values_;
};

/// Value of an integral that may be infinite.  finite == false means the
/// integral diverges; value is then +infinity.
struct TailIntegral {
  bool finite = true;
  double value = 0.0;

  static TailIntegral of(double v) { return {true, v}; }
  static TailIntegral divergent() {
    return {false, std::numeric_limits<double>::infinity()};
  }
};

/// integral_{lower}^{infinity} psi(scale * r)^power dr.
///
/// power must be 1 or 2, scale > 0, lower >= 0.  Power-law families use
/// closed forms: the integral is finite iff beta*power > 1 (plain family)
/// resp. 2*beta*power > 1 (squared family).  Constant kernels always
/// diverge.  Tabulated kernels are exact when the last sample is zero and
/// raise IndeterminateTailError otherwise, since the clamped extension
/// cannot bound the tail.
TailIntegral kernel_tail_integral(const Kernel& k, double lower, double scale,
                                  double power);

/// integral_{a}^{b} psi(scale * r)^power dr over a finite interval,
/// 0 <= a <= b.  Exact for plain/constant/tabulated families; adaptive
/// quadrature for the squared family.
double kernel_range_integral(const Kernel& k, double a, double b,
                             double scale = 1.0, double power = 1.0);

}  // namespace flock
