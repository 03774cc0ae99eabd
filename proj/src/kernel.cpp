#include "flock/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flock/errors.hpp"

namespace flock {

namespace {

bool finite(double v) { return std::isfinite(v); }

// base^(-beta) with cheap paths for the exponents that dominate practice.
inline double inv_pow(double base, double beta) {
  if (beta == 0.0) return 1.0;
  if (beta == 1.0) return 1.0 / base;
  if (beta == 2.0) return 1.0 / (base * base);
  if (beta == 0.5) return 1.0 / std::sqrt(base);
  return std::pow(base, -beta);
}

template <class F>
double adapt(const F& f, double a, double fa, double b, double fb, double m,
             double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson over [a, b], split geometrically first so that wide
// integration ranges keep the recursion shallow.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  double lo = a;
  while (lo < b) {
    double hi = std::min(b, lo + std::max(1.0, lo));
    double m = 0.5 * (lo + hi);
    double fa = f(lo), fb = f(hi), fm = f(m);
    double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    double chunk_tol = tol * std::abs(whole) + 1e-306;
    total += adapt(f, lo, fa, hi, fb, m, fm, whole, chunk_tol, 48);
    lo = hi;
  }
  return total;
}

// integral_M^infinity (1 + u^2)^(-q) du for 2q > 1 via the binomial series
// in u^(-2), started far enough out that terms decrease from the first one.
double squared_tail_from(double M, double q) {
  double m0 = std::max({M, 2.0, 2.0 * std::sqrt(q)});
  double series = 0.0;
  double coef = 1.0;                      // (-q choose k) * (-1)^k sign folded in
  double mpow = std::pow(m0, 1.0 - 2.0 * q);
  double m2 = 1.0 / (m0 * m0);
  for (int k = 0; k < 500; ++k) {
    double term = coef * mpow / (2.0 * q + 2.0 * k - 1.0);
    series += term;
    if (std::abs(term) < 1e-17 * std::abs(series)) break;
    coef *= -(q + k) / (k + 1.0);
    mpow *= m2;
  }
  double head = 0.0;
  if (m0 > M) {
    auto f = [q](double u) { return inv_pow(1.0 + u * u, q); };
    head = integrate_adaptive(f, M, m0, 1e-14);
  }
  return head + series;
}

// Exact integral of the piecewise-linear tabulated kernel raised to power p
// over [A, B] on the kernel axis.  Each piece is polynomial of degree <= 2,
// so Simpson per piece is exact.
double tabulated_integral(const std::vector<double>& r,
                          const std::vector<double>& v, double A, double B,
                          double p) {
  auto eval = [&](double u) {
    if (u >= r.back()) return v.back();
    auto it = std::upper_bound(r.begin(), r.end(), u);
    size_t hi = static_cast<size_t>(it - r.begin());
    size_t lo = hi - 1;
    double t = (u - r[lo]) / (r[hi] - r[lo]);
    return v[lo] + t * (v[hi] - v[lo]);
  };
  auto piece = [&](double a, double b) {
    double fa = eval(a), fb = eval(b), fm = eval(0.5 * (a + b));
    if (p == 2.0) {
      fa *= fa;
      fb *= fb;
      fm *= fm;
    }
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  };
  double total = 0.0;
  double lo = A;
  for (size_t k = 1; k < r.size() && lo < B; ++k) {
    if (r[k] <= lo) continue;
    double hi = std::min(B, r[k]);
    total += piece(lo, hi);
    lo = hi;
  }
  if (lo < B) {
    double tailv = (p == 2.0) ? v.back() * v.back() : v.back();
    total += tailv * (B - lo);
  }
  return total;
}

}  // namespace

Kernel Kernel::power_law_plain(double beta) {
  if (!finite(beta) || beta < 0.0)
    throw ValidationError("power_law_plain: beta must be finite and >= 0");
  Kernel k;
  k.family_ = Family::power_law_plain;
  k.beta_ = beta;
  return k;
}

Kernel Kernel::power_law_squared(double beta) {
  if (!finite(beta) || beta < 0.0)
    throw ValidationError("power_law_squared: beta must be finite and >= 0");
  Kernel k;
  k.family_ = Family::power_law_squared;
  k.beta_ = beta;
  return k;
}

Kernel Kernel::constant(double c) {
  if (!finite(c) || c <= 0.0)
    throw ValidationError("constant kernel: value must be finite and > 0");
  Kernel k;
  k.family_ = Family::constant;
  k.c_ = c;
  return k;
}

Kernel Kernel::tabulated(std::vector<double> radii,
                         std::vector<double> values) {
  if (radii.size() != values.size() || radii.size() < 2)
    throw ValidationError("tabulated kernel: need >= 2 samples, equal sizes");
  if (radii.front() != 0.0)
    throw ValidationError("tabulated kernel: first sample must sit at r = 0");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!finite(radii[i]) || !finite(values[i]) || values[i] < 0.0)
      throw ValidationError("tabulated kernel: samples must be finite, >= 0");
    if (i > 0 && radii[i] <= radii[i - 1])
      throw ValidationError("tabulated kernel: radii must strictly increase");
    if (i > 0 && values[i] > values[i - 1])
      throw ValidationError("tabulated kernel: values must be non-increasing");
  }
  Kernel k;
  k.family_ = Family::tabulated;
  k.radii_ = std::move(radii);
  k.values_ = std::move(values);
  return k;
}

double Kernel::beta() const {
  if (family_ != Family::power_law_plain &&
      family_ != Family::power_law_squared)
    throw ValidationError("beta() requires a power-law kernel");
  return beta_;
}

double Kernel::constant_value() const {
  if (family_ != Family::constant)
    throw ValidationError("constant_value() requires a constant kernel");
  return c_;
}

double Kernel::operator()(double r) const {
  if (!finite(r) || r < 0.0)
    throw ValidationError("kernel evaluation requires finite r >= 0, got " +
                          std::to_string(r));
  switch (family_) {
    case Family::power_law_plain:
      return inv_pow(1.0 + r, beta_);
    case Family::power_law_squared:
      return inv_pow(1.0 + r * r, beta_);
    case Family::constant:
      return c_;
    case Family::tabulated: {
      if (r >= radii_.back()) return values_.back();
      auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
      size_t hi = static_cast<size_t>(it - radii_.begin());
      size_t lo = hi - 1;
      double t = (r - radii_[lo]) / (radii_[hi] - radii_[lo]);
      return values_[lo] + t * (values_[hi] - values_[lo]);
    }
  }
  return 0.0;  // unreachable
}

bool Kernel::strictly_positive() const {
  switch (family_) {
    case Family::power_law_plain:
    case Family::power_law_squared:
    case Family::constant:
      return true;
    case Family::tabulated:
      return values_.back() > 0.0;  // values are non-increasing
  }
  return false;
}

namespace {

void check_integral_args(double lower, double scale, double power) {
  if (!finite(lower) || lower < 0.0)
    throw ValidationError("kernel integral: lower bound must be >= 0");
  if (!finite(scale) || scale <= 0.0)
    throw ValidationError("kernel integral: scale must be > 0");
  if (power != 1.0 && power != 2.0)
    throw ValidationError("kernel integral: power must be 1 or 2");
}

}  // namespace

TailIntegral kernel_tail_integral(const Kernel& k, double lower, double scale,
                                  double power) {
  check_integral_args(lower, scale, power);
  double A = lower * scale;  // lower bound on the kernel axis
  switch (k.family()) {
    case Kernel::Family::power_law_plain: {
      double q = k.beta() * power;
      if (q <= 1.0) return TailIntegral::divergent();
      return TailIntegral::of(std::pow(1.0 + A, 1.0 - q) / (scale * (q - 1.0)));
    }
    case Kernel::Family::power_law_squared: {
      double q = k.beta() * power;
      if (2.0 * q <= 1.0) return TailIntegral::divergent();
      return TailIntegral::of(squared_tail_from(A, q) / scale);
    }
    case Kernel::Family::constant:
      return TailIntegral::divergent();
    case Kernel::Family::tabulated: {
      if (k.values().back() > 0.0)
        throw IndeterminateTailError(
            "tabulated kernel tail integral: last sample is positive, tail "
            "cannot be bounded");
      double B = k.radii().back();
      if (A >= B) return TailIntegral::of(0.0);
      return TailIntegral::of(
          tabulated_integral(k.radii(), k.values(), A, B, power) / scale);
    }
  }
  return TailIntegral::divergent();  // unreachable
}

double kernel_range_integral(const Kernel& k, double a, double b, double scale,
                             double power) {
  check_integral_args(a, scale, power);
  if (!finite(b) || b < a)
    throw ValidationError("kernel range integral: need a <= b, finite");
  if (b == a) return 0.0;
  double A = a * scale, B = b * scale;
  switch (k.family()) {
    case Kernel::Family::power_law_plain: {
      double q = k.beta() * power;
      if (q == 1.0) return std::log((1.0 + B) / (1.0 + A)) / scale;
      double p1 = std::pow(1.0 + A, 1.0 - q);
      double p2 = std::pow(1.0 + B, 1.0 - q);
      return (p1 - p2) / (scale * (q - 1.0));
    }
    case Kernel::Family::power_law_squared: {
      double q = k.beta() * power;
      auto f = [q](double u) { return inv_pow(1.0 + u * u, q); };
      return integrate_adaptive(f, A, B, 1e-14) / scale;
    }
    case Kernel::Family::constant: {
      double c = k.constant_value();
      return (power == 2.0 ? c * c : c) * (b - a);
    }
    case Kernel::Family::tabulated:
      return tabulated_integral(k.radii(), k.values(), A, B, power) / scale;
  }
  return 0.0;  // unreachable
}

}  // namespace flock
