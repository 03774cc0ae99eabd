#include "flock/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flock/errors.hpp"

namespace flock {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pair_distance(const Ensemble& e, int i, int j) {
  double s = 0.0;
  for (int k = 0; k < e.dim; ++k) {
    double d = e.x[static_cast<size_t>(j) * e.dim + k] -
               e.x[static_cast<size_t>(i) * e.dim + k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Solves (K/2) * integral_{a}^{x} psi(2r) dr = target for x >= a by
// doubling then bisection.  target >= 0; the caller guarantees the full
// tail budget exceeds target so a finite solution exists.
double lyapunov_radius(const Kernel& psi, double K, double a, double target) {
  if (target == 0.0) return a;
  auto budget = [&](double x) {
    return 0.5 * K * kernel_range_integral(psi, a, x, 2.0, 1.0) - target;
  };
  double hi = std::max(2.0 * a, a + 1.0);
  for (int it = 0; it < 4000 && budget(hi) < 0.0; ++it) hi = 2.0 * hi;
  double lo = a;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (budget(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Least-squares slope of y against t; r2 = 1 when the data are constant.
struct LineFit {
  double slope = 0.0;
  double r2 = 1.0;
};
LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  size_t n = t.size();
  double tm = 0.0, ym = 0.0;
  for (size_t k = 0; k < n; ++k) {
    tm += t[k];
    ym += y[k];
  }
  tm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (size_t k = 0; k < n; ++k) {
    stt += (t[k] - tm) * (t[k] - tm);
    sty += (t[k] - tm) * (y[k] - ym);
    syy += (y[k] - ym) * (y[k] - ym);
  }
  if (stt == 0.0)
    throw ValidationError("decay fit: all sample times coincide");
  LineFit out;
  out.slope = sty / stt;
  double ss_res = syy - out.slope * sty;
  out.r2 = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  return out;
}

}  // namespace

std::string report_text(const std::string& name, const ConditionReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "check=" << name << "\n";
  os << "holds=" << (r.holds ? "true" : "false") << "\n";
  os << "measured=" << r.measured << "\n";
  os << "threshold=" << r.threshold << "\n";
  for (const auto& [key, value] : r.extras) os << key << "=" << value << "\n";
  return os.str();
}

ConditionReport check_symmetric(const Ensemble& e0, double K,
                                const Kernel& psi) {
  validate_ensemble(e0);
  if (!(K >= 0.0) || !std::isfinite(K))
    throw ValidationError("check_symmetric: K must be finite and >= 0");
  auto s = sup_norms(e0);
  if (s.x_sup == 0.0)
    throw ValidationError(
        "check_symmetric: degenerate input, |x0|_inf must be positive");
  ConditionReport r;
  r.measured = s.v_sup;
  TailIntegral tail = kernel_tail_integral(psi, s.x_sup, 2.0, 1.0);
  r.threshold = tail.finite ? 0.5 * K * tail.value : kInf;
  r.holds = r.measured < r.threshold;
  r.extras["K_star"] = tail.finite ? 2.0 * s.v_sup / tail.value : 0.0;
  if (r.holds && K > 0.0) {
    double xm = lyapunov_radius(psi, K, s.x_sup, s.v_sup);
    r.extras["x_M"] = xm;
    r.extras["decay_rate_bound"] = psi(2.0 * xm);
  }
  return r;
}

ConditionReport check_motsch_tadmor(const Ensemble& e0, const Kernel& psi) {
  validate_ensemble(e0);
  if (!psi.strictly_positive())
    throw ValidationError(
        "check_motsch_tadmor: kernel must be strictly positive");
  auto d = diameters(e0);
  ConditionReport r;
  r.measured = d.Dv;
  TailIntegral tail = kernel_tail_integral(psi, d.Dx, 1.0, 2.0);
  r.threshold = tail.finite ? tail.value : kInf;
  r.holds = r.measured < r.threshold;
  return r;
}

ConditionReport check_bonding(const Ensemble& e0, double K2, double R,
                              const Kernel& psi) {
  validate_ensemble(e0);
  if (!(K2 > 0.0) || !std::isfinite(K2))
    throw ValidationError("check_bonding: K2 must be finite and > 0");
  if (!(R > 0.0) || !std::isfinite(R))
    throw ValidationError("check_bonding: R must be finite and > 0");
  // zero-mean frame: kinetic energy is frame-dependent
  Ensemble z = e0;
  int n = z.size();
  for (int k = 0; k < z.dim; ++k) {
    double mx = 0.0, mv = 0.0;
    for (int i = 0; i < n; ++i) {
      mx += z.x[static_cast<size_t>(i) * z.dim + k];
      mv += z.v[static_cast<size_t>(i) * z.dim + k];
    }
    mx /= n;
    mv /= n;
    for (int i = 0; i < n; ++i) {
      z.x[static_cast<size_t>(i) * z.dim + k] -= mx;
      z.v[static_cast<size_t>(i) * z.dim + k] -= mv;
    }
  }
  EnergyPair en = energy(z, K2, R);
  double e_total = en.kinetic + en.potential;
  ConditionReport r;
  r.measured = e_total;
  r.threshold = K2 * R * R * n;
  double radius = 2.0 * R + std::sqrt(2.0 * n * e_total / K2);
  double psi_m = psi(radius);  // kernel non-increasing: min sits at the edge
  r.extras["psi_m"] = psi_m;
  r.extras["confinement_radius"] = radius;
  r.holds = r.measured < r.threshold && psi_m > 0.0;
  return r;
}

ConditionReport check_hydro(const Ensemble& e0, const Kernel& psi) {
  validate_ensemble(e0);
  if (!e0.has_masses())
    throw ValidationError("check_hydro: ensemble must carry masses");
  auto d = diameters(e0);
  ConditionReport r;
  r.measured = d.Dv;
  TailIntegral tail = kernel_tail_integral(psi, d.Dx, 1.0, 1.0);
  r.threshold = tail.finite ? tail.value : kInf;
  r.holds = r.measured < r.threshold;
  return r;
}

std::pair<double, double> lyapunov_pm(const Ensemble& e, double K,
                                      const Kernel& psi) {
  auto s = sup_norms(e);
  double mass = 0.5 * K * kernel_range_integral(psi, 0.0, 2.0 * s.x_sup);
  return {s.v_sup + mass, s.v_sup - mass};
}

EnergyPair energy(const Ensemble& e, double K2, double R) {
  EnergyPair out;
  out.kinetic = kinetic_energy(e);
  int n = e.size();
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double gap = pair_distance(e, i, j) - 2.0 * R;
      sum += gap * gap;
    }
  out.potential = K2 / (4.0 * n) * 2.0 * sum;  // ordered pairs count twice
  return out;
}

double energy_production(const Ensemble& e, double K0, double K1,
                         const Kernel& psi) {
  int n = e.size();
  double align = 0.0, radial = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double dv2 = 0.0, dot = 0.0, dx2 = 0.0;
      for (int k = 0; k < e.dim; ++k) {
        double dxk = e.x[static_cast<size_t>(j) * e.dim + k] -
                     e.x[static_cast<size_t>(i) * e.dim + k];
        double dvk = e.v[static_cast<size_t>(j) * e.dim + k] -
                     e.v[static_cast<size_t>(i) * e.dim + k];
        dv2 += dvk * dvk;
        dot += dvk * dxk;
        dx2 += dxk * dxk;
      }
      double r = std::sqrt(dx2);
      if (K0 > 0.0) align += psi(r) * dv2;
      if (K1 > 0.0) {
        if (r < 1e-10) throw CollisionError(i, j, r);
        radial += dot * dot / dx2;
      }
    }
  // ordered pairs count twice
  return (K0 * align + K1 * radial) / n;
}

DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& series,
                        int window) {
  if (window < 2)
    throw ValidationError("decay fit: window must hold at least 2 samples");
  if (static_cast<size_t>(window) > series.size())
    throw ValidationError("decay fit: window exceeds the series length");
  std::vector<double> t, y;
  for (size_t k = series.size() - static_cast<size_t>(window);
       k < series.size(); ++k) {
    if (!(series[k].second > 0.0))
      throw ValidationError(
          "decay fit: non-positive Dv inside the fit window");
    t.push_back(series[k].first);
    y.push_back(std::log(series[k].second));
  }
  LineFit f = fit_line(t, y);
  return {-f.slope, f.r2};
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::flocking: return "Flocking";
    case Outcome::dispersing: return "Dispersing";
    default: return "Undetermined";
  }
}

OutcomeLabel classify_outcome(const std::vector<DiagnosticsRecord>& traj,
                              double tol, double growth_factor) {
  OutcomeLabel out;
  if (traj.size() < 10) return out;
  out.final_Dv = traj.back().Dv;
  std::vector<double> t, dx;
  for (size_t k = traj.size() / 2; k < traj.size(); ++k) {
    t.push_back(traj[k].time);
    dx.push_back(traj[k].Dx);
  }
  out.dx_growth_rate = fit_line(t, dx).slope;
  double initial_Dv = traj.front().Dv;
  double growth_budget = growth_factor * initial_Dv;
  if (out.final_Dv < tol && out.dx_growth_rate <= growth_budget)
    out.outcome = Outcome::flocking;
  else if (out.final_Dv >= std::max(tol, 0.01 * initial_Dv) &&
           out.dx_growth_rate > growth_budget)
    out.outcome = Outcome::dispersing;
  return out;
}

}  // namespace flock
