#include "flock/core.hpp"

#include <cmath>
#include <string>

#include "flock/errors.hpp"

namespace flock {

namespace {

double dist2(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

}  // namespace

Ensemble make_ensemble(int dim, std::vector<double> x, std::vector<double> v,
                       std::vector<double> masses, double time) {
  Ensemble e;
  e.dim = dim;
  e.time = time;
  e.x = std::move(x);
  e.v = std::move(v);
  e.m = std::move(masses);
  validate_ensemble(e);
  return e;
}

Ensemble make_ensemble(const std::vector<AgentState>& agents,
                       std::vector<double> masses, double time) {
  if (agents.empty()) throw ValidationError("ensemble: no agents");
  int dim = static_cast<int>(agents[0].x.size());
  std::vector<double> x, v;
  x.reserve(agents.size() * dim);
  v.reserve(agents.size() * dim);
  for (const auto& a : agents) {
    if (static_cast<int>(a.x.size()) != dim ||
        static_cast<int>(a.v.size()) != dim)
      throw ValidationError("ensemble: agents must share one dimension");
    x.insert(x.end(), a.x.begin(), a.x.end());
    v.insert(v.end(), a.v.begin(), a.v.end());
  }
  return make_ensemble(dim, std::move(x), std::move(v), std::move(masses),
                       time);
}

void validate_ensemble(const Ensemble& e) {
  if (e.dim < 1) throw ValidationError("ensemble: dimension must be >= 1");
  if (e.x.empty() || e.x.size() % e.dim != 0)
    throw ValidationError("ensemble: position array size must be N * dim > 0");
  if (e.v.size() != e.x.size())
    throw ValidationError("ensemble: velocity array must match positions");
  if (!std::isfinite(e.time) || e.time < 0.0)
    throw ValidationError("ensemble: time must be finite and >= 0");
  for (double c : e.x)
    if (!std::isfinite(c))
      throw ValidationError("ensemble: non-finite position component");
  for (double c : e.v)
    if (!std::isfinite(c))
      throw ValidationError("ensemble: non-finite velocity component");
  if (!e.m.empty()) {
    if (e.m.size() != e.x.size() / e.dim)
      throw ValidationError("ensemble: need one mass per agent");
    double sum = 0.0;
    for (double w : e.m) {
      if (!std::isfinite(w) || w <= 0.0)
        throw ValidationError("ensemble: masses must be finite and > 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError("ensemble: masses must sum to 1, got " +
                            std::to_string(sum));
  }
}

Diameters diameters(const Ensemble& e) {
  int n = e.size(), d = e.dim;
  Diameters out;
  double dx2 = 0.0, dv2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* xi = e.x.data() + static_cast<size_t>(i) * d;
    const double* vi = e.v.data() + static_cast<size_t>(i) * d;
    for (int j = i + 1; j < n; ++j) {
      double sx = dist2(xi, e.x.data() + static_cast<size_t>(j) * d, d);
      if (sx > dx2) dx2 = sx;
      double sv = dist2(vi, e.v.data() + static_cast<size_t>(j) * d, d);
      if (sv > dv2) dv2 = sv;
    }
  }
  out.Dx = std::sqrt(dx2);
  out.Dv = std::sqrt(dv2);
  return out;
}

SupNorms sup_norms(const Ensemble& e) {
  int n = e.size(), d = e.dim;
  std::vector<double> mx(d, 0.0), mv(d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) {
      mx[k] += e.x[static_cast<size_t>(i) * d + k];
      mv[k] += e.v[static_cast<size_t>(i) * d + k];
    }
  for (int k = 0; k < d; ++k) {
    mx[k] /= n;
    mv[k] /= n;
  }
  SupNorms out;
  double x2 = 0.0, v2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double sx = 0.0, sv = 0.0;
    for (int k = 0; k < d; ++k) {
      double tx = e.x[static_cast<size_t>(i) * d + k] - mx[k];
      double tv = e.v[static_cast<size_t>(i) * d + k] - mv[k];
      sx += tx * tx;
      sv += tv * tv;
    }
    if (sx > x2) x2 = sx;
    if (sv > v2) v2 = sv;
  }
  out.x_sup = std::sqrt(x2);
  out.v_sup = std::sqrt(v2);
  return out;
}

double kinetic_energy(const Ensemble& e) {
  double s = 0.0;
  for (double c : e.v) s += c * c;
  return 0.5 * s;
}

std::vector<double> total_momentum(const Ensemble& e) {
  int n = e.size(), d = e.dim;
  std::vector<double> p(d, 0.0);
  for (int i = 0; i < n; ++i) {
    double w = e.mass(i);
    for (int k = 0; k < d; ++k)
      p[k] += w * e.v[static_cast<size_t>(i) * d + k];
  }
  return p;
}

}  // namespace flock
