#include "flock/models_ct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flock/analysis.hpp"
#include "flock/errors.hpp"

namespace flock {

namespace {

void require_coupling(double K, const char* name) {
  if (!(K >= 0.0) || !std::isfinite(K))
    throw ValidationError(std::string(name) +
                          " must be a finite coupling >= 0");
}

// squared distance and the difference vectors of one ordered pair (i, j)
struct PairGeometry {
  double r = 0.0;
  double dot_vx = 0.0;  // <v_j - v_i, x_j - x_i>
};

PairGeometry pair_geometry(const Ensemble& e, int i, int j) {
  PairGeometry g;
  double dx2 = 0.0;
  for (int k = 0; k < e.dim; ++k) {
    double dxk = e.x[static_cast<size_t>(j) * e.dim + k] -
                 e.x[static_cast<size_t>(i) * e.dim + k];
    double dvk = e.v[static_cast<size_t>(j) * e.dim + k] -
                 e.v[static_cast<size_t>(i) * e.dim + k];
    dx2 += dxk * dxk;
    g.dot_vx += dvk * dxk;
  }
  g.r = std::sqrt(dx2);
  return g;
}

Derivative blank_derivative(const Ensemble& e) {
  Derivative d;
  d.dx = e.v;  // dx_i = v_i for every model in the family
  d.dv.assign(e.v.size(), 0.0);
  return d;
}

// dv_i += w * (v_j - v_i), dv_j -= the same: exact pairwise antisymmetry
void add_alignment_pair(Derivative& d, const Ensemble& e, int i, int j,
                        double wi, double wj) {
  for (int k = 0; k < e.dim; ++k) {
    double dvk = e.v[static_cast<size_t>(j) * e.dim + k] -
                 e.v[static_cast<size_t>(i) * e.dim + k];
    d.dv[static_cast<size_t>(i) * e.dim + k] += wi * dvk;
    d.dv[static_cast<size_t>(j) * e.dim + k] -= wj * dvk;
  }
}

void add_radial_pair(Derivative& d, const Ensemble& e, int i, int j,
                     double coeff) {
  for (int k = 0; k < e.dim; ++k) {
    double dxk = e.x[static_cast<size_t>(j) * e.dim + k] -
                 e.x[static_cast<size_t>(i) * e.dim + k];
    d.dv[static_cast<size_t>(i) * e.dim + k] += coeff * dxk;
    d.dv[static_cast<size_t>(j) * e.dim + k] -= coeff * dxk;
  }
}

}  // namespace

Derivative rhs_symmetric(const Ensemble& e, double K, const Kernel& psi) {
  require_coupling(K, "symmetric model: K");
  int n = e.size();
  Derivative d = blank_derivative(e);
  double scale = K / n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double w = scale * psi(pair_geometry(e, i, j).r);
      add_alignment_pair(d, e, i, j, w, w);
    }
  return d;
}

Derivative rhs_motsch_tadmor(const Ensemble& e, double K, const Kernel& psi) {
  require_coupling(K, "normalized model: K");
  int n = e.size();
  double self = psi(0.0);
  std::vector<double> weight(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> denom(static_cast<size_t>(n), self);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double w = psi(pair_geometry(e, i, j).r);
      weight[static_cast<size_t>(i) * n + j] = w;
      weight[static_cast<size_t>(j) * n + i] = w;
      denom[static_cast<size_t>(i)] += w;
      denom[static_cast<size_t>(j)] += w;
    }
  Derivative d = blank_derivative(e);
  for (int i = 0; i < n; ++i) {
    if (!(denom[static_cast<size_t>(i)] > 0.0))
      throw ModelError("normalized model: singular weights, agent " +
                       std::to_string(i) + " sees total kernel mass 0");
    double scale = K / denom[static_cast<size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double w = scale * weight[static_cast<size_t>(i) * n + j];
      for (int k = 0; k < e.dim; ++k)
        d.dv[static_cast<size_t>(i) * e.dim + k] +=
            w * (e.v[static_cast<size_t>(j) * e.dim + k] -
                 e.v[static_cast<size_t>(i) * e.dim + k]);
    }
  }
  return d;
}

Derivative rhs_bonding(const Ensemble& e, double K0, double K1, double K2,
                       double R, const Kernel& psi) {
  require_coupling(K0, "bonding model: K0");
  require_coupling(K1, "bonding model: K1");
  require_coupling(K2, "bonding model: K2");
  if (!(R > 0.0) || !std::isfinite(R))
    throw ValidationError("bonding model: R must be finite and > 0");
  int n = e.size();
  Derivative d = blank_derivative(e);
  bool radial_active = K1 > 0.0 || K2 > 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      PairGeometry g = pair_geometry(e, i, j);
      if (radial_active && g.r < 1e-10) throw CollisionError(i, j, g.r);
      if (K0 > 0.0) {
        double w = K0 / n * psi(g.r);
        add_alignment_pair(d, e, i, j, w, w);
      }
      double coeff = 0.0;
      if (K1 > 0.0) coeff += K1 / n * g.dot_vx / (g.r * g.r);
      if (K2 > 0.0) coeff += K2 / n * (g.r - 2.0 * R) / g.r;
      if (coeff != 0.0) add_radial_pair(d, e, i, j, coeff);
    }
  return d;
}

Derivative rhs_weighted(const Ensemble& e, double K, const Kernel& psi) {
  require_coupling(K, "weighted model: K");
  if (!e.has_masses())
    throw ValidationError("weighted model: ensemble must carry masses");
  int n = e.size();
  Derivative d = blank_derivative(e);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double w = K * psi(pair_geometry(e, i, j).r);
      add_alignment_pair(d, e, i, j, w * e.m[static_cast<size_t>(j)],
                         w * e.m[static_cast<size_t>(i)]);
    }
  return d;
}

Derivative rhs(const CtModel& model, const Ensemble& e) {
  return std::visit(
      [&](const auto& law) -> Derivative {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, Symmetric>)
          return rhs_symmetric(e, law.K, model.kernel);
        else if constexpr (std::is_same_v<L, MotschTadmor>)
          return rhs_motsch_tadmor(e, law.K, model.kernel);
        else if constexpr (std::is_same_v<L, Bonding>)
          return rhs_bonding(e, law.K0, law.K1, law.K2, law.R, model.kernel);
        else
          return rhs_weighted(e, law.K, model.kernel);
      },
      model.law);
}

void validate_model(const CtModel& model, const Ensemble& e) {
  validate_ensemble(e);
  std::visit(
      [&](const auto& law) {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, Symmetric>)
          require_coupling(law.K, "symmetric model: K");
        else if constexpr (std::is_same_v<L, MotschTadmor>)
          require_coupling(law.K, "normalized model: K");
        else if constexpr (std::is_same_v<L, Bonding>) {
          require_coupling(law.K0, "bonding model: K0");
          require_coupling(law.K1, "bonding model: K1");
          require_coupling(law.K2, "bonding model: K2");
          if (!(law.R > 0.0) || !std::isfinite(law.R))
            throw ValidationError("bonding model: R must be finite and > 0");
        } else {
          require_coupling(law.K, "weighted model: K");
          if (!e.has_masses())
            throw ValidationError("weighted model: ensemble must carry masses");
        }
      },
      model.law);
}

DiagnosticsRecord diagnose(const CtModel& model, const Ensemble& e) {
  DiagnosticsRecord rec;
  rec.time = e.time;
  auto d = diameters(e);
  rec.Dx = d.Dx;
  rec.Dv = d.Dv;
  auto s = sup_norms(e);
  rec.x_sup = s.x_sup;
  rec.v_sup = s.v_sup;
  rec.kinetic_energy = kinetic_energy(e);
  if (const auto* sym = std::get_if<Symmetric>(&model.law)) {
    auto [lp, lm] = lyapunov_pm(e, sym->K, model.kernel);
    rec.lyapunov_plus = lp;
    rec.lyapunov_minus = lm;
  } else if (const auto* bond = std::get_if<Bonding>(&model.law)) {
    rec.potential_energy = energy(e, bond->K2, bond->R).potential;
  }
  return rec;
}

void integrate(const CtModel& model, Ensemble& e, double h, long steps,
               const StepObserver& observer) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw ValidationError("integrate: step size must be finite and > 0");
  if (steps < 0) throw ValidationError("integrate: negative step count");
  validate_model(model, e);

  size_t m = e.x.size();
  double t0 = e.time;
  Ensemble stage = e;
  auto advance = [&](const Ensemble& base, const Derivative& k, double dt) {
    for (size_t c = 0; c < m; ++c) {
      stage.x[c] = base.x[c] + dt * k.dx[c];
      stage.v[c] = base.v[c] + dt * k.dv[c];
    }
  };

  for (long s = 0; s < steps; ++s) {
    try {
      Derivative k1 = rhs(model, e);
      advance(e, k1, 0.5 * h);
      Derivative k2 = rhs(model, stage);
      advance(e, k2, 0.5 * h);
      Derivative k3 = rhs(model, stage);
      advance(e, k3, h);
      Derivative k4 = rhs(model, stage);
      for (size_t c = 0; c < m; ++c) {
        e.x[c] += h / 6.0 *
                  (k1.dx[c] + 2.0 * k2.dx[c] + 2.0 * k3.dx[c] + k4.dx[c]);
        e.v[c] += h / 6.0 *
                  (k1.dv[c] + 2.0 * k2.dv[c] + 2.0 * k3.dv[c] + k4.dv[c]);
      }
    } catch (const CollisionError& err) {
      throw CollisionError(err.i(), err.j(), err.distance(), s);
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& err) {
      throw ModelError("step " + std::to_string(s) + ": " + err.what());
    }
    e.time = t0 + static_cast<double>(s + 1) * h;
    if (observer) observer(e, diagnose(model, e));
  }
}

double default_step(const CtModel& model) {
  double k_total = std::visit(
      [](const auto& law) {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, Bonding>)
          return std::max({law.K0, law.K1, law.K2});
        else
          return law.K;
      },
      model.law);
  return 1e-2 * std::min(1.0, 1.0 / std::max(k_total, 1e-300));
}

}  // namespace flock
