#include "flock/models_dt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flock/errors.hpp"

namespace flock {

namespace {

double pair_distance(const Ensemble& e, int i, int j) {
  double s = 0.0;
  for (int k = 0; k < e.dim; ++k) {
    double d = e.x[static_cast<size_t>(j) * e.dim + k] -
               e.x[static_cast<size_t>(i) * e.dim + k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Influence structure active at step t: null graph means all-to-all.
struct Stencil {
  const Digraph* graph = nullptr;
  double strength = 1.0;
  const Preference* pref = nullptr;
};

Stencil resolve(const DtModel& model, long t) {
  Stencil s;
  if (const auto* lead = std::get_if<Leadership>(&model.law)) {
    s.graph = &lead->graph;
  } else if (const auto* pref = std::get_if<Preference>(&model.law)) {
    s.graph = &pref->graph;
    s.strength = pref->H;
    s.pref = pref;
  } else if (const auto* sw = std::get_if<Switching>(&model.law)) {
    int idx = sw->signal.at(t);
    if (idx >= static_cast<int>(sw->graphs.size()))
      throw ValidationError("switching signal names graph " +
                            std::to_string(idx) + " but only " +
                            std::to_string(sw->graphs.size()) +
                            " graphs are loaded");
    s.graph = &sw->graphs[static_cast<size_t>(idx)];
  }
  return s;
}

DiagnosticsRecord dt_diagnose(const Ensemble& e) {
  DiagnosticsRecord rec;
  rec.time = e.time;
  auto d = diameters(e);
  rec.Dx = d.Dx;
  rec.Dv = d.Dv;
  auto s = sup_norms(e);
  rec.x_sup = s.x_sup;
  rec.v_sup = s.v_sup;
  rec.kinetic_energy = kinetic_energy(e);
  return rec;
}

}  // namespace

void validate_model(const DtModel& model, const Ensemble& e) {
  validate_ensemble(e);
  if (!(model.h > 0.0) || !std::isfinite(model.h))
    throw ValidationError("discrete model: h must be finite and > 0");
  int n = e.size();
  auto require_order = [n](const Digraph& g, const char* name) {
    if (g.vertex_count() != n)
      throw ValidationError(std::string(name) + " graph has " +
                            std::to_string(g.vertex_count()) +
                            " vertices for a flock of " + std::to_string(n));
  };
  std::visit(
      [&](const auto& law) {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, Leadership>) {
          require_order(law.graph, "leadership");
        } else if constexpr (std::is_same_v<L, Preference>) {
          require_order(law.graph, "preference");
          if (!(law.H > 0.0) || !std::isfinite(law.H))
            throw ValidationError(
                "preference model: H must be finite and > 0");
          if (!(law.nu >= 0.0) || !std::isfinite(law.nu))
            throw ValidationError(
                "preference model: nu must be finite and >= 0");
          if (law.q.size() != e.x.size())
            throw ValidationError(
                "preference model: q needs one R^d row per agent");
          for (int i = 0; i < n; ++i) {
            double norm2 = 0.0;
            for (int k = 0; k < e.dim; ++k) {
              double c = law.q[static_cast<size_t>(i) * e.dim + k];
              if (!std::isfinite(c))
                throw ValidationError(
                    "preference model: q has a non-finite entry");
              norm2 += c * c;
            }
            if (std::sqrt(norm2) > law.nu)
              throw ValidationError("preference model: |q_" +
                                    std::to_string(i) +
                                    "| exceeds the bound nu");
            if (i > 0 && law.graph.leaders(i).empty())
              throw ValidationError("preference model: agent " +
                                    std::to_string(i) + " has no leaders");
          }
        } else if constexpr (std::is_same_v<L, Switching>) {
          if (law.graphs.empty())
            throw ValidationError("switching model: needs at least one graph");
          for (const auto& g : law.graphs) require_order(g, "switching");
        }
      },
      model.law);
}

Ensemble step(const DtModel& model, const Ensemble& e, long t) {
  validate_model(model, e);
  Stencil st = resolve(model, t);
  int n = e.size();
  int dim = e.dim;
  double h = model.h;

  Ensemble out = e;
  out.time = e.time + h;
  for (size_t c = 0; c < e.x.size(); ++c) out.x[c] = e.x[c] + h * e.v[c];

  std::vector<double> acc(static_cast<size_t>(dim));
  for (int i = 0; i < n; ++i) {
    double degree = 0.0;
    std::fill(acc.begin(), acc.end(), 0.0);
    auto pull = [&](int j, double w) {
      degree += w;
      for (int k = 0; k < dim; ++k)
        acc[static_cast<size_t>(k)] +=
            w * (e.v[static_cast<size_t>(j) * dim + k] -
                 e.v[static_cast<size_t>(i) * dim + k]);
    };
    if (st.graph == nullptr) {
      for (int j = 0; j < n; ++j)
        if (j != i) pull(j, model.kernel(pair_distance(e, i, j)));
    } else {
      for (int j : st.graph->leaders(i))
        pull(j, st.strength * model.kernel(pair_distance(e, i, j)));
    }
    if (h * degree >= 1.0) throw StabilityError(i, degree, h);
    for (int k = 0; k < dim; ++k)
      out.v[static_cast<size_t>(i) * dim + k] =
          e.v[static_cast<size_t>(i) * dim + k] +
          h * acc[static_cast<size_t>(k)];
    if (st.pref != nullptr && i > 0) {
      const auto& leaders = st.graph->leaders(i);
      double delta = 0.0;
      for (int j : leaders) {
        double d2 = 0.0;
        for (int k = 0; k < dim; ++k) {
          double dv = e.v[static_cast<size_t>(j) * dim + k] -
                      e.v[static_cast<size_t>(i) * dim + k];
          d2 += dv * dv;
        }
        delta += std::sqrt(d2);
      }
      delta /= static_cast<double>(leaders.size());
      for (int k = 0; k < dim; ++k)
        out.v[static_cast<size_t>(i) * dim + k] +=
            h * delta * st.pref->q[static_cast<size_t>(i) * dim + k];
    }
  }
  return out;
}

Matrix flocking_matrix(const Ensemble& e, const Digraph& graph, double h,
                       const Kernel& kernel, double strength) {
  validate_ensemble(e);
  if (!(h > 0.0) || !std::isfinite(h))
    throw ValidationError("flocking matrix: h must be finite and > 0");
  if (!(strength > 0.0) || !std::isfinite(strength))
    throw ValidationError("flocking matrix: strength must be finite and > 0");
  int n = e.size();
  if (graph.vertex_count() != n)
    throw ValidationError("flocking matrix: graph order does not match");
  if (!is_rooted(graph, 0))
    throw ValidationError(
        "flocking matrix: needs a graph rooted at agent 0");
  Matrix p = Matrix::zero(n - 1, n - 1);
  for (int i = 1; i < n; ++i) {
    double degree = 0.0;
    for (int j : graph.leaders(i)) {
      double w = strength * kernel(pair_distance(e, i, j));
      degree += w;
      if (j >= 1) p.at(i - 1, j - 1) = h * w;
    }
    if (h * degree >= 1.0) throw StabilityError(i, degree, h);
    p.at(i - 1, i - 1) = 1.0 - h * degree;
  }
  return p;
}

std::vector<DiagnosticsRecord> simulate(const DtModel& model, Ensemble& e,
                                        long steps,
                                        const StepObserver& observer) {
  if (steps < 0) throw ValidationError("simulate: negative step count");
  validate_model(model, e);
  std::vector<DiagnosticsRecord> records;
  records.reserve(static_cast<size_t>(steps) + 1);
  records.push_back(dt_diagnose(e));
  double t0 = e.time;
  for (long s = 0; s < steps; ++s) {
    try {
      e = step(model, e, s);
    } catch (const StabilityError& err) {
      throw StabilityError(err.agent(), err.degree_sum(), model.h, s);
    }
    e.time = t0 + static_cast<double>(s + 1) * model.h;
    records.push_back(dt_diagnose(e));
    if (observer) observer(e, records.back());
  }
  return records;
}

}  // namespace flock
