#include "flock/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <variant>

#include "flock/analysis.hpp"
#include "flock/errors.hpp"
#include "flock/oracle2p.hpp"
#include "flock/topology.hpp"

namespace flock {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0)
    --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find(sep, pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(trim(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  double v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ValidationError(what + ": '" + s + "' is not a finite number");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  long v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError(what + ": '" + s + "' is not an integer");
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  long v = parse_long(s, what);
  if (v < -1000000000L || v > 1000000000L)
    throw ValidationError(what + ": '" + s + "' is out of range");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  std::uint64_t v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError(what + ": '" + s + "' is not an unsigned integer");
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ValidationError(what + ": '" + s + "' is not true or false");
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_double(tok, what));
  return out;
}

const std::string* find_key(const ConfigMap& cfg, const std::string& sec,
                            const std::string& key) {
  auto s = cfg.find(sec);
  if (s == cfg.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::string need_key(const ConfigMap& cfg, const std::string& sec,
                     const std::string& key) {
  const std::string* v = find_key(cfg, sec, key);
  if (v == nullptr)
    throw ValidationError("config: missing [" + sec + "] " + key);
  return *v;
}

void reject_unknown(const ConfigMap& cfg) {
  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"scenario", {"preset", "name"}},
      {"model",
       {"family", "kernel", "beta", "c", "knots_r", "knots_psi", "K", "K0",
        "K1", "K2", "R", "H", "nu"}},
      {"initial",
       {"dim", "x", "v", "masses", "sample_n", "sample_seed", "x_marginals",
        "v_marginals"}},
      {"run", {"step_h", "horizon_t", "horizon_steps", "stride"}},
      {"topology", {"file", "edges", "graphs", "graph_files", "signal", "q"}},
      {"output", {"series", "report"}},
      {"checks", {"run", "classify"}},
      {"study", {"sizes", "trials", "horizon_t", "step_h", "out", "seed"}},
  };
  for (const auto& [sec, kv] : cfg) {
    auto it = allowed.find(sec);
    if (it == allowed.end())
      throw ValidationError("config: unknown section [" + sec + "]");
    for (const auto& [key, value] : kv) {
      (void)value;
      if (std::find(it->second.begin(), it->second.end(), key) ==
          it->second.end())
        throw ValidationError("config: unknown key '" + key +
                              "' in section [" + sec + "]");
    }
  }
}

Kernel build_kernel(const ConfigMap& cfg) {
  std::string kind = need_key(cfg, "model", "kernel");
  if (kind == "power-law-plain")
    return Kernel::power_law_plain(
        parse_double(need_key(cfg, "model", "beta"), "[model] beta"));
  if (kind == "power-law-squared")
    return Kernel::power_law_squared(
        parse_double(need_key(cfg, "model", "beta"), "[model] beta"));
  if (kind == "constant")
    return Kernel::constant(
        parse_double(need_key(cfg, "model", "c"), "[model] c"));
  if (kind == "tabulated")
    return Kernel::tabulated(
        parse_double_list(need_key(cfg, "model", "knots_r"),
                          "[model] knots_r"),
        parse_double_list(need_key(cfg, "model", "knots_psi"),
                          "[model] knots_psi"));
  throw ValidationError(
      "config: unknown kernel '" + kind +
      "' (power-law-plain, power-law-squared, constant, tabulated)");
}

Marginal parse_marginal(const std::string& token, const std::string& what) {
  auto parts = split(token, ':');
  if (parts.size() == 3 && parts[0] == "uniform")
    return Marginal::uniform_on(parse_double(parts[1], what),
                                parse_double(parts[2], what));
  if (parts.size() == 5 && parts[0] == "gaussian")
    return Marginal::gaussian_on(
        parse_double(parts[1], what), parse_double(parts[2], what),
        parse_double(parts[3], what), parse_double(parts[4], what));
  throw ValidationError(what + ": '" + token +
                        "' is not uniform:lo:hi or "
                        "gaussian:lo:hi:mean:stddev");
}

std::vector<Marginal> parse_marginals(const std::string& value,
                                      const std::string& what) {
  std::vector<Marginal> out;
  for (const auto& tok : split(value, ','))
    out.push_back(parse_marginal(tok, what));
  if (out.empty()) throw ValidationError(what + ": empty marginal list");
  return out;
}

DensitySpec build_density_spec(const ConfigMap& cfg) {
  DensitySpec spec;
  spec.position = parse_marginals(need_key(cfg, "initial", "x_marginals"),
                                  "[initial] x_marginals");
  spec.velocity = parse_marginals(need_key(cfg, "initial", "v_marginals"),
                                  "[initial] v_marginals");
  validate_spec(spec);
  return spec;
}

Ensemble build_initial(const ConfigMap& cfg, const Overrides& o) {
  bool explicit_xy = find_key(cfg, "initial", "x") != nullptr ||
                     find_key(cfg, "initial", "v") != nullptr;
  bool sampled = find_key(cfg, "initial", "sample_n") != nullptr;
  if (explicit_xy == sampled)
    throw ValidationError(
        "config: [initial] needs either explicit x/v lists or a sampling "
        "spec (sample_n with marginals), not both");
  if (sampled) {
    DensitySpec spec = build_density_spec(cfg);
    int n = parse_int(need_key(cfg, "initial", "sample_n"),
                      "[initial] sample_n");
    std::uint64_t seed = 0;
    if (const std::string* s = find_key(cfg, "initial", "sample_seed"))
      seed = parse_u64(*s, "[initial] sample_seed");
    if (o.seed) seed = *o.seed;
    return sample(spec, n, seed);
  }
  int dim = parse_int(need_key(cfg, "initial", "dim"), "[initial] dim");
  auto x = parse_double_list(need_key(cfg, "initial", "x"), "[initial] x");
  auto v = parse_double_list(need_key(cfg, "initial", "v"), "[initial] v");
  std::vector<double> masses;
  if (const std::string* m = find_key(cfg, "initial", "masses"))
    masses = parse_double_list(*m, "[initial] masses");
  return make_ensemble(dim, std::move(x), std::move(v), std::move(masses));
}

std::vector<std::pair<int, int>> parse_edge_list(const std::string& value,
                                                 const std::string& what) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& pair_text : split(value, ';')) {
    if (pair_text.empty()) continue;
    size_t gap = pair_text.find(' ');
    if (gap == std::string::npos)
      throw ValidationError(what + ": edge '" + pair_text +
                            "' is not a 'j i' pair");
    edges.push_back({parse_int(trim(pair_text.substr(0, gap)), what),
                     parse_int(trim(pair_text.substr(gap + 1)), what)});
  }
  return edges;
}

Digraph load_graph_file(const std::string& name, const std::string& base_dir,
                        int agents) {
  namespace fs = std::filesystem;
  std::string path = (fs::path(base_dir) / name).string();
  Digraph g = parse_digraph(read_file(path));
  if (g.vertex_count() != agents)
    throw ValidationError("topology file " + name + " declares " +
                          std::to_string(g.vertex_count()) +
                          " vertices for " + std::to_string(agents) +
                          " agents");
  return g;
}

Digraph build_single_graph(const ConfigMap& cfg, const std::string& base_dir,
                           int agents) {
  const std::string* file = find_key(cfg, "topology", "file");
  const std::string* edges = find_key(cfg, "topology", "edges");
  if ((file != nullptr) == (edges != nullptr))
    throw ValidationError(
        "config: [topology] needs exactly one of 'file' or 'edges'");
  if (file != nullptr) return load_graph_file(*file, base_dir, agents);
  return Digraph(agents, parse_edge_list(*edges, "[topology] edges"));
}

std::vector<Digraph> build_graph_list(const ConfigMap& cfg,
                                      const std::string& base_dir,
                                      int agents) {
  const std::string* files = find_key(cfg, "topology", "graph_files");
  const std::string* inline_graphs = find_key(cfg, "topology", "graphs");
  if ((files != nullptr) == (inline_graphs != nullptr))
    throw ValidationError(
        "config: switching needs exactly one of [topology] 'graph_files' "
        "or 'graphs'");
  std::vector<Digraph> graphs;
  if (files != nullptr) {
    for (const auto& name : split(*files, ','))
      graphs.push_back(load_graph_file(name, base_dir, agents));
  } else {
    size_t pos = 0;
    const std::string& text = *inline_graphs;
    while (pos <= text.size()) {
      size_t next = text.find('|', pos);
      if (next == std::string::npos) next = text.size();
      graphs.push_back(Digraph(
          agents, parse_edge_list(text.substr(pos, next - pos),
                                  "[topology] graphs")));
      pos = next + 1;
    }
  }
  if (graphs.empty())
    throw ValidationError("config: switching needs at least one graph");
  return graphs;
}

SwitchingSignal build_signal(const ConfigMap& cfg) {
  std::string value = need_key(cfg, "topology", "signal");
  size_t gap = value.find(' ');
  std::string kind = gap == std::string::npos ? value : value.substr(0, gap);
  std::vector<int> indices;
  if (gap != std::string::npos) {
    size_t cursor = gap + 1;
    while (cursor < value.size()) {
      size_t next = value.find(' ', cursor);
      if (next == std::string::npos) next = value.size();
      std::string tok = trim(value.substr(cursor, next - cursor));
      if (!tok.empty())
        indices.push_back(parse_int(tok, "[topology] signal"));
      cursor = next + 1;
    }
  }
  if (kind == "periodic") return SwitchingSignal::periodic(indices);
  if (kind == "schedule") return SwitchingSignal::schedule(indices);
  throw ValidationError("config: signal '" + value +
                        "' is not 'periodic ...' or 'schedule ...'");
}

double model_K(const ConfigMap& cfg) {
  return parse_double(need_key(cfg, "model", "K"), "[model] K");
}

std::vector<std::string> default_checks(const Scenario& s) {
  if (s.discrete()) return {};
  if (std::holds_alternative<Symmetric>(s.ct->law)) return {"symmetric"};
  if (std::holds_alternative<MotschTadmor>(s.ct->law))
    return {"motsch-tadmor"};
  if (std::holds_alternative<Bonding>(s.ct->law)) return {"bonding"};
  return {"hydro"};
}

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

ConditionReport dispatch_check(const std::string& name, const Scenario& s) {
  if (s.discrete())
    throw ValidationError("check '" + name +
                          "' needs a continuous-time model");
  const CtModel& m = *s.ct;
  if (name == "symmetric") {
    const auto* law = std::get_if<Symmetric>(&m.law);
    if (law == nullptr)
      throw ValidationError(
          "check 'symmetric' needs the symmetric model family");
    return check_symmetric(s.initial, law->K, m.kernel);
  }
  if (name == "motsch-tadmor") return check_motsch_tadmor(s.initial, m.kernel);
  if (name == "bonding") {
    const auto* law = std::get_if<Bonding>(&m.law);
    if (law == nullptr)
      throw ValidationError("check 'bonding' needs the bonding model family");
    return check_bonding(s.initial, law->K2, law->R, m.kernel);
  }
  if (name == "hydro") return check_hydro(s.initial, m.kernel);
  throw ValidationError("unknown check '" + name +
                        "' (symmetric, motsch-tadmor, bonding, hydro)");
}

std::string check_blocks(const Scenario& s) {
  std::string out;
  for (const auto& name : s.checks) {
    out += report_text(name, dispatch_check(name, s));
    out += '\n';
  }
  return out;
}

std::string outcome_block(const Scenario& s,
                          const std::vector<DiagnosticsRecord>& records) {
  auto label = classify_outcome(records);
  std::string out;
  out += "outcome=";
  out += outcome_name(label.outcome);
  out += '\n';
  out += "final_Dv=" + fmt(label.final_Dv) + '\n';
  out += "dx_growth_rate=" + fmt(label.dx_growth_rate) + '\n';

  // two-agent scalar alignment with an algebraic kernel has a closed-form
  // phase diagram; report which side of it this run sits on
  if (!s.discrete() && s.initial.size() == 2 && s.initial.dim == 1 &&
      s.ct->kernel.family() == Kernel::Family::power_law_plain &&
      s.ct->kernel.beta() > 1.0 &&
      std::holds_alternative<Symmetric>(s.ct->law)) {
    double gap = std::abs(s.initial.x[1] - s.initial.x[0]);
    double closing = s.initial.v[1] - s.initial.v[0];
    double w = gap == 0.0 ? std::abs(closing)
                          : closing * (s.initial.x[1] > s.initial.x[0]
                                           ? 1.0
                                           : -1.0);
    if (w >= 0.0) {
      TwoParticleCase c{gap, w, std::get<Symmetric>(s.ct->law).K,
                        s.ct->kernel.beta()};
      auto cls = classify(c);
      const char* regime =
          cls.regime == TwoParticleRegime::subcritical     ? "Subcritical"
          : cls.regime == TwoParticleRegime::supercritical ? "Supercritical"
                                                           : "Critical";
      out += std::string("two_particle_regime=") + regime + '\n';
      out += "two_particle_critical_velocity=" + fmt(critical_velocity(c)) +
             '\n';
      if (cls.regime == TwoParticleRegime::supercritical)
        out += "two_particle_v_infinity=" + fmt(asymptotic_velocity(c)) +
               '\n';
    }
  }
  return out;
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap cfg;
  std::string section;
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      cfg[section];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value, got '" + line + "'");
    if (section.empty())
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": key outside any [section]");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": empty key");
    cfg[section][key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Scenario build_scenario(const ConfigMap& raw, const std::string& base_dir,
                        const Overrides& o) {
  ConfigMap cfg = raw;
  std::string preset_name;
  if (const std::string* preset = find_key(raw, "scenario", "preset")) {
    preset_name = *preset;
    const auto& presets = preset_configs();
    auto it = presets.find(preset_name);
    if (it == presets.end()) {
      std::string known;
      for (const auto& [name, text] : presets) {
        (void)text;
        if (!known.empty()) known += ", ";
        known += name;
      }
      throw ValidationError("config: unknown preset '" + preset_name +
                            "' (available: " + known + ")");
    }
    cfg = parse_config(it->second);
    for (const auto& [sec, kv] : raw)
      for (const auto& [key, value] : kv) cfg[sec][key] = value;
  }
  reject_unknown(cfg);

  Scenario s;
  s.name = "scenario";
  if (!preset_name.empty()) s.name = preset_name;
  if (const std::string* n = find_key(cfg, "scenario", "name")) s.name = *n;

  Kernel kernel = build_kernel(cfg);
  s.initial = build_initial(cfg, o);
  std::string family = need_key(cfg, "model", "family");

  double step_h =
      parse_double(need_key(cfg, "run", "step_h"), "[run] step_h");
  if (!(step_h > 0.0))
    throw ValidationError("config: [run] step_h must be positive");

  bool discrete = family == "all-to-all" || family == "leadership" ||
                  family == "preference" || family == "switching";
  if (discrete) {
    if (find_key(cfg, "run", "horizon_t") != nullptr)
      throw ValidationError(
          "config: discrete families use [run] horizon_steps, not "
          "horizon_t");
    s.steps = parse_long(need_key(cfg, "run", "horizon_steps"),
                         "[run] horizon_steps");
    if (s.steps < 1)
      throw ValidationError("config: [run] horizon_steps must be >= 1");
    int agents = s.initial.size();
    if (family == "all-to-all") {
      if (cfg.count("topology") != 0u)
        throw ValidationError(
            "config: the all-to-all family takes no [topology] section");
      s.dt.emplace(DtModel{step_h, kernel, AllToAll{}});
    } else if (family == "leadership") {
      s.dt.emplace(
          DtModel{step_h, kernel,
                  Leadership{build_single_graph(cfg, base_dir, agents)}});
    } else if (family == "preference") {
      double H = parse_double(need_key(cfg, "model", "H"), "[model] H");
      double nu = parse_double(need_key(cfg, "model", "nu"), "[model] nu");
      auto q = parse_double_list(need_key(cfg, "topology", "q"),
                                 "[topology] q");
      s.dt.emplace(DtModel{
          step_h, kernel,
          Preference{build_single_graph(cfg, base_dir, agents), H,
                     std::move(q), nu}});
    } else {
      s.dt.emplace(DtModel{step_h, kernel,
                           Switching{build_graph_list(cfg, base_dir, agents),
                                     build_signal(cfg)}});
    }
    validate_model(*s.dt, s.initial);
  } else {
    if (find_key(cfg, "run", "horizon_steps") != nullptr)
      throw ValidationError(
          "config: continuous families use [run] horizon_t, not "
          "horizon_steps");
    if (cfg.count("topology") != 0u)
      throw ValidationError(
          "config: continuous families take no [topology] section");
    double horizon =
        parse_double(need_key(cfg, "run", "horizon_t"), "[run] horizon_t");
    if (!(horizon > 0.0))
      throw ValidationError("config: [run] horizon_t must be positive");
    s.step_h = step_h;
    s.steps = std::lround(horizon / step_h);
    if (s.steps < 1)
      throw ValidationError(
          "config: [run] horizon_t is shorter than one step");
    if (family == "symmetric") {
      s.ct.emplace(CtModel{Symmetric{model_K(cfg)}, kernel});
    } else if (family == "motsch-tadmor") {
      s.ct.emplace(CtModel{MotschTadmor{model_K(cfg)}, kernel});
    } else if (family == "bonding") {
      s.ct.emplace(CtModel{
          Bonding{parse_double(need_key(cfg, "model", "K0"), "[model] K0"),
                  parse_double(need_key(cfg, "model", "K1"), "[model] K1"),
                  parse_double(need_key(cfg, "model", "K2"), "[model] K2"),
                  parse_double(need_key(cfg, "model", "R"), "[model] R")},
          kernel});
    } else if (family == "weighted") {
      s.ct.emplace(CtModel{Weighted{model_K(cfg)}, kernel});
    } else {
      throw ValidationError(
          "config: unknown family '" + family +
          "' (symmetric, motsch-tadmor, bonding, weighted, all-to-all, "
          "leadership, preference, switching)");
    }
    validate_model(*s.ct, s.initial);
  }

  s.stride = 1;
  if (const std::string* st = find_key(cfg, "run", "stride")) {
    s.stride = parse_int(*st, "[run] stride");
    if (s.stride < 1)
      throw ValidationError("config: [run] stride must be >= 1");
  }

  if (const std::string* list = find_key(cfg, "checks", "run")) {
    if (*list != "none")
      for (const auto& name : split(*list, ',')) s.checks.push_back(name);
  } else {
    s.checks = default_checks(s);
  }
  for (const auto& name : s.checks) dispatch_check(name, s);  // fail early
  if (const std::string* c = find_key(cfg, "checks", "classify"))
    s.classify = parse_bool(*c, "[checks] classify");

  namespace fs = std::filesystem;
  std::string out_dir = o.out_dir.value_or(".");
  std::string series = "series.csv";
  std::string report = "report.txt";
  if (const std::string* v = find_key(cfg, "output", "series")) series = *v;
  if (const std::string* v = find_key(cfg, "output", "report")) report = *v;
  s.series_path = (fs::path(out_dir) / series).string();
  s.report_path = (fs::path(out_dir) / report).string();
  return s;
}

StudySetup build_study(const ConfigMap& raw, const Overrides& o) {
  ConfigMap cfg = raw;
  if (const std::string* preset = find_key(raw, "scenario", "preset")) {
    const auto& presets = preset_configs();
    auto it = presets.find(*preset);
    if (it == presets.end())
      throw ValidationError("config: unknown preset '" + *preset + "'");
    cfg = parse_config(it->second);
    for (const auto& [sec, kv] : raw)
      for (const auto& [key, value] : kv) cfg[sec][key] = value;
  }
  reject_unknown(cfg);
  if (cfg.count("study") == 0u)
    throw ValidationError("config: the study command needs a [study] section");

  std::string family = need_key(cfg, "model", "family");
  Kernel kernel = build_kernel(cfg);
  std::optional<CtModel> model;
  if (family == "symmetric")
    model.emplace(CtModel{Symmetric{model_K(cfg)}, kernel});
  else if (family == "motsch-tadmor")
    model.emplace(CtModel{MotschTadmor{model_K(cfg)}, kernel});
  else if (family == "bonding")
    model.emplace(CtModel{
        Bonding{parse_double(need_key(cfg, "model", "K0"), "[model] K0"),
                parse_double(need_key(cfg, "model", "K1"), "[model] K1"),
                parse_double(need_key(cfg, "model", "K2"), "[model] K2"),
                parse_double(need_key(cfg, "model", "R"), "[model] R")},
        kernel});
  else
    throw ValidationError(
        "config: the study command needs a mass-free continuous family "
        "(symmetric, motsch-tadmor, bonding)");

  StudySetup setup{*model,
                   build_density_spec(cfg),
                   {},
                   0.0,
                   0.0,
                   0,
                   0,
                   o.threads,
                   ""};
  for (const auto& tok :
       split(need_key(cfg, "study", "sizes"), ','))
    setup.sizes.push_back(parse_int(tok, "[study] sizes"));
  setup.trials = parse_int(need_key(cfg, "study", "trials"),
                           "[study] trials");
  setup.horizon_t = parse_double(need_key(cfg, "study", "horizon_t"),
                                 "[study] horizon_t");
  setup.step_h =
      parse_double(need_key(cfg, "study", "step_h"), "[study] step_h");
  if (const std::string* s = find_key(cfg, "study", "seed"))
    setup.seed = parse_u64(*s, "[study] seed");
  if (o.seed) setup.seed = *o.seed;

  namespace fs = std::filesystem;
  std::string out_name = "study.csv";
  if (const std::string* v = find_key(cfg, "study", "out")) out_name = *v;
  setup.out_path = (fs::path(o.out_dir.value_or(".")) / out_name).string();
  return setup;
}

RunResult run_scenario(const Scenario& s) {
  RunResult out;
  if (!s.discrete()) {
    Ensemble e = s.initial;
    out.records.push_back(diagnose(*s.ct, e));
    long counter = 0;
    integrate(*s.ct, e, s.step_h, s.steps,
              [&](const Ensemble& state, const DiagnosticsRecord& rec) {
                (void)state;
                ++counter;
                if (counter % s.stride == 0 || counter == s.steps)
                  out.records.push_back(rec);
              });
  } else {
    Ensemble e = s.initial;
    auto all = simulate(*s.dt, e, s.steps);
    for (size_t k = 0; k < all.size();
         k += static_cast<size_t>(s.stride))
      out.records.push_back(all[k]);
    if ((all.size() - 1) % static_cast<size_t>(s.stride) != 0)
      out.records.push_back(all.back());
  }

  out.report = "scenario=" + s.name + "\n\n";
  out.report += check_blocks(s);
  if (s.classify) out.report += outcome_block(s, out.records);
  return out;
}

std::string check_scenario(const Scenario& s) {
  if (s.checks.empty())
    throw ValidationError("no checks configured for this scenario");
  return "scenario=" + s.name + "\n\n" + check_blocks(s);
}

std::string series_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out = "t,Dx,Dv,x_sup,v_sup,E_k,E_p,L_plus,L_minus\n";
  for (const auto& r : records) {
    out += fmt(r.time);
    out += ',';
    out += fmt(r.Dx);
    out += ',';
    out += fmt(r.Dv);
    out += ',';
    out += fmt(r.x_sup);
    out += ',';
    out += fmt(r.v_sup);
    out += ',';
    out += fmt(r.kinetic_energy);
    out += ',';
    out += fmt(r.potential_energy);
    out += ',';
    out += fmt(r.lyapunov_plus);
    out += ',';
    out += fmt(r.lyapunov_minus);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed while reading " + path);
  return text;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path())
    fs::create_directories(target.parent_path(), ec);
  if (ec)
    throw IoError("cannot create directory " +
                  target.parent_path().string());
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("failed while writing " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move " + tmp + " into place");
  }
}

const std::map<std::string, std::string>& preset_configs() {
  static const std::map<std::string, std::string> presets = {
      {"two-particle-critical", R"(
[scenario]
name = two-particle-critical
[model]
family = symmetric
kernel = power-law-plain
beta = 2
K = 1
[initial]
dim = 1
x = 0, 0
v = -0.5, 0.5
[run]
step_h = 0.001
horizon_t = 10
stride = 10
[checks]
run = none
classify = true
)"},
      {"two-particle-supercritical", R"(
[scenario]
name = two-particle-supercritical
[model]
family = symmetric
kernel = power-law-plain
beta = 2
K = 1
[initial]
dim = 1
x = 0, 0
v = -1, 1
[run]
step_h = 0.001
horizon_t = 20
stride = 20
[checks]
run = none
classify = true
)"},
      {"theorem-T1-demo", R"(
[scenario]
name = theorem-T1-demo
[model]
family = symmetric
kernel = power-law-plain
beta = 2
K = 6
[initial]
sample_n = 20
sample_seed = 1
x_marginals = uniform:-0.5:0.5, uniform:-0.5:0.5
v_marginals = uniform:-0.2:0.2, uniform:-0.2:0.2
[run]
step_h = 0.002
horizon_t = 30
stride = 25
[checks]
run = symmetric
classify = true
)"},
      {"mt-fat-tail", R"(
[scenario]
name = mt-fat-tail
[model]
family = motsch-tadmor
kernel = power-law-plain
beta = 0.4
K = 1
[initial]
sample_n = 10
sample_seed = 4
x_marginals = uniform:-1:1, uniform:-1:1
v_marginals = uniform:-0.5:0.5, uniform:-0.5:0.5
[run]
step_h = 0.01
horizon_t = 60
stride = 10
[checks]
run = motsch-tadmor
classify = true
)"},
      {"bonding-ring", R"(
[scenario]
name = bonding-ring
[model]
family = bonding
kernel = power-law-plain
beta = 0.5
K0 = 1
K1 = 1
K2 = 1
R = 0.5
[initial]
dim = 2
x = 1, 0, 0.7071067811865476, 0.7071067811865476, 0, 1, -0.7071067811865476, 0.7071067811865476, -1, 0, -0.7071067811865476, -0.7071067811865476, 0, -1, 0.7071067811865476, -0.7071067811865476
v = 0, 0.3, -0.21213203435596426, 0.21213203435596426, -0.3, 0, -0.21213203435596426, -0.21213203435596426, 0, -0.3, 0.21213203435596426, -0.21213203435596426, 0.3, 0, 0.21213203435596426, 0.21213203435596426
[run]
step_h = 0.005
horizon_t = 60
stride = 100
[checks]
run = bonding
classify = true
)"},
      {"hierarchy-chain", R"(
[scenario]
name = hierarchy-chain
[model]
family = leadership
kernel = power-law-squared
beta = 0.25
[initial]
dim = 1
x = 0, 1, 2, 3, 4, 5, 6, 7, 8, 9
v = 0.5, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5, -0.5
[run]
step_h = 0.5
horizon_steps = 2000
stride = 4
[topology]
edges = 0 1; 1 2; 2 3; 3 4; 4 5; 5 6; 6 7; 7 8; 8 9
[checks]
classify = true
)"},
      {"alternating-leaders", R"(
[scenario]
name = alternating-leaders
[model]
family = switching
kernel = power-law-squared
beta = 0.05
[initial]
dim = 2
x = 0, 0, 1, 0, 1, 1, 0, 1
v = 0.5, 0.1, -0.3, 0.2, 0.1, -0.4, -0.2, 0.3
[run]
step_h = 0.3
horizon_steps = 3000
stride = 5
[topology]
graphs = 0 1; 0 2; 0 3 | 3 0; 3 1; 3 2
signal = periodic 0 1
[checks]
classify = true
)"},
      {"hydro-weighted", R"(
[scenario]
name = hydro-weighted
[model]
family = weighted
kernel = power-law-plain
beta = 0.3
K = 1
[initial]
dim = 1
x = -2.5, -1.5, -0.5, 0.5, 1.5, 2.5
v = 0.4, -0.2, 0.3, -0.4, 0.1, -0.3
masses = 0.3, 0.25, 0.2, 0.1, 0.1, 0.05
[run]
step_h = 0.01
horizon_t = 30
stride = 20
[checks]
run = hydro
classify = true
)"},
  };
  return presets;
}

}  // namespace flock
