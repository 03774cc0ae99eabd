#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flock/core.hpp"
#include "flock/meanfield.hpp"
#include "flock/models_ct.hpp"
#include "flock/models_dt.hpp"

namespace flock {

/// Parsed sectioned key=value text: [section] headers, one key = value per
/// line, '#' comments, later duplicates override earlier ones.  Unknown
/// sections or keys are rejected when a scenario is built, not here.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

ConfigMap parse_config(const std::string& text);

/// Built-in scenario texts, keyed by preset name.
const std::map<std::string, std::string>& preset_configs();

/// Command-line overrides layered on top of the config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 1;
};

/// Fully resolved simulation plan: exactly one of ct/dt is set.  Graph
/// files named by the config are already loaded, sampled initial data is
/// already drawn, and output paths are joined with the output directory.
struct Scenario {
  std::string name;
  std::optional<CtModel> ct;
  std::optional<DtModel> dt;
  Ensemble initial;
  double step_h = 0.0;  // continuous families; discrete ones carry dt->h
  long steps = 0;
  int stride = 1;
  std::vector<std::string> checks;
  bool classify = true;
  std::string series_path;
  std::string report_path;

  bool discrete() const { return dt.has_value(); }
};

/// Build and validate a scenario.  base_dir anchors relative topology file
/// references (typically the config file's directory).
Scenario build_scenario(const ConfigMap& raw, const std::string& base_dir,
                        const Overrides& o);

/// Resolved convergence-study plan over the continuous model.
struct StudySetup {
  CtModel model;
  DensitySpec spec;
  std::vector<int> sizes;
  double horizon_t = 0.0;
  double step_h = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_path;
};

StudySetup build_study(const ConfigMap& raw, const Overrides& o);

struct RunResult {
  std::vector<DiagnosticsRecord> records;  // stride-thinned, final included
  std::string report;
};

/// Simulate and assemble the report (checks on the initial data, then the
/// outcome classification).  Writes nothing.
RunResult run_scenario(const Scenario& s);

/// Checks on the initial data only, no simulation.
std::string check_scenario(const Scenario& s);

/// Time-series CSV, fixed column order
/// t,Dx,Dv,x_sup,v_sup,E_k,E_p,L_plus,L_minus, shortest round-trip number
/// formatting, newline line endings.
std::string series_csv(const std::vector<DiagnosticsRecord>& records);

/// Whole-file read; throws IoError when unreadable.
std::string read_file(const std::string& path);

/// Write-to-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace flock
