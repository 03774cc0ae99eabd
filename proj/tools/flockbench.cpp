#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "flock/errors.hpp"
#include "flock/scenario.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 1;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_threads) {
  cmd->add_option("-c,--config", opts.config,
                  "scenario config file, or the name of a built-in preset")
      ->required();
  cmd->add_option("--seed", opts.seed,
                  "override the sampling seed in the config");
  cmd->add_option("-o,--out", opts.out_dir,
                  "directory for output files (default: current directory)");
  if (with_threads)
    cmd->add_option("--threads", opts.threads, "worker threads for the study")
        ->check(CLI::PositiveNumber);
  cmd->add_flag("-q,--quiet", opts.quiet, "suppress the stdout summary");
}

/// A --config value naming a preset (and not an existing file) loads the
/// preset directly; otherwise the file is read and may itself extend a
/// preset via [scenario] preset.
flock::ConfigMap load_config(const std::string& value, std::string& base_dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(value)) {
    const auto& presets = flock::preset_configs();
    if (auto it = presets.find(value); it != presets.end()) {
      base_dir = ".";
      return flock::parse_config(it->second);
    }
  }
  fs::path p(value);
  base_dir = p.has_parent_path() ? p.parent_path().string() : ".";
  return flock::parse_config(flock::read_file(value));
}

flock::Overrides to_overrides(const CommonOpts& opts) {
  flock::Overrides o;
  o.seed = opts.seed;
  o.out_dir = opts.out_dir;
  o.threads = opts.threads;
  return o;
}

int run_command(const CommonOpts& opts) {
  std::string base_dir;
  flock::ConfigMap cfg = load_config(opts.config, base_dir);
  flock::Scenario s =
      flock::build_scenario(cfg, base_dir, to_overrides(opts));
  flock::RunResult result = flock::run_scenario(s);
  flock::write_file_atomic(s.series_path, flock::series_csv(result.records));
  flock::write_file_atomic(s.report_path, result.report);
  if (!opts.quiet) {
    std::printf("%s", result.report.c_str());
    std::printf("rows=%zu\nseries=%s\nreport=%s\n", result.records.size(),
                s.series_path.c_str(), s.report_path.c_str());
  }
  return 0;
}

int check_command(const CommonOpts& opts) {
  std::string base_dir;
  flock::ConfigMap cfg = load_config(opts.config, base_dir);
  flock::Scenario s =
      flock::build_scenario(cfg, base_dir, to_overrides(opts));
  std::printf("%s", flock::check_scenario(s).c_str());
  return 0;
}

int study_command(const CommonOpts& opts) {
  std::string base_dir;
  flock::ConfigMap cfg = load_config(opts.config, base_dir);
  flock::StudySetup setup = flock::build_study(cfg, to_overrides(opts));
  auto rows = flock::convergence_study(setup.spec, setup.model, setup.sizes,
                                       setup.horizon_t, setup.step_h,
                                       setup.trials, setup.seed,
                                       setup.threads);
  flock::write_file_atomic(setup.out_path, flock::study_csv(rows));
  if (!opts.quiet)
    std::printf("rows=%zu\nout=%s\n", rows.size(), setup.out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flockbench: alignment-model simulations, condition checks, "
               "and sampling convergence studies"};
  app.require_subcommand(1);

  CommonOpts run_opts, check_opts, study_opts;
  CLI::App* run =
      app.add_subcommand("run", "simulate a scenario and write its time "
                                "series and report");
  add_common(run, run_opts, false);
  CLI::App* check =
      app.add_subcommand("check", "evaluate the scenario's sufficient "
                                  "conditions on the initial data");
  add_common(check, check_opts, false);
  CLI::App* study =
      app.add_subcommand("study", "empirical-measure convergence study");
  add_common(study, study_opts, true);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return run_command(run_opts);
    if (check->parsed()) return check_command(check_opts);
    return study_command(study_opts);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const flock::Error& e) {
    const char* kind = e.kind() == flock::ErrorKind::validation ? "validation"
                       : e.kind() == flock::ErrorKind::model    ? "model"
                                                                : "io";
    std::fprintf(stderr, "flockbench error: kind=%s message=\"%s\"\n", kind,
                 e.what());
    switch (e.kind()) {
      case flock::ErrorKind::validation:
        return 2;
      case flock::ErrorKind::model:
        return 3;
      case flock::ErrorKind::io:
        return 4;
    }
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "flockbench error: kind=internal message=\"%s\"\n",
                 e.what());
    return 1;
  }
}
