#include "flock/scenario.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "doctest.h"
#include "flock/errors.hpp"
#include "flock/oracle2p.hpp"
#include "flock/topology.hpp"

using flock::build_scenario;
using flock::build_study;
using flock::ConfigMap;
using flock::IoError;
using flock::ModelError;
using flock::Overrides;
using flock::parse_config;
using flock::parse_digraph;
using flock::preset_configs;
using flock::read_file;
using flock::run_scenario;
using flock::Scenario;
using flock::series_csv;
using flock::ValidationError;
using flock::write_file_atomic;

namespace {

namespace fs = std::filesystem;

std::string scenario_dir() { return FLOCK_SCENARIO_DIR; }

/// Fresh empty directory under the system temp root.
std::string temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() /
               ("flock_test_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

Scenario build_preset(const std::string& name, const Overrides& o = {}) {
  return build_scenario(parse_config(preset_configs().at(name)),
                        scenario_dir(), o);
}

struct CliResult {
  int status = -1;
  std::string out;
};

/// Runs the installed binary with stderr folded into stdout.
CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(FLOCKBENCH_BIN) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0)
    r.out.append(buf, got);
  int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    out.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return out;
}

/// Comma-split row of a CSV line, parsed as doubles.
std::vector<double> csv_row(const std::string& line) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= line.size()) {
    size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    out.push_back(std::strtod(line.substr(pos, comma - pos).c_str(), nullptr));
    pos = comma + 1;
  }
  return out;
}

const std::vector<double>* find_time_row(
    const std::vector<std::vector<double>>& rows, double t) {
  for (const auto& r : rows)
    if (r[0] == t) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("config text parses sections, comments, and overrides") {
  ConfigMap cfg = parse_config(
      "# leading comment\n"
      "[model]\n"
      "family = symmetric   # trailing comment\n"
      "K = 1\n"
      "K = 2.5\n"
      "\n"
      "[run]\n"
      "step_h=0.1\n");
  CHECK(cfg.size() == 2);
  CHECK(cfg.at("model").at("family") == "symmetric");
  CHECK(cfg.at("model").at("K") == "2.5");  // later duplicate wins
  CHECK(cfg.at("run").at("step_h") == "0.1");

  CHECK_THROWS_AS(parse_config("key = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[model]\nno equals sign\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[model\nK = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[model]\n= 1\n"), ValidationError);
}

TEST_CASE("digraph text parses the header and edge pairs") {
  flock::Digraph g = parse_digraph(
      "# a comment line\n"
      "digraph 4\n"
      "0 1\n"
      "1 2  # inline comment\n"
      "0 3\n");
  CHECK(g.vertex_count() == 4);
  CHECK(g.edges() ==
        std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 3}});

  CHECK_THROWS_AS(parse_digraph("0 1\n"), ValidationError);  // no header
  CHECK_THROWS_AS(parse_digraph("digraph 3\n0 1\n2\n"), ValidationError);
  CHECK_THROWS_AS(parse_digraph("digraph 2\n0 5\n"), ValidationError);
  CHECK_THROWS_AS(parse_digraph("digraph 2\n1 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_digraph("digraph 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_digraph("digraph 2\n0 x\n"), ValidationError);
  CHECK_THROWS_AS(parse_digraph(""), ValidationError);
}

TEST_CASE("every built-in preset builds into a valid plan") {
  for (const auto& [name, text] : preset_configs()) {
    CAPTURE(name);
    Scenario s = build_scenario(parse_config(text), scenario_dir(), {});
    CHECK(s.name == name);
    CHECK(s.ct.has_value() != s.dt.has_value());
    CHECK(s.steps >= 1);
    CHECK(s.stride >= 1);
    CHECK(s.initial.size() >= 2);
  }
}

TEST_CASE("preset resolution layers user keys on top") {
  ConfigMap cfg = parse_config(
      "[scenario]\n"
      "preset = two-particle-critical\n"
      "[run]\n"
      "stride = 100\n"
      "[output]\n"
      "series = other.csv\n");
  Scenario s = build_scenario(cfg, ".", {});
  CHECK(s.name == "two-particle-critical");
  CHECK(s.stride == 100);                       // user override
  CHECK(s.steps == 10000);                      // preset horizon kept
  CHECK(s.series_path == "./other.csv");
  CHECK(s.report_path == "./report.txt");

  ConfigMap renamed = parse_config(
      "[scenario]\npreset = two-particle-critical\nname = my-pair\n");
  CHECK(build_scenario(renamed, ".", {}).name == "my-pair");

  ConfigMap unknown = parse_config("[scenario]\npreset = no-such-thing\n");
  CHECK_THROWS_AS(build_scenario(unknown, ".", {}), ValidationError);
}

TEST_CASE("the seed override replaces the configured sample seed") {
  Scenario base = build_preset("theorem-T1-demo");
  Overrides same;
  same.seed = 1;  // equals the preset's sample_seed
  Scenario with_same = build_preset("theorem-T1-demo", same);
  CHECK(base.initial.x == with_same.initial.x);

  Overrides other;
  other.seed = 9;
  Scenario with_other = build_preset("theorem-T1-demo", other);
  CHECK(base.initial.x != with_other.initial.x);
  CHECK(base.initial.size() == with_other.initial.size());
}

TEST_CASE("scenario building rejects malformed plans") {
  auto build = [](const std::string& text) {
    return build_scenario(parse_config(text), ".", {});
  };
  const std::string ct_head =
      "[model]\nfamily = symmetric\nkernel = power-law-plain\nbeta = 2\n"
      "K = 1\n[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n";
  const std::string dt_head =
      "[model]\nfamily = leadership\nkernel = constant\nc = 1\n"
      "[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
      "[topology]\nedges = 0 1\n";

  CHECK_NOTHROW(build(ct_head + "[run]\nstep_h = 0.1\nhorizon_t = 1\n"));
  CHECK_NOTHROW(build(dt_head + "[run]\nstep_h = 0.1\nhorizon_steps = 5\n"));

  // unknown structure
  CHECK_THROWS_AS(build(ct_head + "[run]\nstep_h = 0.1\nhorizon_t = 1\n"
                                  "[extra]\nk = 1\n"),
                  ValidationError);
  CHECK_THROWS_AS(build(ct_head + "[run]\nstep_h = 0.1\nhorizon_t = 1\n"
                                  "typo_key = 1\n"),
                  ValidationError);

  // family and kernel names
  CHECK_THROWS_AS(
      build("[model]\nfamily = nonsense\nkernel = constant\nc = 1\n"
            "[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
            "[run]\nstep_h = 0.1\nhorizon_t = 1\n"),
      ValidationError);
  CHECK_THROWS_AS(
      build("[model]\nfamily = symmetric\nkernel = nonsense\nK = 1\n"
            "[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
            "[run]\nstep_h = 0.1\nhorizon_t = 1\n"),
      ValidationError);

  // horizon kinds must match the family's clock
  CHECK_THROWS_AS(build(ct_head + "[run]\nstep_h = 0.1\nhorizon_steps = 5\n"),
                  ValidationError);
  CHECK_THROWS_AS(build(dt_head + "[run]\nstep_h = 0.1\nhorizon_t = 1\n"),
                  ValidationError);

  // run parameters
  CHECK_THROWS_AS(build(ct_head + "[run]\nstep_h = 0\nhorizon_t = 1\n"),
                  ValidationError);
  CHECK_THROWS_AS(build(ct_head + "[run]\nstep_h = 0.1\nhorizon_t = -1\n"),
                  ValidationError);
  CHECK_THROWS_AS(build(ct_head + "[run]\nstep_h = 0.1\nhorizon_t = 0.01\n"),
                  ValidationError);  // shorter than one step
  CHECK_THROWS_AS(build(ct_head +
                        "[run]\nstep_h = 0.1\nhorizon_t = 1\nstride = 0\n"),
                  ValidationError);
  CHECK_THROWS_AS(build(ct_head + "[run]\nstep_h = 0.1\nhorizon_t = x\n"),
                  ValidationError);

  // initial data is explicit xor sampled
  CHECK_THROWS_AS(
      build("[model]\nfamily = symmetric\nkernel = power-law-plain\n"
            "beta = 2\nK = 1\n[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
            "sample_n = 4\n[run]\nstep_h = 0.1\nhorizon_t = 1\n"),
      ValidationError);
  CHECK_THROWS_AS(
      build("[model]\nfamily = symmetric\nkernel = power-law-plain\n"
            "beta = 2\nK = 1\n[initial]\ndim = 1\n"
            "[run]\nstep_h = 0.1\nhorizon_t = 1\n"),
      ValidationError);

  // topology belongs to graph-driven families only
  CHECK_THROWS_AS(build(ct_head + "[run]\nstep_h = 0.1\nhorizon_t = 1\n"
                                  "[topology]\nedges = 0 1\n"),
                  ValidationError);
  CHECK_THROWS_AS(
      build("[model]\nfamily = all-to-all\nkernel = constant\nc = 1\n"
            "[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
            "[topology]\nedges = 0 1\n"
            "[run]\nstep_h = 0.1\nhorizon_steps = 5\n"),
      ValidationError);
  CHECK_THROWS_AS(build(dt_head + "[run]\nstep_h = 0.1\nhorizon_steps = 0\n"),
                  ValidationError);

  // graph-file vertex count must match the agent count
  CHECK_THROWS_AS(
      build_scenario(
          parse_config(
              "[model]\nfamily = leadership\nkernel = constant\nc = 1\n"
              "[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
              "[topology]\nfile = chain10.graph\n"
              "[run]\nstep_h = 0.1\nhorizon_steps = 5\n"),
          scenario_dir(), {}),
      ValidationError);
}

TEST_CASE("check dispatch demands the matching model family") {
  auto with_checks = [](const std::string& family_block,
                        const std::string& checks) {
    return build_scenario(
        parse_config(family_block +
                     "[initial]\ndim = 1\nx = 0, 1\nv = 0, 0.1\n"
                     "[run]\nstep_h = 0.1\nhorizon_t = 1\n"
                     "[checks]\nrun = " +
                     checks + "\n"),
        ".", {});
  };
  const std::string symmetric_block =
      "[model]\nfamily = symmetric\nkernel = power-law-plain\nbeta = 2\n"
      "K = 1\n";
  const std::string bonding_block =
      "[model]\nfamily = bonding\nkernel = power-law-plain\nbeta = 0.5\n"
      "K0 = 1\nK1 = 1\nK2 = 1\nR = 0.5\n";

  CHECK_NOTHROW(with_checks(symmetric_block, "symmetric, motsch-tadmor"));
  CHECK_NOTHROW(with_checks(bonding_block, "bonding"));
  CHECK_THROWS_AS(with_checks(symmetric_block, "bonding"), ValidationError);
  CHECK_THROWS_AS(with_checks(bonding_block, "symmetric"), ValidationError);
  CHECK_THROWS_AS(with_checks(symmetric_block, "hydro"),
                  ValidationError);  // no masses
  CHECK_THROWS_AS(with_checks(symmetric_block, "nonsense"), ValidationError);

  // checks never apply to the discrete families
  CHECK_THROWS_AS(
      build_scenario(
          parse_config(
              "[model]\nfamily = leadership\nkernel = constant\nc = 1\n"
              "[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
              "[topology]\nedges = 0 1\n"
              "[run]\nstep_h = 0.1\nhorizon_steps = 5\n"
              "[checks]\nrun = symmetric\n"),
          ".", {}),
      ValidationError);

  // families without an explicit list default to their own condition
  Scenario defaulted = build_scenario(
      parse_config(symmetric_block +
                   "[initial]\ndim = 1\nx = 0, 1\nv = 0, 0.1\n"
                   "[run]\nstep_h = 0.1\nhorizon_t = 1\n"),
      ".", {});
  CHECK(defaulted.checks == std::vector<std::string>{"symmetric"});
  Scenario silenced = build_scenario(
      parse_config(symmetric_block +
                   "[initial]\ndim = 1\nx = 0, 1\nv = 0, 0.1\n"
                   "[run]\nstep_h = 0.1\nhorizon_t = 1\n"
                   "[checks]\nrun = none\n"),
      ".", {});
  CHECK(silenced.checks.empty());
  CHECK_THROWS_AS(flock::check_scenario(silenced), ValidationError);
}

TEST_CASE("run_scenario thins the series but keeps both endpoints") {
  auto thin_case = [](const std::string& text, double dt) {
    Scenario s = build_scenario(parse_config(text), ".", {});
    auto result = run_scenario(s);
    REQUIRE(result.records.size() == 4);
    CHECK(result.records[0].time == 0.0);
    CHECK(result.records[1].time == doctest::Approx(7 * dt).epsilon(1e-12));
    CHECK(result.records[2].time == doctest::Approx(14 * dt).epsilon(1e-12));
    CHECK(result.records[3].time == doctest::Approx(20 * dt).epsilon(1e-12));
  };
  thin_case(
      "[model]\nfamily = symmetric\nkernel = power-law-plain\nbeta = 2\n"
      "K = 1\n[initial]\ndim = 1\nx = 0, 1\nv = 0, 0.1\n"
      "[run]\nstep_h = 0.05\nhorizon_t = 1\nstride = 7\n"
      "[checks]\nrun = none\nclassify = false\n",
      0.05);
  thin_case(
      "[model]\nfamily = leadership\nkernel = constant\nc = 1\n"
      "[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
      "[topology]\nedges = 0 1\n"
      "[run]\nstep_h = 0.1\nhorizon_steps = 20\nstride = 7\n"
      "[checks]\nclassify = false\n",
      0.1);
}

TEST_CASE("series csv prints shortest round-trip numbers") {
  flock::DiagnosticsRecord a;
  a.time = 0.1;
  a.Dx = 1.0 / 3.0;
  a.Dv = 2.5e-17;
  a.x_sup = 4;
  a.v_sup = 0.30000000000000004;
  a.kinetic_energy = 1e300;
  a.potential_energy = -0.125;
  a.lyapunov_plus = 7e-3;
  a.lyapunov_minus = -1;
  std::string csv = series_csv({a});
  auto rows = lines_of(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "t,Dx,Dv,x_sup,v_sup,E_k,E_p,L_plus,L_minus");
  auto vals = csv_row(rows[1]);
  REQUIRE(vals.size() == 9);
  CHECK(vals[0] == 0.1);
  CHECK(vals[1] == 1.0 / 3.0);  // bitwise round trip
  CHECK(vals[2] == 2.5e-17);
  CHECK(vals[4] == 0.30000000000000004);
  CHECK(vals[5] == 1e300);
  CHECK(vals[8] == -1.0);
}

TEST_CASE("the two-particle phase lines appear exactly when they apply") {
  auto report_of = [](const std::string& velocities) {
    ConfigMap cfg = parse_config(
        "[model]\nfamily = symmetric\nkernel = power-law-plain\nbeta = 2\n"
        "K = 1\n[initial]\ndim = 1\nx = 0, 1\nv = " +
        velocities +
        "\n[run]\nstep_h = 0.01\nhorizon_t = 2\n"
        "[checks]\nrun = none\n");
    return run_scenario(build_scenario(cfg, ".", {})).report;
  };

  // opening slower than the kernel mass past the initial gap
  std::string sub = report_of("0, 0.2");
  CHECK(sub.find("two_particle_regime=Subcritical") != std::string::npos);
  CHECK(sub.find("two_particle_critical_velocity=0.5") != std::string::npos);
  CHECK(sub.find("v_infinity") == std::string::npos);

  std::string super = report_of("0, 0.9");
  CHECK(super.find("two_particle_regime=Supercritical") != std::string::npos);
  CHECK(super.find("two_particle_v_infinity=0.4") != std::string::npos);

  // an approaching pair sits outside the phase diagram
  std::string closing = report_of("0, -0.2");
  CHECK(closing.find("two_particle") == std::string::npos);
  CHECK(closing.find("outcome=") != std::string::npos);

  // a third agent disables the closed form
  ConfigMap three = parse_config(
      "[model]\nfamily = symmetric\nkernel = power-law-plain\nbeta = 2\n"
      "K = 1\n[initial]\ndim = 1\nx = 0, 1, 2\nv = 0, 0.1, 0.2\n"
      "[run]\nstep_h = 0.01\nhorizon_t = 2\n[checks]\nrun = none\n");
  CHECK(run_scenario(build_scenario(three, ".", {}))
            .report.find("two_particle") == std::string::npos);
}

TEST_CASE("atomic writes land complete or not at all") {
  std::string dir = temp_dir("atomic");
  std::string path = dir + "/nested/deeper/out.txt";
  write_file_atomic(path, "first\n");
  CHECK(read_file(path) == "first\n");
  write_file_atomic(path, "second\n");
  CHECK(read_file(path) == "second\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));

  // a regular file in the parent chain cannot become a directory
  CHECK_THROWS_AS(write_file_atomic(path + "/impossible.txt", "x"), IoError);
  CHECK_THROWS_AS(read_file(dir + "/missing.txt"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("cli: run is byte-reproducible and matches the pair oracle") {
  std::string dir_a = temp_dir("cli_a");
  std::string dir_b = temp_dir("cli_b");
  CliResult a = run_cli("run -c two-particle-critical -o " + dir_a + " -q");
  CliResult b = run_cli("run -c two-particle-critical -o " + dir_b + " -q");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(a.out.empty());

  std::string series_a = read_file(dir_a + "/series.csv");
  CHECK(series_a == read_file(dir_b + "/series.csv"));
  CHECK(read_file(dir_a + "/report.txt") == read_file(dir_b + "/report.txt"));

  auto rows_text = lines_of(series_a);
  REQUIRE(rows_text.size() == 1002);  // header + 1001 records
  CHECK(rows_text[0] == "t,Dx,Dv,x_sup,v_sup,E_k,E_p,L_plus,L_minus");
  std::vector<std::vector<double>> rows;
  for (size_t i = 1; i < rows_text.size(); ++i)
    rows.push_back(csv_row(rows_text[i]));

  // closed form for the coincident critical pair: Dx(4) = 2, Dv(4) = 1/3
  flock::TwoParticleCase c{0.0, 1.0, 1.0, 2.0};
  const auto* at4 = find_time_row(rows, 4.0);
  REQUIRE(at4 != nullptr);
  CHECK((*at4)[1] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK((*at4)[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  const auto* at10 = find_time_row(rows, 10.0);
  REQUIRE(at10 != nullptr);
  auto exact = flock::critical_trajectory(c, 10.0);
  CHECK((*at10)[1] == doctest::Approx(exact.x).epsilon(1e-7));
  CHECK((*at10)[2] == doctest::Approx(exact.v).epsilon(1e-7));

  std::string report = read_file(dir_a + "/report.txt");
  CHECK(report.find("scenario=two-particle-critical") != std::string::npos);
  CHECK(report.find("outcome=Dispersing") != std::string::npos);
  CHECK(report.find("two_particle_regime=Critical") != std::string::npos);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("cli: check prints the condition block and writes nothing") {
  std::string dir = temp_dir("cli_check");
  CliResult r = run_cli("check -c theorem-T1-demo -o " + dir);
  REQUIRE(r.status == 0);
  CHECK(r.out.find("scenario=theorem-T1-demo") != std::string::npos);
  CHECK(r.out.find("check=symmetric") != std::string::npos);
  CHECK(r.out.find("holds=true") != std::string::npos);
  CHECK(r.out.find("K_star=") != std::string::npos);
  CHECK(r.out.find("outcome=") == std::string::npos);  // no simulation
  CHECK(fs::is_empty(dir));
  fs::remove_all(dir);

  // the normalized family's divergent integral prints an infinite threshold
  CliResult mt = run_cli("check -c mt-fat-tail");
  REQUIRE(mt.status == 0);
  CHECK(mt.out.find("check=motsch-tadmor") != std::string::npos);
  CHECK(mt.out.find("threshold=inf") != std::string::npos);
}

TEST_CASE("cli: exit codes separate user, model, and io failures") {
  std::string dir = temp_dir("cli_err");

  // unknown key: rejected before any output exists
  std::string bad_cfg = dir + "/bad.cfg";
  write_file_atomic(bad_cfg, "[model]\nbogus = 3\n");
  CliResult bad = run_cli("run -c " + bad_cfg + " -o " + dir + "/out");
  CHECK(bad.status == 2);
  CHECK(bad.out.find("kind=validation") != std::string::npos);
  CHECK(bad.out.find("bogus") != std::string::npos);
  CHECK_FALSE(fs::exists(dir + "/out"));

  // stability violation mid-model: the run starts but reports a model error
  std::string unstable = dir + "/unstable.cfg";
  write_file_atomic(unstable,
                    "[model]\nfamily = leadership\nkernel = constant\n"
                    "c = 2\n[initial]\ndim = 1\nx = 0, 1\nv = 0, 1\n"
                    "[topology]\nedges = 0 1\n"
                    "[run]\nstep_h = 0.6\nhorizon_steps = 5\n");
  CliResult model_err = run_cli("run -c " + unstable + " -o " + dir + "/out");
  CHECK(model_err.status == 3);
  CHECK(model_err.out.find("kind=model") != std::string::npos);
  CHECK_FALSE(fs::exists(dir + "/out"));

  // unreadable config path
  CliResult io_err = run_cli("run -c " + dir + "/absent.cfg");
  CHECK(io_err.status == 4);
  CHECK(io_err.out.find("kind=io") != std::string::npos);

  // bad command line (unknown flag) is a usage error, not a crash
  CliResult usage = run_cli("run --no-such-flag");
  CHECK(usage.status != 0);
  CHECK(usage.status != 3);
  fs::remove_all(dir);
}

TEST_CASE("cli: the scenario corpus on disk runs green") {
  std::string dir = temp_dir("cli_corpus");
  struct Expect {
    const char* file;
    const char* outcome;
  };
  const Expect runs[] = {
      {"chain-from-file.cfg", "outcome=Flocking"},
      {"preference-breakaway.cfg", "outcome=Dispersing"},
      {"tabulated-dispersal.cfg", "outcome=Dispersing"},
  };
  for (const auto& e : runs) {
    CAPTURE(e.file);
    std::string out = dir + "/" + e.file;
    CliResult r = run_cli("run -c " + scenario_dir() + "/" + e.file + " -o " +
                          out + " -q");
    REQUIRE(r.status == 0);
    CHECK(read_file(out + "/report.txt").find(e.outcome) !=
          std::string::npos);
  }

  // the tabulated kernel's failed condition shows up in its report
  CHECK(read_file(dir + "/tabulated-dispersal.cfg/report.txt")
            .find("holds=false") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: study writes the convergence table") {
  std::string dir = temp_dir("cli_study");
  std::string cfg = dir + "/study.cfg";
  write_file_atomic(cfg,
                    "[model]\nfamily = symmetric\n"
                    "kernel = power-law-plain\nbeta = 2\nK = 1\n"
                    "[initial]\nx_marginals = uniform:-1:1\n"
                    "v_marginals = uniform:-0.5:0.5\n"
                    "[study]\nsizes = 8, 16\ntrials = 2\nhorizon_t = 0.2\n"
                    "step_h = 0.05\nseed = 3\n");
  CliResult r = run_cli("study -c " + cfg + " -o " + dir + " --threads 2 -q");
  REQUIRE(r.status == 0);
  auto rows = lines_of(read_file(dir + "/study.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "N,trial,distance,runtime_s");
  CHECK(rows[1].rfind("8,0,", 0) == 0);
  CHECK(rows[4].rfind("16,1,", 0) == 0);

  // distances are deterministic across invocations even though times vary
  std::string dir2 = temp_dir("cli_study2");
  CliResult r2 =
      run_cli("study -c " + cfg + " -o " + dir2 + " --threads 1 -q");
  REQUIRE(r2.status == 0);
  auto rows2 = lines_of(read_file(dir2 + "/study.csv"));
  REQUIRE(rows2.size() == 5);
  for (size_t i = 1; i < rows.size(); ++i) {
    auto a = csv_row(rows[i]);
    auto b = csv_row(rows2[i]);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
    CHECK(a[2] == b[2]);  // bitwise equal distance
  }

  // a study command without a [study] section is a config error
  CliResult no_study = run_cli("study -c two-particle-critical");
  CHECK(no_study.status == 2);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("study setup resolves the corpus config") {
  ConfigMap cfg =
      parse_config(read_file(scenario_dir() + "/study-sampling.cfg"));
  Overrides o;
  o.seed = 7;
  o.out_dir = "/tmp/somewhere";
  o.threads = 3;
  flock::StudySetup setup = build_study(cfg, o);
  CHECK(setup.sizes == std::vector<int>{25, 50, 100, 200});
  CHECK(setup.trials == 10);
  CHECK(setup.horizon_t == 2.0);
  CHECK(setup.step_h == 0.02);
  CHECK(setup.seed == 7);  // override beats the file's 42
  CHECK(setup.threads == 3);
  CHECK(setup.out_path == "/tmp/somewhere/study-sampling.csv");
  CHECK(setup.spec.dim() == 2);
  CHECK(std::holds_alternative<flock::Symmetric>(setup.model.law));

  Overrides plain;
  CHECK(build_study(cfg, plain).seed == 42);
}
