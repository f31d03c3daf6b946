// Copyright 2026 The gatecert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gatecert/scenario.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace gatecert;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScenarioConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario_config(in);
}

ScenarioConfig tiny_well_scenario() {
  ScenarioConfig cfg;
  cfg.name = "tiny";
  cfg.kind = ModelKind::PotentialWell;
  cfg.eigenvalue_scale = 2.0;
  cfg.galerkin_dim = 6;
  StageConfig st;
  st.type = StageType::Sinusoid;
  st.amplitude = 0.05;
  st.frequency = 3.0;
  st.duration = 5.0;
  st.step = 0.05;
  cfg.stages.push_back(st);
  cfg.target = {3, 1, 2};
  cfg.budget = 1.0;
  cfg.sample_every = 0.5;
  return cfg;
}

std::string strip_wall_time(std::string dump) {
  return std::regex_replace(dump, std::regex("\"wall_time_seconds\": [^,\\n}]*"), "");
}

}  // namespace

TEST_CASE("bundled configs parse and round-trip", "[scenario]") {
  const std::string dir = GATECERT_CONFIG_DIR;
  for (const std::string name : {"well_gate", "oscillator_gate", "well_gate_rescaled"}) {
    const auto cfg = parse_scenario_config_file(dir + "/" + name + ".cfg");
    CHECK(cfg.name == name);
    const auto again = parse_text(serialize_scenario_config(cfg));
    CHECK(again == cfg);
  }
  const auto well = parse_scenario_config_file(dir + "/well_gate.cfg");
  CHECK(well.kind == ModelKind::PotentialWell);
  CHECK(well.galerkin_dim == 20);
  CHECK(well.eigenvalue_scale == 2.0);
  REQUIRE(well.stages.size() == 2);
  CHECK(well.stages[0].frequency == 3.0);
  CHECK(well.stages[1].frequency == 5.0);
  CHECK(well.target == std::array<int, 3>{3, 1, 2});

  const auto osc = parse_scenario_config_file(dir + "/oscillator_gate.cfg");
  CHECK(osc.kind == ModelKind::PerturbedOscillator);
  CHECK(osc.galerkin_dim == 420);
  REQUIRE(osc.stages.size() == 2);
  CHECK(osc.stages[0].n_periods == 314);
  CHECK(osc.stages[1].n_periods == 222);
  CHECK(osc.stages[0].transition == std::make_pair(1, 2));
}

TEST_CASE("config parser rejects malformed input", "[scenario]") {
  const std::string base =
      "name = x\n[model]\nkind = well\n[galerkin]\nN = 6\n"
      "[stage]\ntype = sinusoid\namplitude = 1\nfrequency = 1\nduration = 1\nstep = 0.1\n";
  CHECK_NOTHROW(parse_text(base));
  CHECK_THROWS_AS(parse_text(base + "bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_text(base + "[nonsense]\n"), ConfigError);
  CHECK_THROWS_AS(parse_text(base + "[gate]\ntarget = 1 1 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_text(base + "[model]\nkind = well\n"), ConfigError);  // duplicate
  CHECK_THROWS_AS(parse_text("name = x\n[galerkin]\nN = 6\n"), ConfigError);  // kind missing
  CHECK_THROWS_AS(parse_text("name = x\n[model]\nkind = well\n"), ConfigError);  // N missing
  CHECK_THROWS_AS(parse_text(base + "[run]\nsample_every = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_text(base + "[budget]\nK = -2\n"), ConfigError);

  // dimension floors: N >= 5 for the well, N >= 4 for the oscillator
  auto small = tiny_well_scenario();
  small.galerkin_dim = 4;
  CHECK_THROWS_AS(validate_scenario_config(small), ConfigError);
  small.kind = ModelKind::PerturbedOscillator;
  CHECK_NOTHROW(validate_scenario_config(small));
  small.galerkin_dim = 3;
  CHECK_THROWS_AS(validate_scenario_config(small), ConfigError);

  auto bad_stage = tiny_well_scenario();
  bad_stage.stages[0].step = 10.0;  // step > duration
  CHECK_THROWS_AS(validate_scenario_config(bad_stage), ConfigError);
}

TEST_CASE("stage phases are anchored to global time", "[scenario]") {
  const auto cfg = parse_scenario_config_file(std::string(GATECERT_CONFIG_DIR) + "/well_gate.cfg");
  const auto control = build_control(cfg);
  CHECK_THAT(control.total_duration(), WithinAbs(138.0, 1e-9));
  // first step of stage two starts at t = 72 and samples cos(5 t) at the
  // midpoint of [72, 72.01]
  const auto& step = control.steps()[7200];
  CHECK_THAT(step.amplitude, WithinRel(0.05 * std::cos(5.0 * 72.005), 1e-9));
}

TEST_CASE("run options rewrite the config as documented", "[scenario]") {
  const auto osc =
      parse_scenario_config_file(std::string(GATECERT_CONFIG_DIR) + "/oscillator_gate.cfg");
  SECTION("resonant periods come from the transition gaps") {
    RunOptions opts;
    opts.resonant_periods = true;
    const auto eff = effective_config(osc, opts);
    CHECK_THAT(eff.stages[0].period, WithinRel(6.0 * kPi, 1e-12));          // gap 1/3
    CHECK_THAT(eff.stages[1].period, WithinRel(30.0 * kPi / 11.0, 1e-12));  // gap 11/15
  }
  SECTION("literal spectrum forces scale one") {
    const auto well =
        parse_scenario_config_file(std::string(GATECERT_CONFIG_DIR) + "/well_gate.cfg");
    RunOptions opts;
    opts.literal_spectrum = true;
    CHECK(effective_config(well, opts).eigenvalue_scale == 1.0);
  }
}

TEST_CASE("identical configs produce byte-identical reports", "[scenario]") {
  const auto cfg = tiny_well_scenario();
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  const std::string ja = strip_wall_time(gate_report_to_json(a.report).dump(2));
  const std::string jb = strip_wall_time(gate_report_to_json(b.report).dump(2));
  CHECK(ja == jb);
  CHECK(ja.find("wall_time") == std::string::npos);
}

TEST_CASE("report JSON round-trips and is integrity-checked on load", "[scenario]") {
  const auto result = run_scenario(tiny_well_scenario());
  auto j = gate_report_to_json(result.report);
  const auto back = gate_report_from_json(j);
  CHECK(back.scenario_name == result.report.scenario_name);
  CHECK(back.l1_total == result.report.l1_total);
  CHECK(back.certificate.total == result.report.certificate.total);
  CHECK(back.commutator_sup == result.report.commutator_sup);
  CHECK(back.config_echo == result.report.config_echo);

  j["certificate"]["total"] = result.report.certificate.total + 1e-3;
  CHECK_THROWS_AS(gate_report_from_json(j), ConfigError);
}

TEST_CASE("reloading the echoed config reproduces the run", "[scenario]") {
  const auto first = run_scenario(tiny_well_scenario());
  std::istringstream echo(first.report.config_echo);
  const auto reloaded = parse_scenario_config(echo);
  const auto second = run_scenario(reloaded);
  CHECK(strip_wall_time(gate_report_to_json(first.report).dump(2)) ==
        strip_wall_time(gate_report_to_json(second.report).dump(2)));
}

TEST_CASE("budget overruns warn but do not fail", "[scenario]") {
  auto cfg = parse_scenario_config_file(std::string(GATECERT_CONFIG_DIR) + "/well_gate.cfg");
  for (auto& st : cfg.stages) st.step = 0.05;  // cheaper run, same budget arithmetic
  std::ostringstream warnings;
  const auto result = run_scenario(cfg, {}, &warnings);
  CHECK_FALSE(result.report.within_budget);
  CHECK(result.report.l1_total > cfg.budget);
  CHECK(warnings.str().find("exceeds the configured budget") != std::string::npos);
  // certificate still conditioned on the configured K
  CHECK(result.report.certificate.k_budget == cfg.budget);
}

TEST_CASE("scenario certificates keep the product identity", "[scenario]") {
  SECTION("well: K (tail + 2 pi sup)") {
    const auto result = run_scenario(tiny_well_scenario());
    const auto& c = result.report.certificate;
    CHECK(c.total == c.k_budget * (c.tail_term + c.commutator_term));
    CHECK_THAT(c.tail_term, WithinRel(well_tail_bound(3, 6), 1e-15));
    CHECK_THAT(c.commutator_term, WithinRel(2.0 * kPi * result.report.commutator_sup, 1e-12));
    // two-sided deviation bound for X(t, s) is twice the measured sup
    CHECK(result.report.two_sided_commutator_bound == 2.0 * result.report.commutator_sup);
    CHECK(result.report.commutator_sup > 0.0);
  }
  SECTION("oscillator: factorial bound stored as bound / K") {
    ScenarioConfig cfg = tiny_well_scenario();
    cfg.kind = ModelKind::PerturbedOscillator;
    cfg.eta = 1.0;
    cfg.eigenvalue_scale = 1.0;
    cfg.galerkin_dim = 12;
    cfg.budget = 2.69;
    cfg.stages[0].frequency = 1.0 / 3.0;
    const auto result = run_scenario(cfg);
    const auto& c = result.report.certificate;
    CHECK(c.commutator_term == 0.0);
    CHECK_THAT(c.total, WithinRel(oscillator_truncation_bound(12, 2.69), 1e-12));
  }
}

TEST_CASE("emitted CSVs follow the schema", "[scenario]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gatecert_csv_test";
  fs::remove_all(dir);

  SECTION("zero control: constant columns, identity gate, tail-only certificate") {
    auto cfg = tiny_well_scenario();
    cfg.stages[0].amplitude = 0.0;
    const auto result = run_scenario(cfg);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK_THAT(result.report.fidelity_matrix(i, j), WithinAbs(i == j ? 1.0 : 0.0, 1e-12));
    const auto& cert = result.report.certificate;
    CHECK(result.report.commutator_sup == 0.0);
    CHECK(cert.total == cert.k_budget * cert.tail_term);
    OutputPaths paths{dir.string(), "zero", "zero.json"};
    const auto written = emit_outputs(result.trajectory, result.report, paths);
    REQUIRE(written.size() == 4);  // 3 CSVs + report

    std::ifstream csv(written[0]);
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,c1_abs,c2_abs,c3_abs");
    std::string row, first_tail;
    std::size_t rows = 0;
    while (std::getline(csv, row)) {
      const auto tail = row.substr(row.find(','));
      if (rows == 0) first_tail = tail;
      CHECK(tail == first_tail);  // |c_i| constant under free drift
      ++rows;
    }
    CHECK(rows == result.trajectory.n_samples());
  }

  SECTION("empty trajectory: header only") {
    Trajectory empty;
    empty.states.resize(1);
    GateReport rep;
    OutputPaths paths{dir.string(), "empty", ""};
    const auto written = emit_outputs(empty, rep, paths);
    REQUIRE(written.size() == 1);
    std::ifstream csv(written[0]);
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header == "t,c1_abs,c2_abs,c3_abs");
    std::string extra;
    CHECK_FALSE(std::getline(csv, extra));
  }

  SECTION("column count is 1 + min(3, N)") {
    Trajectory tiny;
    tiny.sample_times = {0.0};
    tiny.states.resize(1);
    CVector v(2);
    v << 1.0, 0.0;
    tiny.states[0].push_back(v);
    GateReport rep;
    OutputPaths paths{dir.string(), "dim2", ""};
    const auto written = emit_outputs(tiny, rep, paths);
    std::ifstream csv(written[0]);
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header == "t,c1_abs,c2_abs");
  }

  fs::remove_all(dir);
}

TEST_CASE("rescaled well gate: full crossing pattern in the CSV data", "[scenario]") {
  // The doubled-amplitude variant completes the population transfers: the
  // phi_1 trajectory reaches |c2| ~ 1 around t ~ 71 before moving to c3.
  const auto cfg = parse_scenario_config_file(std::string(GATECERT_CONFIG_DIR) +
                                              "/well_gate_rescaled.cfg");
  const auto result = run_scenario(cfg);
  const auto& traj = result.trajectory;
  double best = 0.0, best_t = 0.0;
  for (std::size_t s = 0; s < traj.n_samples(); ++s) {
    const double c2 = std::abs(traj.states[0][s][1]);
    if (c2 > best) {
      best = c2;
      best_t = traj.sample_times[s];
    }
  }
  CHECK(best >= 0.99);
  CHECK_THAT(best_t, WithinAbs(70.7, 5.0));
  for (double f : result.report.transition_fidelities) CHECK(f >= 0.99);
}
