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

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gatecert/bounds.hpp"
#include "gatecert/models.hpp"
#include "gatecert/scenario.hpp"

namespace {

using namespace gatecert;

ModelKind parse_model_kind(const std::string& name) {
  if (name == "well") return ModelKind::PotentialWell;
  if (name == "oscillator") return ModelKind::PerturbedOscillator;
  throw ConfigError("unknown model '" + name + "' (expected well or oscillator)");
}

int cmd_simulate(const std::string& config_path, const std::string& output_dir,
                 bool literal_spectrum, bool resonant_periods) {
  const ScenarioConfig cfg = parse_scenario_config_file(config_path);
  RunOptions opts;
  opts.literal_spectrum = literal_spectrum;
  opts.resonant_periods = resonant_periods;
  const ScenarioResult result = run_scenario(cfg, opts, &std::cerr);
  const GateReport& rep = result.report;

  OutputPaths paths;
  paths.directory = output_dir;
  paths.csv_prefix = cfg.csv_prefix;
  paths.json_path = cfg.json_path;
  const auto written = emit_outputs(result.trajectory, rep, paths);

  std::cout << "scenario " << rep.scenario_name << " (N = " << rep.galerkin_dim << ")\n";
  std::cout << "  control: l1 = " << rep.l1_total << ", duration = " << rep.total_duration
            << (rep.within_budget ? "" : "  [exceeds budget]") << "\n";
  for (std::size_t j = 0; j < rep.transition_fidelities.size(); ++j)
    std::cout << "  |<phi_" << rep.target[j] << ", X(T) phi_" << (j + 1)
              << ">| = " << rep.transition_fidelities[j] << "\n";
  std::cout << "  commutator sup = " << rep.commutator_sup << " (two-sided "
            << rep.two_sided_commutator_bound << ") at t = " << rep.commutator_sup_time << "\n";
  std::cout << "  certificate total = " << rep.certificate.total << "\n";
  std::cout << "  wall time = " << rep.wall_time_seconds << " s\n";
  for (const auto& f : written) std::cout << "  wrote " << f << "\n";
  return 0;
}

int cmd_bounds(const std::string& model_name, int n, double k, double comm_sup) {
  const ModelKind kind = parse_model_kind(model_name);
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["N"] = n;
  j["K"] = k;
  if (kind == ModelKind::PotentialWell) {
    for (int level = 1; level <= 3; ++level) {
      j["tail_bound"]["phi" + std::to_string(level)] = well_tail_bound(level, n);
      j["tail_partial_sum_cap_1e5"]["phi" + std::to_string(level)] =
          well_tail_exact(level, n, 100000);
    }
    const auto cert =
        total_error_bound(k, well_tail_bound(3, n), comm_sup, kPi, n,
                          comm_sup > 0.0 ? "commutator sup supplied on the command line"
                                         : "no commutator term (none supplied)");
    j["certificate"]["tail_term"] = cert.tail_term;
    j["certificate"]["commutator_term"] = cert.commutator_term;
    j["certificate"]["total"] = cert.total;
  } else {
    j["truncation_bound"] = oscillator_truncation_bound(n, k);
    j["tail_coefficient"] = oscillator_tail_coefficient(std::max(3, n), k);
    j["minimal_dimension_for_1e-4"] = minimal_oscillator_dimension(k, 1e-4);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_min_dim(double k, double eps) {
  std::cout << minimal_oscillator_dimension(k, eps) << "\n";
  return 0;
}

int cmd_certify(const std::string& config_path, double comm_sup, bool literal_spectrum,
                bool resonant_periods) {
  RunOptions opts;
  opts.literal_spectrum = literal_spectrum;
  opts.resonant_periods = resonant_periods;
  const ScenarioConfig cfg = effective_config(parse_scenario_config_file(config_path), opts);
  const PiecewiseConstantControl control = build_control(cfg);
  const double l1 = control.l1();
  const double k_budget = cfg.budget > 0.0 ? cfg.budget : l1;

  nlohmann::ordered_json j;
  j["scenario"] = cfg.name;
  j["N"] = cfg.galerkin_dim;
  j["control"]["l1"] = l1;
  j["control"]["total_duration"] = control.total_duration();
  j["control"]["budget_K"] = cfg.budget;
  j["control"]["within_budget"] = cfg.budget <= 0.0 || l1 <= cfg.budget;
  ErrorCertificate cert;
  if (cfg.kind == ModelKind::PotentialWell) {
    cert = total_error_bound(k_budget, well_tail_bound(3, cfg.galerkin_dim), comm_sup, kPi,
                             cfg.galerkin_dim,
                             comm_sup > 0.0 ? "commutator sup supplied on the command line"
                                            : "no propagation: commutator term omitted");
  } else {
    const double bound = oscillator_truncation_bound(cfg.galerkin_dim, k_budget);
    cert = total_error_bound(k_budget, k_budget > 0.0 ? bound / k_budget : 0.0, 0.0, 0.0,
                             cfg.galerkin_dim, "factorial truncation bound stored as bound/K");
  }
  j["certificate"]["K"] = cert.k_budget;
  j["certificate"]["tail_term"] = cert.tail_term;
  j["certificate"]["commutator_term"] = cert.commutator_term;
  j["certificate"]["total"] = cert.total;
  j["certificate"]["provenance"] = cert.provenance;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_check_chain(const std::string& model_name, int depth, double eta, double scale,
                    double tol) {
  const ModelKind kind = parse_model_kind(model_name);
  const QuantumModel model = kind == ModelKind::PerturbedOscillator
                                 ? QuantumModel::oscillator(eta, scale)
                                 : QuantumModel::well(scale);
  const auto report = check_chain(model, adjacent_chain(depth), depth, tol);
  std::cout << "model " << model_name << ", ladder chain, depth " << depth << ", tol " << tol
            << "\n";
  std::cout << "  couples_all: " << (report.couples_all ? "yes" : "no") << "\n";
  std::cout << "  non_resonant: " << (report.non_resonant() ? "yes" : "no") << " ("
            << report.resonance_violations.size() << " gap collisions)\n";
  const std::size_t shown = std::min<std::size_t>(10, report.resonance_violations.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& v = report.resonance_violations[i];
    std::cout << "    chain (" << v.chain_pair.first << "," << v.chain_pair.second
              << ") collides with (" << v.coupled_pair.first << "," << v.coupled_pair.second
              << ") at gap " << v.gap << "\n";
  }
  if (shown < report.resonance_violations.size())
    std::cout << "    ... " << (report.resonance_violations.size() - shown) << " more\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("GATECERT_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"Bilinear quantum control simulator and truncation-error certifier"};
  app.require_subcommand(1);

  std::string config_path, output_dir, model_name = "well";
  bool literal_spectrum = false, resonant_periods = false;
  int n_dim = 20, depth = 100;
  double k_budget = 2.69, eps = 1e-4, comm_sup = 0.0, eta = 1.0, scale = 1.0, tol = 1e-9;

  auto* simulate = app.add_subcommand("simulate", "run a scenario config end to end");
  simulate->add_option("config", config_path, "scenario config file")->required();
  simulate->add_option("--output-dir", output_dir, "directory for CSV/JSON outputs");
  simulate->add_flag("--literal-spectrum", literal_spectrum,
                     "force eigenvalue_scale = 1 (the spelled-out k^2/2 well spectrum)");
  simulate->add_flag("--resonant-periods", resonant_periods,
                     "retune pulse-train periods to 2 pi / gap of their transitions");

  auto* bounds = app.add_subcommand("bounds", "print tail and truncation bounds as JSON");
  bounds->add_option("--model", model_name, "well | oscillator")->required();
  bounds->add_option("--N", n_dim, "Galerkin dimension")->required();
  bounds->add_option("--K", k_budget, "L1 budget")->required();
  bounds->add_option("--comm-sup", comm_sup, "measured commutator sup for the certificate");

  auto* min_dim = app.add_subcommand("min-dim", "smallest oscillator dimension with bound <= eps");
  min_dim->add_option("--K", k_budget, "L1 budget")->required();
  min_dim->add_option("--eps", eps, "error target")->required();

  auto* certify = app.add_subcommand("certify", "bounds-only certificate for a scenario config");
  certify->add_option("config", config_path, "scenario config file")->required();
  certify->add_option("--comm-sup", comm_sup, "commutator sup to include in the certificate");
  certify->add_flag("--literal-spectrum", literal_spectrum, "force eigenvalue_scale = 1");
  certify->add_flag("--resonant-periods", resonant_periods, "retune pulse-train periods");

  auto* chain =
      app.add_subcommand("check-chain", "connectedness and non-resonance of the ladder chain");
  chain->add_option("--model", model_name, "well | oscillator")->required();
  chain->add_option("--depth", depth, "truncation depth");
  chain->add_option("--eta", eta, "oscillator perturbation strength");
  chain->add_option("--scale", scale, "eigenvalue scale");
  chain->add_option("--tol", tol, "gap comparison tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed())
      return cmd_simulate(config_path, output_dir, literal_spectrum, resonant_periods);
    if (bounds->parsed()) return cmd_bounds(model_name, n_dim, k_budget, comm_sup);
    if (min_dim->parsed()) return cmd_min_dim(k_budget, eps);
    if (certify->parsed())
      return cmd_certify(config_path, comm_sup, literal_spectrum, resonant_periods);
    if (chain->parsed()) return cmd_check_chain(model_name, depth, eta, scale, tol);
  } catch (const gatecert::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gatecert::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
