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

#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gatecert/bounds.hpp"
#include "gatecert/common.hpp"
#include "gatecert/controls.hpp"
#include "gatecert/galerkin.hpp"
#include "gatecert/models.hpp"

namespace gatecert {

enum class StageType { Sinusoid, PulseTrain };

struct StageConfig {
  StageType type = StageType::Sinusoid;
  double amplitude = 0.0;
  // sinusoid fields; phase is relative to global time zero
  double frequency = 0.0;
  double phase = 0.0;
  double duration = 0.0;
  double step = 0.0;
  // pulse train fields
  double period = 0.0;
  double pulse_width = 0.0;
  long n_periods = 0;
  // level pair a pulse-train stage is meant to drive; consumed by the
  // resonant-period override
  std::optional<std::pair<int, int>> transition;

  bool operator==(const StageConfig&) const = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ModelKind kind = ModelKind::PotentialWell;
  double eta = 0.0;
  double eigenvalue_scale = 1.0;
  int galerkin_dim = 0;
  std::vector<StageConfig> stages;
  std::array<int, 3> target{1, 2, 3};
  double budget = 0.0;  // a priori L1 budget K; 0 means "not configured"
  double sample_every = 0.0;
  int commutator_block = 3;
  std::string csv_prefix;
  std::string json_path;

  bool operator==(const ScenarioConfig&) const = default;

  QuantumModel model() const {
    return kind == ModelKind::PerturbedOscillator
               ? QuantumModel::oscillator(eta, eigenvalue_scale)
               : QuantumModel::well(eigenvalue_scale);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
    throw ConfigError("bad numeric value for '" + key + "': " + s);
  return v;
}

inline long parse_long(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("bad integer value for '" + key + "': " + s);
  return v;
}

inline std::vector<long> parse_long_list(const std::string& s, const std::string& key) {
  std::istringstream in(s);
  std::vector<long> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_long(tok, key));
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void validate_scenario_config(const ScenarioConfig& c) {
  if (c.name.empty()) throw ConfigError("scenario name must not be empty");
  if (!(c.eta >= 0.0)) throw ConfigError("eta must be nonnegative");
  if (!(c.eigenvalue_scale > 0.0)) throw ConfigError("eigenvalue_scale must be positive");
  const int min_dim = c.kind == ModelKind::PerturbedOscillator ? 4 : 5;
  if (c.galerkin_dim < min_dim)
    throw ConfigError("galerkin N must be >= " + std::to_string(min_dim) + " for this model");
  if (c.stages.empty()) throw ConfigError("at least one control stage is required");
  for (const auto& st : c.stages) {
    if (st.type == StageType::Sinusoid) {
      if (!(st.duration > 0.0)) throw ConfigError("sinusoid stage duration must be positive");
      if (!(st.step > 0.0) || st.step > st.duration)
        throw ConfigError("sinusoid stage step must be in (0, duration]");
      if (!(st.frequency >= 0.0)) throw ConfigError("sinusoid frequency must be nonnegative");
    } else {
      if (!(st.period > 0.0) || !(st.pulse_width > 0.0) || st.pulse_width >= st.period)
        throw ConfigError("pulse train needs 0 < pulse_width < period");
      if (st.n_periods < 1) throw ConfigError("pulse train needs n_periods >= 1");
    }
  }
  std::array<bool, 3> seen{false, false, false};
  for (int v : c.target) {
    if (v < 1 || v > 3 || seen[static_cast<std::size_t>(v - 1)])
      throw ConfigError("gate target must be a permutation of 1 2 3");
    seen[static_cast<std::size_t>(v - 1)] = true;
  }
  if (!(c.budget >= 0.0)) throw ConfigError("budget K must be nonnegative");
  if (!(c.sample_every >= 0.0)) throw ConfigError("sample_every must be nonnegative");
  if (c.commutator_block < 0 || c.commutator_block > c.galerkin_dim)
    throw ConfigError("commutator_block must be in [0, N]");
}

// Flat key/value + repeatable-[stage] config format.  '#' starts a
// comment, '[section]' opens a table, 'key = value' assigns.  Unknown
// sections and keys are errors.
inline ScenarioConfig parse_scenario_config(std::istream& in) {
  ScenarioConfig cfg;
  cfg.commutator_block = 3;
  std::string section;
  std::vector<std::string> seen_sections;
  bool kind_set = false, n_set = false, target_set = false;
  std::string line;
  int lineno = 0;

  auto fail = [&](const std::string& msg) {
    throw ConfigError("config line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "galerkin" && section != "stage" &&
          section != "gate" && section != "budget" && section != "run" && section != "output")
        fail("unknown section [" + section + "]");
      if (section == "stage") {
        cfg.stages.emplace_back();
      } else {
        for (const auto& s : seen_sections)
          if (s == section) fail("duplicate section [" + section + "]");
        seen_sections.push_back(section);
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail("expected 'key = value'");

    if (section.empty()) {
      if (key == "name") {
        cfg.name = value;
      } else {
        fail("unknown top-level key '" + key + "'");
      }
    } else if (section == "model") {
      if (key == "kind") {
        if (value == "well") {
          cfg.kind = ModelKind::PotentialWell;
        } else if (value == "oscillator") {
          cfg.kind = ModelKind::PerturbedOscillator;
        } else {
          fail("model kind must be 'well' or 'oscillator'");
        }
        kind_set = true;
      } else if (key == "eta") {
        cfg.eta = detail::parse_double(value, key);
      } else if (key == "eigenvalue_scale") {
        cfg.eigenvalue_scale = detail::parse_double(value, key);
      } else {
        fail("unknown [model] key '" + key + "'");
      }
    } else if (section == "galerkin") {
      if (key == "N") {
        cfg.galerkin_dim = static_cast<int>(detail::parse_long(value, key));
        n_set = true;
      } else {
        fail("unknown [galerkin] key '" + key + "'");
      }
    } else if (section == "stage") {
      auto& st = cfg.stages.back();
      if (key == "type") {
        if (value == "sinusoid") {
          st.type = StageType::Sinusoid;
        } else if (value == "pulse_train") {
          st.type = StageType::PulseTrain;
        } else {
          fail("stage type must be 'sinusoid' or 'pulse_train'");
        }
      } else if (key == "amplitude") {
        st.amplitude = detail::parse_double(value, key);
      } else if (key == "frequency") {
        st.frequency = detail::parse_double(value, key);
      } else if (key == "phase") {
        st.phase = detail::parse_double(value, key);
      } else if (key == "duration") {
        st.duration = detail::parse_double(value, key);
      } else if (key == "step") {
        st.step = detail::parse_double(value, key);
      } else if (key == "period") {
        st.period = detail::parse_double(value, key);
      } else if (key == "pulse_width") {
        st.pulse_width = detail::parse_double(value, key);
      } else if (key == "n_periods") {
        st.n_periods = detail::parse_long(value, key);
      } else if (key == "transition") {
        const auto pair = detail::parse_long_list(value, key);
        if (pair.size() != 2) fail("transition needs two level indices");
        st.transition = std::make_pair(static_cast<int>(pair[0]), static_cast<int>(pair[1]));
      } else {
        fail("unknown [stage] key '" + key + "'");
      }
    } else if (section == "gate") {
      if (key == "target") {
        const auto t = detail::parse_long_list(value, key);
        if (t.size() != 3) fail("gate target needs three entries");
        for (int i = 0; i < 3; ++i) cfg.target[static_cast<std::size_t>(i)] = static_cast<int>(t[static_cast<std::size_t>(i)]);
        target_set = true;
      } else {
        fail("unknown [gate] key '" + key + "'");
      }
    } else if (section == "budget") {
      if (key == "K") {
        cfg.budget = detail::parse_double(value, key);
      } else {
        fail("unknown [budget] key '" + key + "'");
      }
    } else if (section == "run") {
      if (key == "sample_every") {
        cfg.sample_every = detail::parse_double(value, key);
      } else if (key == "commutator_block") {
        cfg.commutator_block = static_cast<int>(detail::parse_long(value, key));
      } else {
        fail("unknown [run] key '" + key + "'");
      }
    } else if (section == "output") {
      if (key == "csv_prefix") {
        cfg.csv_prefix = value;
      } else if (key == "json") {
        cfg.json_path = value;
      } else {
        fail("unknown [output] key '" + key + "'");
      }
    }
  }

  if (!kind_set) throw ConfigError("config: [model] kind is required");
  if (!n_set) throw ConfigError("config: [galerkin] N is required");
  (void)target_set;  // optional; identity permutation by default
  validate_scenario_config(cfg);
  return cfg;
}

inline ScenarioConfig parse_scenario_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_scenario_config(in);
}

// Canonical text form; parse(serialize(c)) == c.
inline std::string serialize_scenario_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "name = " << c.name << "\n\n";
  out << "[model]\n";
  out << "kind = " << (c.kind == ModelKind::PotentialWell ? "well" : "oscillator") << "\n";
  if (c.kind == ModelKind::PerturbedOscillator)
    out << "eta = " << detail::format_double(c.eta) << "\n";
  out << "eigenvalue_scale = " << detail::format_double(c.eigenvalue_scale) << "\n\n";
  out << "[galerkin]\n";
  out << "N = " << c.galerkin_dim << "\n";
  for (const auto& st : c.stages) {
    out << "\n[stage]\n";
    if (st.type == StageType::Sinusoid) {
      out << "type = sinusoid\n";
      out << "amplitude = " << detail::format_double(st.amplitude) << "\n";
      out << "frequency = " << detail::format_double(st.frequency) << "\n";
      out << "phase = " << detail::format_double(st.phase) << "\n";
      out << "duration = " << detail::format_double(st.duration) << "\n";
      out << "step = " << detail::format_double(st.step) << "\n";
    } else {
      out << "type = pulse_train\n";
      out << "amplitude = " << detail::format_double(st.amplitude) << "\n";
      out << "period = " << detail::format_double(st.period) << "\n";
      out << "pulse_width = " << detail::format_double(st.pulse_width) << "\n";
      out << "n_periods = " << st.n_periods << "\n";
    }
    if (st.transition)
      out << "transition = " << st.transition->first << " " << st.transition->second << "\n";
  }
  out << "\n[gate]\n";
  out << "target = " << c.target[0] << " " << c.target[1] << " " << c.target[2] << "\n";
  out << "\n[budget]\n";
  out << "K = " << detail::format_double(c.budget) << "\n";
  out << "\n[run]\n";
  out << "sample_every = " << detail::format_double(c.sample_every) << "\n";
  out << "commutator_block = " << c.commutator_block << "\n";
  out << "\n[output]\n";
  if (!c.csv_prefix.empty()) out << "csv_prefix = " << c.csv_prefix << "\n";
  if (!c.json_path.empty()) out << "json = " << c.json_path << "\n";
  return out.str();
}

// The full control law of a scenario.  Sinusoid phases are interpreted in
// global time: a stage starting at t0 contributes cos(w t + phase) for
// t in [t0, t0 + duration], so consecutive literal cos(w t) segments are
// written with phase = 0.
inline PiecewiseConstantControl build_control(const ScenarioConfig& c) {
  PiecewiseConstantControl control;
  double t_start = 0.0;
  for (const auto& st : c.stages) {
    if (st.type == StageType::Sinusoid) {
      control = concat(control, discretize_sinusoid(st.amplitude, st.frequency,
                                                    st.phase + st.frequency * t_start,
                                                    st.duration, st.step));
      t_start += st.duration;
    } else {
      control = concat(control,
                       pulse_train(st.period, st.pulse_width, st.amplitude, st.n_periods));
      t_start += st.period * static_cast<double>(st.n_periods);
    }
  }
  return control;
}

struct RunOptions {
  // Force eigenvalue_scale = 1: the spelled-out spectrum convention
  // (k^2/2 for the well), off-resonant against the bundled drives.
  bool literal_spectrum = false;
  // Replace each pulse-train period by 2 pi / gap of its annotated
  // transition, making the kick train phase-coherent.
  bool resonant_periods = false;
};

// Applies CLI-level overrides and returns the effective config.
inline ScenarioConfig effective_config(ScenarioConfig cfg, const RunOptions& opts) {
  if (opts.literal_spectrum) cfg.eigenvalue_scale = 1.0;
  if (opts.resonant_periods) {
    const QuantumModel model = cfg.model();
    for (auto& st : cfg.stages) {
      if (st.type != StageType::PulseTrain || !st.transition) continue;
      const double gap = std::abs(eigenvalue(model, st.transition->first) -
                                  eigenvalue(model, st.transition->second));
      if (gap <= 0.0) throw ConfigError("resonant periods: degenerate transition gap");
      st.period = 2.0 * kPi / gap;
      if (st.pulse_width >= st.period)
        throw ConfigError("resonant periods: pulse width exceeds the resonant period");
    }
  }
  return cfg;
}

struct GateReport {
  std::string scenario_name;
  ModelKind kind = ModelKind::PotentialWell;
  double eta = 0.0;
  double eigenvalue_scale = 1.0;
  int galerkin_dim = 0;
  double l1_total = 0.0;
  double total_duration = 0.0;
  double budget = 0.0;
  bool within_budget = true;
  RMatrix fidelity_matrix;
  std::vector<int> target;
  std::vector<double> transition_fidelities;
  double commutator_sup = 0.0;
  double commutator_sup_time = 0.0;
  double two_sided_commutator_bound = 0.0;
  ErrorCertificate certificate;
  double min_state_norm = 1.0;
  double max_state_norm = 1.0;
  double final_unitarity_defect = 0.0;
  double wall_time_seconds = 0.0;
  std::string config_echo;
};

struct ScenarioResult {
  GateReport report;
  Trajectory trajectory;
};

// compress -> build control -> check the budget -> propagate -> measure
// fidelities and the block deviation -> assemble the certificate.
inline ScenarioResult run_scenario(const ScenarioConfig& input_cfg, const RunOptions& opts = {},
                                   std::ostream* warnings = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig cfg = effective_config(input_cfg, opts);
  validate_scenario_config(cfg);

  const QuantumModel model = cfg.model();
  const GalerkinSystem sys(model, cfg.galerkin_dim);
  const PiecewiseConstantControl control = build_control(cfg);

  GateReport rep;
  rep.scenario_name = cfg.name;
  rep.kind = cfg.kind;
  rep.eta = cfg.eta;
  rep.eigenvalue_scale = cfg.eigenvalue_scale;
  rep.galerkin_dim = cfg.galerkin_dim;
  rep.l1_total = control.l1();
  rep.total_duration = control.total_duration();
  rep.budget = cfg.budget;
  rep.within_budget = cfg.budget <= 0.0 || rep.l1_total <= cfg.budget;
  if (!rep.within_budget && warnings != nullptr)
    *warnings << "warning: control L1 " << rep.l1_total << " exceeds the configured budget K = "
              << cfg.budget << "; the certificate is conditioned on the configured K\n";

  PropagateOptions popts;
  popts.sample_every = cfg.sample_every;
  popts.track_propagator = true;
  popts.commutator_block = cfg.commutator_block;
  Trajectory traj = propagate(sys, control, std::vector<int>{1, 2, 3}, popts);

  const auto fid = gate_fidelities(traj, {cfg.target.begin(), cfg.target.end()});
  rep.fidelity_matrix = fid.moduli;
  rep.target.assign(cfg.target.begin(), cfg.target.end());
  rep.transition_fidelities = fid.per_transition;
  rep.commutator_sup = traj.commutator_sup;
  rep.commutator_sup_time = traj.commutator_sup_time;
  rep.two_sided_commutator_bound = 2.0 * traj.commutator_sup;

  const double k_budget = cfg.budget > 0.0 ? cfg.budget : rep.l1_total;
  if (cfg.kind == ModelKind::PotentialWell) {
    rep.certificate = total_error_bound(
        k_budget, well_tail_bound(3, cfg.galerkin_dim), traj.commutator_sup, kPi,
        cfg.galerkin_dim,
        "tail: sqrt(2)/(N-4)^{5/2} well coupling tail at N=" + std::to_string(cfg.galerkin_dim) +
            "; commutator: 2 * pi * measured block deviation sup (" +
            detail::format_double(traj.commutator_sup) + "); K = " +
            detail::format_double(k_budget));
  } else {
    // The coupling of the oscillator is unbounded, so there is no
    // commutator term; the factorial chain already contains every power
    // of K, hence tail_term stores bound / K to keep the certificate
    // identity total = K * tail_term intact.
    const double bound = oscillator_truncation_bound(cfg.galerkin_dim, k_budget);
    rep.certificate = total_error_bound(
        k_budget, k_budget > 0.0 ? bound / k_budget : 0.0, 0.0, 0.0, cfg.galerkin_dim,
        "factorial truncation bound " + detail::format_double(bound) + " at N=" +
            std::to_string(cfg.galerkin_dim) + ", stored as bound/K; no commutator term "
            "(unbounded coupling); K = " + detail::format_double(k_budget));
  }

  rep.min_state_norm = traj.min_state_norm;
  rep.max_state_norm = traj.max_state_norm;
  const Eigen::Index n = sys.dim();
  rep.final_unitarity_defect =
      (traj.final_propagator * traj.final_propagator.adjoint() - CMatrix::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  rep.config_echo = serialize_scenario_config(cfg);
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ScenarioResult{std::move(rep), std::move(traj)};
}

inline nlohmann::ordered_json gate_report_to_json(const GateReport& rep) {
  nlohmann::ordered_json j;
  j["scenario"] = rep.scenario_name;
  j["model"]["kind"] = rep.kind == ModelKind::PotentialWell ? "well" : "oscillator";
  j["model"]["eta"] = rep.eta;
  j["model"]["eigenvalue_scale"] = rep.eigenvalue_scale;
  j["galerkin_dim"] = rep.galerkin_dim;
  j["control"]["l1"] = rep.l1_total;
  j["control"]["total_duration"] = rep.total_duration;
  j["control"]["budget_K"] = rep.budget;
  j["control"]["within_budget"] = rep.within_budget;
  j["fidelity"]["target"] = rep.target;
  auto matrix = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < rep.fidelity_matrix.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < rep.fidelity_matrix.cols(); ++k)
      row.push_back(rep.fidelity_matrix(i, k));
    matrix.push_back(row);
  }
  j["fidelity"]["matrix"] = matrix;
  j["fidelity"]["transitions"] = rep.transition_fidelities;
  j["commutator"]["sup"] = rep.commutator_sup;
  j["commutator"]["sup_time"] = rep.commutator_sup_time;
  j["commutator"]["two_sided_bound"] = rep.two_sided_commutator_bound;
  j["certificate"]["K"] = rep.certificate.k_budget;
  j["certificate"]["N"] = rep.certificate.galerkin_dim;
  j["certificate"]["tail_term"] = rep.certificate.tail_term;
  j["certificate"]["commutator_term"] = rep.certificate.commutator_term;
  j["certificate"]["total"] = rep.certificate.total;
  j["certificate"]["provenance"] = rep.certificate.provenance;
  j["diagnostics"]["min_state_norm"] = rep.min_state_norm;
  j["diagnostics"]["max_state_norm"] = rep.max_state_norm;
  j["diagnostics"]["final_unitarity_defect"] = rep.final_unitarity_defect;
  j["config_echo"] = rep.config_echo;
  j["wall_time_seconds"] = rep.wall_time_seconds;
  return j;
}

// Rebuilds a report from its JSON form, recomputing the certificate
// identity as an integrity check.
inline GateReport gate_report_from_json(const nlohmann::ordered_json& j) {
  GateReport rep;
  rep.scenario_name = j.at("scenario").get<std::string>();
  rep.kind = j.at("model").at("kind").get<std::string>() == "well" ? ModelKind::PotentialWell
                                                                   : ModelKind::PerturbedOscillator;
  rep.eta = j.at("model").at("eta").get<double>();
  rep.eigenvalue_scale = j.at("model").at("eigenvalue_scale").get<double>();
  rep.galerkin_dim = j.at("galerkin_dim").get<int>();
  rep.l1_total = j.at("control").at("l1").get<double>();
  rep.total_duration = j.at("control").at("total_duration").get<double>();
  rep.budget = j.at("control").at("budget_K").get<double>();
  rep.within_budget = j.at("control").at("within_budget").get<bool>();
  rep.target = j.at("fidelity").at("target").get<std::vector<int>>();
  const auto& matrix = j.at("fidelity").at("matrix");
  rep.fidelity_matrix.resize(static_cast<Eigen::Index>(matrix.size()),
                             static_cast<Eigen::Index>(matrix.empty() ? 0 : matrix[0].size()));
  for (std::size_t i = 0; i < matrix.size(); ++i)
    for (std::size_t k = 0; k < matrix[i].size(); ++k)
      rep.fidelity_matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          matrix[i][k].get<double>();
  rep.transition_fidelities = j.at("fidelity").at("transitions").get<std::vector<double>>();
  for (double f : rep.transition_fidelities)
    if (!(f >= 0.0 && f <= 1.0 + 1e-9)) throw ConfigError("report: fidelity out of [0, 1]");
  rep.commutator_sup = j.at("commutator").at("sup").get<double>();
  rep.commutator_sup_time = j.at("commutator").at("sup_time").get<double>();
  rep.two_sided_commutator_bound = j.at("commutator").at("two_sided_bound").get<double>();
  rep.certificate.k_budget = j.at("certificate").at("K").get<double>();
  rep.certificate.galerkin_dim = j.at("certificate").at("N").get<int>();
  rep.certificate.tail_term = j.at("certificate").at("tail_term").get<double>();
  rep.certificate.commutator_term = j.at("certificate").at("commutator_term").get<double>();
  rep.certificate.total = j.at("certificate").at("total").get<double>();
  rep.certificate.provenance = j.at("certificate").at("provenance").get<std::string>();
  if (rep.certificate.total !=
      rep.certificate.k_budget * (rep.certificate.tail_term + rep.certificate.commutator_term))
    throw ConfigError("report: certificate total is inconsistent with its parts");
  rep.min_state_norm = j.at("diagnostics").at("min_state_norm").get<double>();
  rep.max_state_norm = j.at("diagnostics").at("max_state_norm").get<double>();
  rep.final_unitarity_defect = j.at("diagnostics").at("final_unitarity_defect").get<double>();
  rep.config_echo = j.at("config_echo").get<std::string>();
  rep.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  return rep;
}

struct OutputPaths {
  std::string directory;   // prepended to the relative names below
  std::string csv_prefix;  // one CSV per initial state: <prefix>_phi<j>.csv
  std::string json_path;
};

// Writes the trajectory CSVs (t, |c1|, |c2|, |c3| at 12 significant
// digits, LF endings) and the JSON report.  Returns the written paths.
inline std::vector<std::string> emit_outputs(const Trajectory& traj, const GateReport& rep,
                                             const OutputPaths& paths) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  const fs::path dir = paths.directory.empty() ? fs::path(".") : fs::path(paths.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);

  if (!paths.csv_prefix.empty()) {
    int ncols = 3;  // 1 + min(3, N) columns
    if (!traj.states.empty() && !traj.states[0].empty())
      ncols = static_cast<int>(std::min<Eigen::Index>(3, traj.states[0][0].size()));
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
      const fs::path file = dir / (paths.csv_prefix + "_phi" + std::to_string(s + 1) + ".csv");
      std::ofstream out(file, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open CSV output: " + file.string());
      out << "t";
      for (int cidx = 1; cidx <= ncols; ++cidx) out << ",c" << cidx << "_abs";
      out << "\n";
      char buf[64];
      for (std::size_t row = 0; row < traj.sample_times.size(); ++row) {
        std::snprintf(buf, sizeof(buf), "%.12g", traj.sample_times[row]);
        out << buf;
        for (int cidx = 0; cidx < ncols; ++cidx) {
          std::snprintf(buf, sizeof(buf), "%.12g", std::abs(traj.states[s][row][cidx]));
          out << ',' << buf;
        }
        out << "\n";
      }
      if (!out) throw std::runtime_error("failed writing CSV output: " + file.string());
      written.push_back(file.string());
    }
  }

  if (!paths.json_path.empty()) {
    const fs::path file = dir / paths.json_path;
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open JSON output: " + file.string());
    out << gate_report_to_json(rep).dump(2) << "\n";
    if (!out) throw std::runtime_error("failed writing JSON output: " + file.string());
    written.push_back(file.string());
  }
  return written;
}

}  // namespace gatecert
