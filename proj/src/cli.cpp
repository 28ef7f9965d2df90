// Copyright 2026 The weakmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "weakmeas/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"

#include "weakmeas/qubitsim.hpp"
#include "weakmeas/readout.hpp"
#include "weakmeas/weakvalue.hpp"

namespace weakmeas {
namespace {

// ---------- vocabulary ----------

const std::vector<std::string>& known_modes() {
  static const std::vector<std::string> kModes = {
      "error-rate", "loss-rate", "correction", "fisher",
      "majority",   "optimize",  "simulate",   "figure"};
  return kModes;
}

const std::vector<std::string>& known_parameters() {
  static const std::vector<std::string> kNames = {
      "n",   "phi",    "aw_re", "aw_im", "q01", "q10",
      "k",   "trials", "seed",  "p_s",   "id"};
  return kNames;
}

bool name_in(const std::vector<std::string>& pool, const std::string& name) {
  return std::find(pool.begin(), pool.end(), name) != pool.end();
}

// Parameters that hold integer counts (rounded when swept).
bool integer_parameter(const std::string& name) {
  return name == "n" || name == "k" || name == "trials" || name == "seed" ||
         name == "id";
}

// Thrown after printing --help so the entry point can exit cleanly.
struct HelpShown {};

// ---------- numeric formatting ----------

// Shortest representation that round-trips; used for the config echo.
std::string shortest(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

// Fixed 12 significant digits for table cells.
std::string twelve(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

// ---------- parameter access ----------

bool has_parameter(const ExperimentConfig& config, const std::string& name) {
  return config.parameters.count(name) != 0;
}

double get_parameter(const ExperimentConfig& config, const std::string& name) {
  auto it = config.parameters.find(name);
  if (it == config.parameters.end()) {
    throw ConfigError(name + ": required but not set");
  }
  return it->second;
}

int int_parameter(const ExperimentConfig& config, const std::string& name) {
  return static_cast<int>(std::llround(get_parameter(config, name)));
}

void require_integer(const ExperimentConfig& config, const std::string& name) {
  if (!has_parameter(config, name)) return;
  double value = get_parameter(config, name);
  if (!std::isfinite(value) || value != std::floor(value)) {
    throw ConfigError(name + ": must be an integer, got " + shortest(value));
  }
}

// ---------- environment ----------

std::optional<double> seed_from_environment() {
  const char* raw = std::getenv("WEAKMEAS_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  for (const char* c = raw; *c != '\0'; ++c) {
    if (*c < '0' || *c > '9') {
      throw ConfigError(std::string("WEAKMEAS_SEED: must be an unsigned "
                                    "integer, got '") +
                        raw + "'");
    }
  }
  errno = 0;
  unsigned long long parsed = std::strtoull(raw, nullptr, 10);
  if (errno == ERANGE) {
    throw ConfigError("WEAKMEAS_SEED: out of range");
  }
  return static_cast<double>(parsed);
}

// ---------- shared physics helpers ----------

QuantumState zero_pointer() {
  return QuantumState({Complex(1.0, 0.0), Complex(0.0, 0.0)}, {2});
}

ReadoutErrorModel model_of(const ExperimentConfig& config) {
  return ReadoutErrorModel{get_parameter(config, "q01"),
                           get_parameter(config, "q10")};
}

Complex weak_value_of(const ExperimentConfig& config) {
  return Complex(get_parameter(config, "aw_re"), get_parameter(config, "aw_im"));
}

std::optional<MajorityVoteRule> vote_of(const ExperimentConfig& config, int copies) {
  if (!has_parameter(config, "k")) return std::nullopt;
  return MajorityVoteRule{copies, int_parameter(config, "k")};
}

// Relative error rate of the postselection record at finite coupling: the
// branch probabilities follow from the eta weights of the collective
// protocol with an unbiased pointer.
double record_error_rate(int copies, double phi, Complex weak_value,
                         const ReadoutErrorModel& model) {
  EtaWeights eta = eta_weights(copies, phi, weak_value, 0.0);
  double total = static_cast<double>(copies) * copies + std::norm(weak_value);
  return error_rate(copies, eta.eta0 / total, eta.eta1 / total, model);
}

double plateau_or_nan(int copies, double phi, const ReadoutErrorModel& model) {
  double angle = copies * phi;
  if (!(angle > 0.0 && angle < 0.5 * M_PI)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return error_rate_plateau(copies, phi, model);
}

// ---------- single-point evaluation ----------

struct PointResult {
  std::vector<std::string> columns;
  std::vector<double> values;
};

PointResult evaluate_error_rate(const ExperimentConfig& config) {
  int copies = int_parameter(config, "n");
  double phi = get_parameter(config, "phi");
  Complex weak_value = weak_value_of(config);
  ReadoutErrorModel model = model_of(config);
  ErrorRateScaling scaling = error_rate_scaling(copies, weak_value, model);
  return {{"error_rate", "weak_limit_exact", "weak_limit_approx", "plateau"},
          {record_error_rate(copies, phi, weak_value, model), scaling.exact,
           scaling.approx, plateau_or_nan(copies, phi, model)}};
}

PointResult evaluate_loss_rate(const ExperimentConfig& config) {
  int copies = int_parameter(config, "n");
  return {{"loss_rate"},
          {loss_rate(copies, model_of(config), vote_of(config, copies))}};
}

PointResult evaluate_correction(const ExperimentConfig& config) {
  int copies = int_parameter(config, "n");
  EtaWeights eta =
      eta_weights(copies, get_parameter(config, "phi"), weak_value_of(config), 0.0);
  return {{"gamma"},
          {correction_factor(copies, eta.eta0, eta.eta1, model_of(config),
                             vote_of(config, copies))}};
}

PointResult evaluate_fisher(const ExperimentConfig& config) {
  int copies = int_parameter(config, "n");
  return {{"fisher_factor"},
          {fisher_factor(copies, weak_value_of(config), model_of(config),
                         vote_of(config, copies))}};
}

PointResult evaluate_majority(const ExperimentConfig& config) {
  int copies = int_parameter(config, "n");
  ReadoutErrorModel model = model_of(config);
  std::optional<MajorityVoteRule> vote = vote_of(config, copies);
  EtaWeights eta =
      eta_weights(copies, get_parameter(config, "phi"), weak_value_of(config), 0.0);
  return {{"loss_rate", "gamma", "fisher_factor"},
          {loss_rate(copies, model, vote),
           correction_factor(copies, eta.eta0, eta.eta1, model, vote),
           fisher_factor(copies, weak_value_of(config), model, vote)}};
}

// Benchmark optimization problem: conditioned σz on the |+⟩ state.
PointResult evaluate_optimize(const ExperimentConfig& config) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  QuantumState plus({Complex(inv_sqrt2, 0.0), Complex(inv_sqrt2, 0.0)}, {2});
  HermitianObservable observable = pauli_z();
  if (has_parameter(config, "p_s")) {
    BoundedWeakValue best = optimal_weak_value_for_probability(
        plus, observable, get_parameter(config, "p_s"));
    return {{"optimal_weak_value"}, {best.weak_value}};
  }
  OptimalPostselection best =
      optimal_postselection_for_weak_value(plus, observable, weak_value_of(config));
  return {{"p_max"}, {best.p_max}};
}

PointResult evaluate_simulate(const ExperimentConfig& config) {
  int copies = int_parameter(config, "n");
  MonteCarloReport report = monte_carlo_readout(
      copies, get_parameter(config, "phi"), weak_value_of(config),
      zero_pointer(), model_of(config), vote_of(config, copies),
      std::llround(get_parameter(config, "trials")),
      static_cast<std::uint64_t>(std::llround(get_parameter(config, "seed"))));
  return {{"error_rate", "loss_rate", "gamma", "fisher_factor", "plateau",
           "trials", "seed"},
          {report.estimates.error_rate, report.estimates.loss_rate,
           report.estimates.gamma, report.estimates.fisher_factor,
           report.estimates.plateau, static_cast<double>(report.trials),
           static_cast<double>(report.seed)}};
}

PointResult evaluate_point(const ExperimentConfig& config) {
  if (config.mode == "error-rate") return evaluate_error_rate(config);
  if (config.mode == "loss-rate") return evaluate_loss_rate(config);
  if (config.mode == "correction") return evaluate_correction(config);
  if (config.mode == "fisher") return evaluate_fisher(config);
  if (config.mode == "majority") return evaluate_majority(config);
  if (config.mode == "optimize") return evaluate_optimize(config);
  if (config.mode == "simulate") return evaluate_simulate(config);
  throw ConfigError("mode: unknown '" + config.mode + "'");
}

// ---------- figure grids ----------

constexpr int kFigureWeakValues[] = {20, 50, 100, 150};
constexpr int kFigureMaxCopies = 10;
constexpr int kFigureMaxAllowedErrors = 3;

// Relative error rate versus the conditioned value, one curve per qubit
// count from two to six.
ResultTable figure_error_vs_weak_value(const ExperimentConfig& config) {
  double phi = get_parameter(config, "phi");
  ReadoutErrorModel model = model_of(config);
  ResultTable table;
  table.columns = {"aw", "err_n2", "err_n3", "err_n4", "err_n5", "err_n6"};
  const int points = 33;
  for (int i = 0; i < points; ++i) {
    double weak_value = std::pow(10.0, 4.0 * i / (points - 1));
    std::vector<double> row = {weak_value};
    for (int copies = 2; copies <= 6; ++copies) {
      row.push_back(
          record_error_rate(copies, phi, Complex(weak_value, 0.0), model));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Relative error rate versus the qubit count, one curve per conditioned
// value in {20, 50, 100, 150}.
ResultTable figure_error_vs_copies(const ExperimentConfig& config) {
  double phi = get_parameter(config, "phi");
  ReadoutErrorModel model = model_of(config);
  ResultTable table;
  table.columns = {"n", "err_aw20", "err_aw50", "err_aw100", "err_aw150"};
  for (int copies = 1; copies <= kFigureMaxCopies; ++copies) {
    std::vector<double> row = {static_cast<double>(copies)};
    for (int weak_value : kFigureWeakValues) {
      row.push_back(record_error_rate(copies, phi,
                                      Complex(static_cast<double>(weak_value), 0.0),
                                      model));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Error-versus-loss complementarity: loss rate and error rates per
// conditioned value, plus the infinite-conditioned-value plateau.
ResultTable figure_error_vs_loss(const ExperimentConfig& config) {
  double phi = get_parameter(config, "phi");
  ReadoutErrorModel model = model_of(config);
  ResultTable table;
  table.columns = {"n",        "loss_rate", "err_aw20", "err_aw50",
                   "err_aw100", "err_aw150", "plateau"};
  for (int copies = 1; copies <= kFigureMaxCopies; ++copies) {
    std::vector<double> row = {static_cast<double>(copies),
                               loss_rate(copies, model, std::nullopt)};
    for (int weak_value : kFigureWeakValues) {
      row.push_back(record_error_rate(copies, phi,
                                      Complex(static_cast<double>(weak_value), 0.0),
                                      model));
    }
    row.push_back(plateau_or_nan(copies, phi, model));
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Information retention factor versus the qubit count, no vote.
ResultTable figure_fisher_vs_copies(const ExperimentConfig& config) {
  ReadoutErrorModel model = model_of(config);
  ResultTable table;
  table.columns = {"n", "f_aw20", "f_aw50", "f_aw100", "f_aw150"};
  for (int copies = 1; copies <= kFigureMaxCopies; ++copies) {
    std::vector<double> row = {static_cast<double>(copies)};
    for (int weak_value : kFigureWeakValues) {
      row.push_back(fisher_factor(copies,
                                  Complex(static_cast<double>(weak_value), 0.0),
                                  model, std::nullopt));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Information retention factor versus the allowed readout errors, one
// curve per qubit count; undefined cells (2k > n) hold NaN.
ResultTable figure_fisher_vs_allowed_errors(const ExperimentConfig& config) {
  Complex weak_value = weak_value_of(config);
  ReadoutErrorModel model = model_of(config);
  ResultTable table;
  table.columns = {"k"};
  for (int copies = 2; copies <= kFigureMaxCopies; ++copies) {
    table.columns.push_back("f_n" + std::to_string(copies));
  }
  for (int allowed = 0; allowed <= kFigureMaxAllowedErrors; ++allowed) {
    std::vector<double> row = {static_cast<double>(allowed)};
    for (int copies = 2; copies <= kFigureMaxCopies; ++copies) {
      if (2 * allowed > copies) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        row.push_back(fisher_factor(copies, weak_value, model,
                                    MajorityVoteRule{copies, allowed}));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Correction factor versus the allowed readout errors, one curve per
// qubit count; undefined cells (2k > n) hold NaN.
ResultTable figure_gamma_vs_allowed_errors(const ExperimentConfig& config) {
  double phi = get_parameter(config, "phi");
  Complex weak_value = weak_value_of(config);
  ReadoutErrorModel model = model_of(config);
  ResultTable table;
  table.columns = {"k"};
  for (int copies = 2; copies <= kFigureMaxCopies; ++copies) {
    table.columns.push_back("gamma_n" + std::to_string(copies));
  }
  for (int allowed = 0; allowed <= kFigureMaxAllowedErrors; ++allowed) {
    std::vector<double> row = {static_cast<double>(allowed)};
    for (int copies = 2; copies <= kFigureMaxCopies; ++copies) {
      if (2 * allowed > copies) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        EtaWeights eta = eta_weights(copies, phi, weak_value, 0.0);
        row.push_back(correction_factor(copies, eta.eta0, eta.eta1, model,
                                        MajorityVoteRule{copies, allowed}));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ResultTable figure_table(const ExperimentConfig& config) {
  int id = int_parameter(config, "id");
  switch (id) {
    case 4: return figure_error_vs_weak_value(config);
    case 5: return figure_error_vs_copies(config);
    case 6: return figure_error_vs_loss(config);
    case 7: return figure_fisher_vs_copies(config);
    case 8: return figure_fisher_vs_allowed_errors(config);
    case 9: return figure_gamma_vs_allowed_errors(config);
    default: throw ConfigError("id: must be between 4 and 9, got " +
                               std::to_string(id));
  }
}

// ---------- config file ----------

double number_of(const nlohmann::json& value, const std::string& field) {
  if (!value.is_number()) {
    throw ConfigError(field + ": must be a number");
  }
  return value.get<double>();
}

std::string string_of(const nlohmann::json& value, const std::string& field) {
  if (!value.is_string()) {
    throw ConfigError(field + ": must be a string");
  }
  return value.get<std::string>();
}

SweepSpec sweep_from_json(const nlohmann::json& node) {
  if (!node.is_object()) {
    throw ConfigError("sweep: must be an object");
  }
  SweepSpec sweep;
  bool have_start = false, have_stop = false, have_points = false;
  for (const auto& [key, value] : node.items()) {
    if (key == "parameter") {
      sweep.parameter = string_of(value, "sweep.parameter");
    } else if (key == "start") {
      sweep.start = number_of(value, "sweep.start");
      have_start = true;
    } else if (key == "stop") {
      sweep.stop = number_of(value, "sweep.stop");
      have_stop = true;
    } else if (key == "points") {
      double raw = number_of(value, "sweep.points");
      if (raw != std::floor(raw)) {
        throw ConfigError("sweep.points: must be an integer");
      }
      sweep.points = static_cast<int>(raw);
      have_points = true;
    } else if (key == "scale") {
      std::string scale = string_of(value, "sweep.scale");
      if (scale == "log") {
        sweep.log_scale = true;
      } else if (scale == "linear") {
        sweep.log_scale = false;
      } else {
        throw ConfigError("sweep.scale: must be 'linear' or 'log', got '" +
                          scale + "'");
      }
    } else {
      throw ConfigError("sweep: unknown key '" + key + "'");
    }
  }
  if (sweep.parameter.empty()) throw ConfigError("sweep.parameter: required");
  if (!have_start) throw ConfigError("sweep.start: required");
  if (!have_stop) throw ConfigError("sweep.stop: required");
  if (!have_points) throw ConfigError("sweep.points: required");
  return sweep;
}

// ---------- output rendering ----------

void append_config_echo(const ExperimentConfig& config, std::string* out) {
  *out += "# mode: " + config.mode + "\n";
  *out += "# format: " + config.format + "\n";
  *out += "# parameters:";
  for (const auto& [name, value] : config.parameters) {
    *out += " " + name + "=" + shortest(value);
  }
  *out += "\n";
  if (config.sweep) {
    *out += "# sweep: parameter=" + config.sweep->parameter +
            " start=" + shortest(config.sweep->start) +
            " stop=" + shortest(config.sweep->stop) +
            " points=" + std::to_string(config.sweep->points) +
            " scale=" + (config.sweep->log_scale ? "log" : "linear") + "\n";
  }
}

nlohmann::ordered_json config_as_json(const ExperimentConfig& config) {
  nlohmann::ordered_json node;
  node["mode"] = config.mode;
  node["format"] = config.format;
  nlohmann::ordered_json parameters;
  for (const auto& [name, value] : config.parameters) {
    parameters[name] = value;
  }
  node["parameters"] = std::move(parameters);
  if (config.sweep) {
    node["sweep"] = {{"parameter", config.sweep->parameter},
                     {"start", config.sweep->start},
                     {"stop", config.sweep->stop},
                     {"points", config.sweep->points},
                     {"scale", config.sweep->log_scale ? "log" : "linear"}};
  }
  return node;
}

void write_text(const std::string& text, const std::string& destination) {
  if (destination.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(destination, std::ios::binary);
  if (!out) {
    throw IoError("out: cannot open '" + destination + "' for writing");
  }
  out << text;
  out.close();
  if (!out) {
    throw IoError("out: failed writing '" + destination + "'");
  }
}

}  // namespace

// ---------- configuration ----------

ExperimentConfig default_config() {
  ExperimentConfig config;
  config.parameters = {{"n", 2.0},   {"phi", 0.01},  {"aw_re", 30.0},
                       {"aw_im", 0.0}, {"q01", 0.01}, {"q10", 0.01},
                       {"trials", 1e6}, {"seed", 1.0}};
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("config: cannot read '" + path + "'");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError("config: invalid JSON in '" + path + "': " + error.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config: top level must be a JSON object");
  }
  ExperimentConfig config;
  config.format.clear();  // empty fields mean "not set by this file"
  for (const auto& [key, value] : doc.items()) {
    if (key == "mode") {
      config.mode = string_of(value, "mode");
    } else if (key == "parameters") {
      if (!value.is_object()) {
        throw ConfigError("parameters: must be an object");
      }
      for (const auto& [name, entry] : value.items()) {
        config.parameters[name] = number_of(entry, "parameters." + name);
      }
    } else if (key == "sweep") {
      config.sweep = sweep_from_json(value);
    } else if (key == "format") {
      config.format = string_of(value, "format");
    } else if (key == "out") {
      config.out_path = string_of(value, "out");
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{"Collective weak-measurement analytics"};
  app.name("weakmeas");

  std::string mode, config_path, format, out_path;
  bool dump_circuit = false;
  CLI::Option* mode_option =
      app.add_option("mode", mode,
                     "error-rate | loss-rate | correction | fisher | "
                     "majority | optimize | simulate | figure");
  CLI::Option* config_option =
      app.add_option("--config", config_path, "JSON config file");
  CLI::Option* format_option =
      app.add_option("--format", format, "output format: csv | json");
  CLI::Option* out_option =
      app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_flag("--dump-circuit", dump_circuit,
               "print the protocol circuits and exit");

  static const std::map<std::string, std::string> kHelp = {
      {"n", "number of entangled qubits"},
      {"phi", "weak coupling angle"},
      {"aw_re", "conditioned value, real part"},
      {"aw_im", "conditioned value, imaginary part"},
      {"q01", "probability of reading 0 as 1"},
      {"q10", "probability of reading 1 as 0"},
      {"k", "majority vote: allowed readout errors per record"},
      {"trials", "Monte Carlo sample count"},
      {"seed", "Monte Carlo seed"},
      {"p_s", "postselection probability target for optimize"},
      {"id", "figure id (4-9) for figure mode"}};
  std::map<std::string, double> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  for (const std::string& name : known_parameters()) {
    flag_options[name] =
        app.add_option("--" + name, flag_values[name], kHelp.at(name));
  }

  std::string sweep_parameter;
  double sweep_start = 0.0, sweep_stop = 0.0;
  int sweep_points = 0;
  bool sweep_log = false;
  CLI::Option* sweep_option =
      app.add_option("--sweep", sweep_parameter, "parameter name to sweep");
  CLI::Option* sweep_start_option =
      app.add_option("--sweep-start", sweep_start, "first sweep value");
  CLI::Option* sweep_stop_option =
      app.add_option("--sweep-stop", sweep_stop, "last sweep value");
  CLI::Option* sweep_points_option =
      app.add_option("--sweep-points", sweep_points, "number of sweep values");
  CLI::Option* sweep_log_option =
      app.add_flag("--sweep-log", sweep_log, "geometric sweep spacing");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    throw HelpShown{};
  } catch (const CLI::ParseError& error) {
    throw ConfigError("flags: " + std::string(error.what()));
  }

  ExperimentConfig resolved = default_config();
  if (std::optional<double> env_seed = seed_from_environment()) {
    resolved.parameters["seed"] = *env_seed;
  }
  if (config_option->count() > 0) {
    ExperimentConfig from_file = load_config_file(config_path);
    if (!from_file.mode.empty()) resolved.mode = from_file.mode;
    for (const auto& [name, value] : from_file.parameters) {
      resolved.parameters[name] = value;
    }
    if (from_file.sweep) resolved.sweep = from_file.sweep;
    if (!from_file.format.empty()) resolved.format = from_file.format;
    if (!from_file.out_path.empty()) resolved.out_path = from_file.out_path;
  }
  if (mode_option->count() > 0) resolved.mode = mode;
  for (const std::string& name : known_parameters()) {
    if (flag_options.at(name)->count() > 0) {
      resolved.parameters[name] = flag_values.at(name);
    }
  }
  if (format_option->count() > 0) resolved.format = format;
  if (out_option->count() > 0) resolved.out_path = out_path;
  resolved.dump_circuit = dump_circuit;

  bool any_sweep_flag = sweep_option->count() > 0 ||
                        sweep_start_option->count() > 0 ||
                        sweep_stop_option->count() > 0 ||
                        sweep_points_option->count() > 0 ||
                        sweep_log_option->count() > 0;
  if (any_sweep_flag) {
    if (sweep_option->count() == 0) {
      throw ConfigError("sweep: --sweep <parameter> required with sweep flags");
    }
    if (sweep_start_option->count() == 0) {
      throw ConfigError("sweep.start: --sweep-start required");
    }
    if (sweep_stop_option->count() == 0) {
      throw ConfigError("sweep.stop: --sweep-stop required");
    }
    if (sweep_points_option->count() == 0) {
      throw ConfigError("sweep.points: --sweep-points required");
    }
    resolved.sweep =
        SweepSpec{sweep_parameter, sweep_start, sweep_stop, sweep_points, sweep_log};
  }

  validate_config(resolved);
  return resolved;
}

void validate_config(const ExperimentConfig& config) {
  if (config.mode.empty()) {
    throw ConfigError("mode: required (positional argument or config file)");
  }
  if (!name_in(known_modes(), config.mode)) {
    throw ConfigError("mode: unknown '" + config.mode + "'");
  }
  if (config.format != "csv" && config.format != "json") {
    throw ConfigError("format: must be 'csv' or 'json', got '" + config.format +
                      "'");
  }
  for (const auto& [name, value] : config.parameters) {
    if (!name_in(known_parameters(), name)) {
      throw ConfigError("parameters: unknown name '" + name + "'");
    }
    if (!std::isfinite(value)) {
      throw ConfigError(name + ": must be finite");
    }
  }
  for (const char* name : {"n", "k", "trials", "seed", "id"}) {
    require_integer(config, name);
  }
  if (has_parameter(config, "n")) {
    double copies = get_parameter(config, "n");
    if (copies < 1 || copies > kMaxProtocolQubits) {
      throw ConfigError("n: must be between 1 and " +
                        std::to_string(kMaxProtocolQubits));
    }
  }
  if (has_parameter(config, "k")) {
    double allowed = get_parameter(config, "k");
    if (allowed < 0) throw ConfigError("k: must be nonnegative");
    if (config.mode != "figure" && !config.sweep &&
        2.0 * allowed > get_parameter(config, "n")) {
      throw ConfigError("k: must satisfy 2k <= n");
    }
  }
  if (has_parameter(config, "trials") && get_parameter(config, "trials") < 1) {
    throw ConfigError("trials: must be at least 1");
  }
  if (has_parameter(config, "seed") && get_parameter(config, "seed") < 0) {
    throw ConfigError("seed: must be nonnegative");
  }
  if (config.mode == "majority" && !has_parameter(config, "k")) {
    throw ConfigError("k: required for majority mode");
  }
  if (config.mode == "figure") {
    if (!has_parameter(config, "id")) {
      throw ConfigError("id: required for figure mode");
    }
    double id = get_parameter(config, "id");
    if (id < 4 || id > 9) {
      throw ConfigError("id: must be between 4 and 9, got " + shortest(id));
    }
    if (config.sweep) {
      throw ConfigError("sweep: not supported in figure mode");
    }
  }
  if (config.sweep) {
    if (!name_in(known_parameters(), config.sweep->parameter) ||
        config.sweep->parameter == "id") {
      throw ConfigError("sweep.parameter: cannot sweep '" +
                        config.sweep->parameter + "'");
    }
    if (config.sweep->points < 2) {
      throw ConfigError("sweep.points: must be at least 2");
    }
    if (config.sweep->log_scale &&
        (config.sweep->start <= 0.0 || config.sweep->stop <= 0.0)) {
      throw ConfigError("sweep: log scale requires positive start and stop");
    }
  }
}

std::vector<double> sweep_values(const SweepSpec& sweep) {
  if (sweep.points < 2) {
    throw ConfigError("sweep.points: must be at least 2");
  }
  if (sweep.log_scale && (sweep.start <= 0.0 || sweep.stop <= 0.0)) {
    throw ConfigError("sweep: log scale requires positive start and stop");
  }
  std::vector<double> values(sweep.points);
  for (int i = 0; i < sweep.points; ++i) {
    double fraction = static_cast<double>(i) / (sweep.points - 1);
    values[i] = sweep.log_scale
                    ? sweep.start * std::pow(sweep.stop / sweep.start, fraction)
                    : sweep.start + (sweep.stop - sweep.start) * fraction;
  }
  values.front() = sweep.start;
  values.back() = sweep.stop;
  return values;
}

// ---------- execution ----------

ResultTable run(const ExperimentConfig& config) {
  validate_config(config);
  if (config.mode == "figure") {
    try {
      return figure_table(config);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& error) {
      throw std::runtime_error("figure id=" +
                               std::to_string(int_parameter(config, "id")) +
                               ": " + error.what());
    }
  }
  if (!config.sweep) {
    try {
      PointResult point = evaluate_point(config);
      return ResultTable{point.columns, {point.values}};
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& error) {
      throw std::runtime_error(config.mode + ": " + error.what());
    }
  }
  const SweepSpec& sweep = *config.sweep;
  std::vector<double> values = sweep_values(sweep);
  ResultTable table;
  for (double value : values) {
    if (integer_parameter(sweep.parameter)) {
      value = static_cast<double>(std::llround(value));
    }
    ExperimentConfig point_config = config;
    point_config.sweep.reset();
    point_config.parameters[sweep.parameter] = value;
    try {
      validate_config(point_config);
      PointResult point = evaluate_point(point_config);
      if (table.columns.empty()) {
        table.columns.push_back(sweep.parameter);
        table.columns.insert(table.columns.end(), point.columns.begin(),
                             point.columns.end());
      }
      std::vector<double> row = {value};
      row.insert(row.end(), point.values.begin(), point.values.end());
      table.rows.push_back(std::move(row));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& error) {
      throw std::runtime_error(config.mode + " at " + sweep.parameter + "=" +
                               shortest(value) + ": " + error.what());
    }
  }
  return table;
}

std::string dump_circuits(const ExperimentConfig& config) {
  validate_config(config);
  int copies = has_parameter(config, "n") ? int_parameter(config, "n") : 2;
  double phi = get_parameter(config, "phi");
  Complex weak_value = weak_value_of(config);
  std::string text = serialize_circuit(prepare_ghz_circuit(copies).circuit);
  text += serialize_circuit(interaction_circuit(copies, phi));
  text += serialize_circuit(postselect_circuit(copies, weak_value));
  return text;
}

// ---------- output ----------

std::string render_csv(const ResultTable& table, const ExperimentConfig& config) {
  std::string out;
  append_config_echo(config, &out);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const std::vector<double>& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += twelve(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const ResultTable& table, const ExperimentConfig& config) {
  nlohmann::ordered_json root;
  root["config"] = config_as_json(config);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const std::vector<double>& row : table.rows) {
    nlohmann::ordered_json entry;
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      if (std::isnan(row[i])) {
        entry[table.columns[i]] = nullptr;
      } else {
        entry[table.columns[i]] = row[i];
      }
    }
    rows.push_back(std::move(entry));
  }
  root["rows"] = std::move(rows);
  return root.dump(2) + "\n";
}

void emit(const ResultTable& table, const ExperimentConfig& config) {
  if (table.rows.empty()) {
    throw EmptyTable("emit: result table has no rows");
  }
  std::string text;
  if (config.format == "csv") {
    text = render_csv(table, config);
  } else if (config.format == "json") {
    text = render_json(table, config);
  } else {
    throw ConfigError("format: must be 'csv' or 'json', got '" + config.format +
                      "'");
  }
  write_text(text, config.out_path);
}

// ---------- entry point ----------

int run_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    ExperimentConfig config = parse_command_line(args);
    if (config.dump_circuit) {
      write_text(dump_circuits(config), config.out_path);
      return 0;
    }
    ResultTable table = run(config);
    emit(table, config);
    return 0;
  } catch (const HelpShown&) {
    return 0;
  } catch (const ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const IoError& error) {
    std::cerr << "io error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  }
}

}  // namespace weakmeas
