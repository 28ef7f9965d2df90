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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weakmeas/qcore.hpp"

namespace weakmeas {

// Command-line front end: experiment configuration, figure-data
// regeneration, and machine-readable CSV/JSON output.
//
// Configuration precedence, highest first: command-line flags, JSON config
// file (--config), the WEAKMEAS_SEED environment variable (seed only),
// built-in defaults.  Outputs are deterministic for a fixed resolved
// configuration (including the seed), and every emitted file embeds the
// full resolved configuration so results are self-describing.

// ---------------------------------------------------------------- types --

// Sweep of one numeric parameter over an inclusive [start, stop] grid.
struct SweepSpec {
  std::string parameter;   // one of the recognized parameter names
  double start = 0.0;
  double stop = 0.0;
  int points = 0;          // >= 2
  bool log_scale = false;  // geometric spacing; requires start, stop > 0
};

// A fully resolved experiment description.
struct ExperimentConfig {
  // One of: error-rate, loss-rate, correction, fisher, majority, optimize,
  // simulate, figure.
  std::string mode;

  // Numeric parameters by name.  Recognized names: n, phi, aw_re, aw_im,
  // q01, q10, k, trials, seed, p_s, id.  Core parameters always carry a
  // value once resolved; k, p_s and id appear only when explicitly set
  // (absent k means no majority vote, absent p_s selects the
  // fixed-target-value branch of `optimize`).
  std::map<std::string, double> parameters;

  std::optional<SweepSpec> sweep;

  std::string format = "csv";  // csv | json
  std::string out_path;        // empty: standard output
  bool dump_circuit = false;   // print the protocol circuits and stop
};

// Rectangular result set: one named column per output, one row per
// evaluation point.  Cells that are undefined for a parameter combination
// hold quiet NaN (rendered as `nan` in CSV and `null` in JSON).
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// ------------------------------------------------------- configuration --

// Built-in defaults for the core parameters: n=2, phi=0.01, aw_re=30,
// aw_im=0, q01=0.01, q10=0.01, trials=1000000, seed=1.
ExperimentConfig default_config();

// Parse command-line arguments (argv[1:]).  Grammar:
//
//   weakmeas <mode> [--config path] [--key value ...] [--format csv|json]
//            [--out path] [--sweep name --sweep-start a --sweep-stop b
//             --sweep-points m [--sweep-log]] [--dump-circuit]
//
// Applies the precedence described above and validates the result.
// Throws ConfigError naming the offending field.
ExperimentConfig parse_command_line(const std::vector<std::string>& args);

// Read a JSON config file: an object with optional members "mode"
// (string), "parameters" (object of numbers), "sweep" (object with
// "parameter", "start", "stop", "points", optional "scale": "linear" or
// "log"), "format" (string) and "out" (string).  Unknown members are
// rejected.  Throws IoError when the file cannot be read, ConfigError on
// malformed content.
ExperimentConfig load_config_file(const std::string& path);

// Check mode name, parameter names and values, mode/sweep compatibility
// and sweep well-formedness.  Throws ConfigError naming the field.
void validate_config(const ExperimentConfig& config);

// The sweep grid: `points` values from start to stop inclusive, linearly
// or geometrically spaced.  Throws ConfigError on a malformed sweep.
std::vector<double> sweep_values(const SweepSpec& sweep);

// ----------------------------------------------------------- execution --

// Evaluate the configured experiment.  Without a sweep the table holds a
// single row of outputs; with one, the first column carries the swept
// parameter and rows follow sweep order.  Deterministic for a fixed
// config.  Throws ConfigError for configuration faults; numeric domain
// errors from the underlying computations propagate annotated with the
// evaluation point.
ResultTable run(const ExperimentConfig& config);

// The protocol circuits for the configured n, phi and conditioned value,
// serialized in execution order: state preparation, weak interaction,
// postselection rotation.
std::string dump_circuits(const ExperimentConfig& config);

// -------------------------------------------------------------- output --

// Render the table as CSV: `#`-prefixed lines echoing the resolved
// config, a header row of column names, then one line per row with 12
// significant digits.  Byte-identical for identical configs.
std::string render_csv(const ResultTable& table, const ExperimentConfig& config);

// Render as JSON: an object {"config": {...}, "rows": [...]} where rows
// is an array of column-name → value objects (the config member plays the
// same self-description role as the CSV comment header).
std::string render_json(const ResultTable& table, const ExperimentConfig& config);

// Write the table to config.out_path (standard output when empty) in
// config.format.  Throws EmptyTable when the table has no rows, IoError
// when the destination cannot be written, ConfigError on a bad format.
void emit(const ResultTable& table, const ExperimentConfig& config);

// ---------------------------------------------------------- entry point --

// Full program: parse, run, emit.  Returns 0 on success, 2 on
// configuration errors, 3 on numeric/domain errors.  Diagnostics go to
// standard error.
int run_main(int argc, const char* const* argv);

}  // namespace weakmeas
