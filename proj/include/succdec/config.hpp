#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "succdec/fsmc.hpp"
#include "succdec/inforate.hpp"

namespace succdec {

enum class Task { mu_curve, rates, optimize_weights, exit, exponent, plan, bound_check };

std::string task_name(Task t);
std::optional<Task> parse_task(const std::string &s);

/// One problem with a config file, tied to a "section.key" field.
struct Diagnostic {
  std::string field;
  std::string message;
};

/// Experiment description read from an INI file. See README for the grammar.
struct ExperimentConfig {
  // [channel]
  double alpha = 0.95;
  int quant_levels = 6;
  double es_n0_db = 3.0;
  std::string model_path;  // overrides alpha / levels when set

  // [interleaver]
  std::string family = "rectangular";  // rectangular | binary | random
  int levels = 3;
  int reps = 0;                 // binary only; 0 means default_binary_reps
  std::vector<double> weights;  // random only, empty with optimize
  bool optimize = false;

  // [mc]
  McConfig mc;

  // [task]
  Task task = Task::rates;
  std::size_t grid_points = 21;
  std::size_t refine = 0;
  std::string mu_curve;                     // pilot-utility CSV; sampled when empty
  std::string decoder_family = "synthetic";  // CSV path or "synthetic"
  double d_t = 0.0;
  std::size_t starts = 200;
  std::size_t exit_grid = 51;
  std::string prior = "gaussian";  // gaussian | erasure
  bool with_capacity = true;
  std::vector<int> candidates{2, 3, 4, 6, 8};
  std::vector<std::size_t> lengths{100, 1000, 10000, 100000, 1000000};
  double p_bar_e = 1e-3;

  // [output]
  std::string out_dir;

  std::string source_text;  // raw file contents, hashed into the manifest
  std::string base_dir;     // directory of the config file, for relative inputs

  /// Relative input paths resolve against the config file's directory.
  std::string resolve(const std::string &path) const;
};

struct ParsedConfig {
  ExperimentConfig config;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

ParsedConfig parse_config_text(const std::string &text, const std::string &base_dir = ".");
ParsedConfig load_config(const std::string &path);

/// Semantic checks on a parsed config (file existence, weight sums, ranges).
std::vector<Diagnostic> validate(const ExperimentConfig &c);

std::string format_diagnostic(const Diagnostic &d);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string &data);

StateModel build_channel(const ExperimentConfig &c);

} // namespace succdec
