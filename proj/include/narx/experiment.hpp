#pragma once

/** @file
 * Experiment configuration: one document that describes the system, the
 * excitation, the candidate pool, the estimators, the noise level and the
 * seeds of a run.
 *
 * Values are resolved in three layers, later ones winning:
 *   1. built-in defaults for the selected system,
 *   2. the fields present in the configuration file,
 *   3. command-line flags.
 */

#include "narx/evaluation.hpp"
#include "narx/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace narx {

struct SineValidation {
  double amplitude = 1.0;
  double frequency = 0.1;
  double phase = 0.0;
  double offset = 0.0;
  std::size_t length = 1000;
};

struct ExperimentConfig {
  /// "heating", "piezo", "valve" or "csv".
  std::string system = "heating";
  /// Data record for system "csv" (or measured valve data).
  std::string data_path;
  InputDesignSpec design;
  CandidateSpec candidates;
  SelectionConfig selection;
  double noise_ratio = 0.05;
  std::uint64_t seed = 1;
  ValidationMode validation_mode = ValidationMode::FreeRun;
  SineValidation sine;
  /// Monte Carlo sweep; ratios are fractions (0.05 = 5 %).
  std::vector<double> mc_ratios{0.0, 0.1, 0.2};
  std::size_t mc_trials = 10;
  unsigned mc_threads = 0;
  std::string output_dir;

  /// Checks meta bounds, the design spec and that data_path exists when used.
  void validate() const;
  PipelineConfig pipeline() const;
  /// Simulated plant for this configuration.  Throws DataUnavailableError for
  /// the valve, whose measurements are not part of the distribution.
  BenchmarkSystem benchmark() const;
};

/// Built-in defaults for a system name.
ExperimentConfig default_config(const std::string& system);

io::Json config_to_json(const ExperimentConfig& config);
/// Overlays the fields present in j onto base.  Unknown keys are rejected so
/// typos do not pass silently; messages name the offending key path.
ExperimentConfig config_from_json(const io::Json& j, ExperimentConfig base);
/// Reads a file: its "system" key picks the defaults, the rest overlays them.
ExperimentConfig load_config(const std::filesystem::path& path);

/// "0:2:30" (start:step:stop, inclusive) or "0,10,20".
std::vector<double> parse_number_list(const std::string& text);

}  // namespace narx
