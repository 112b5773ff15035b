#pragma once

/** @file
 * Model-quality metrics, validation runs and the Monte Carlo noise sweep.
 */

#include "narx/benchmarks.hpp"
#include "narx/core.hpp"
#include "narx/hysteresis.hpp"
#include "narx/input_design.hpp"
#include "narx/structure_selection.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace narx {

/// sum |y - yhat| / (N |max y - min y|), in percent.
double mape(std::span<const double> y, std::span<const double> yhat);

enum class ValidationMode { OneStep, FreeRun };

struct ValidationResult {
  /// Predictions for samples first..N-1.
  std::vector<double> prediction;
  std::size_t first = 0;
  double mape = 0.0;
  bool diverged = false;
};

/// Free-run validation is seeded with the measured outputs preceding the
/// first predicted sample.  A diverged run reports an infinite MAPE.
ValidationResult validate(const NarxModel& model, const TimeSeriesData& data, ValidationMode mode);

/// Lagged-variable pool and optional hysteresis exclusion for a pipeline run.
struct CandidateSpec {
  int degree = 3;
  int ny = 1;
  int nu = 1;
  int delay = 1;
  std::vector<Variable> variables{Variable::Output, Variable::Input};
  bool include_constant = false;
  std::optional<HysteresisCandidateConfig> hysteresis;

  CandidateSet build() const;
};

struct PipelineConfig {
  InputDesignSpec design;
  CandidateSpec candidates;
  SelectionConfig selection;
  double noise_ratio = 0.05;
  ValidationMode validation_mode = ValidationMode::FreeRun;
};

/// Data record from simulating a benchmark, decimated to the identification
/// rate, with output noise injected.  y_clean keeps the noise-free output.
struct GeneratedData {
  TimeSeriesData data;
  std::vector<double> y_clean;
};
GeneratedData generate_data(const BenchmarkSystem& system, std::span<const double> u,
                            double noise_ratio, Rng& rng);

struct MonteCarloReport {
  std::vector<double> ratios;
  std::vector<double> mape_mean;
  std::vector<double> mape_std;
  std::vector<int> failures;
  std::size_t trials = 0;
  /// seeds[r][t] drives the input design and the noise of trial t at ratio r.
  std::vector<std::vector<std::uint64_t>> seeds;
  /// mapes[r][t]; NaN marks a failed trial.
  std::vector<std::vector<double>> mapes;
  /// Structure chosen in each trial, as term strings joined by " + ".
  std::vector<std::vector<std::string>> structures;
};

/// Deterministic 64-bit seed derivation (SplitMix64 over the inputs).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/**
 * For every ratio, runs `trials` independent identifications (design input
 * -> simulate -> add noise -> select structure -> estimate), each driven by
 * its own derived seed, and scores each model by free-run MAPE on one
 * noise-free validation record shared by the whole sweep.  Failed trials are
 * counted and excluded.  threads = 0 uses the hardware concurrency.
 */
MonteCarloReport monte_carlo_noise_sweep(const BenchmarkSystem& system,
                                         const PipelineConfig& config,
                                         std::span<const double> ratios, std::size_t trials,
                                         std::uint64_t base_seed, unsigned threads = 0);

}  // namespace narx
