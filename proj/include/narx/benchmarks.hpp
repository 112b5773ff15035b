#pragma once

/** @file
 * Reference systems used as identification targets, and the catalog of
 * published models that can be evaluated directly.
 */

#include "narx/core.hpp"

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace narx {

/// Hammerstein heater: v = p1 u^2 + p2 u feeding
/// y(k) = b1 y(k-1) + b2 v(k-1) + b3 y(k-2) + b4 v(k-2).
struct HammersteinParams {
  double p1 = 4.639331e-1;
  double p2 = 5.435865e-2;
  double b1 = 1.205445;
  double b2 = 8.985133e-2;
  double b3 = -3.0877507e-1;
  double b4 = 9.462358e-3;

  /// Output reached for a constant input held forever.
  double steady_state(double u) const;
};

struct HammersteinResult {
  std::vector<double> y;
  /// Some input sample left the model's validity range [0, 1].
  bool out_of_range = false;
  bool diverged = false;
};

/// Runs the recursion from rest (all samples before k = 0 are zero).
HammersteinResult simulate_hammerstein(const HammersteinParams& params, std::span<const double> u);

/// Bouc-Wen hysteresis:
///   dh/dt = alpha du/dt - beta |du/dt| h - gamma du/dt |h|,  y = nu_y u - h.
struct BoucWenParams {
  double alpha = 0.9;
  double beta = 0.008;
  double gamma = 0.008;
  double nu_y = 1.6;
  /// Integration step, seconds.
  double dt = 0.005;
};

struct BoucWenResult {
  std::vector<double> y;
  std::vector<double> h;
  bool diverged = false;
};

/// RK4 over input samples spaced dt apart, h(0) = 0.  du/dt comes from
/// central differences (one-sided at the ends); the half-step derivative is
/// the mean of the neighbouring sample derivatives.
BoucWenResult simulate_bouc_wen(const BoucWenParams& params, std::span<const double> u);

/// RK4 with an analytic input and derivative, for convergence studies.
/// Returns steps + 1 samples starting at t = 0.
BoucWenResult simulate_bouc_wen(const BoucWenParams& params,
                                const std::function<double(double)>& u,
                                const std::function<double(double)>& du, std::size_t steps);

/// A simulated plant the identification pipeline can be pointed at.
struct BenchmarkSystem {
  std::string name;
  std::variant<HammersteinParams, BoucWenParams> dynamics;
  /// Sampling interval of the excitation fed to the simulator.
  double ts = 1.0;
  /// Keep every n-th sample of the simulated record for identification.
  std::size_t decimation = 1;

  /// Simulated output at the excitation rate.  Throws Error on divergence.
  std::vector<double> simulate(std::span<const double> u) const;
  double identification_ts() const { return ts * static_cast<double>(decimation); }
};

/// Heater with T_s = 10 s.
BenchmarkSystem heating_system();
/// Piezoelectric actuator, simulated and sampled at the 5 ms integration step.
BenchmarkSystem piezo_system();

struct Preset {
  std::string name;
  std::string description;
  std::variant<NarxModel, BoucWenParams> system;
  std::string note;

  bool is_narx() const { return std::holds_alternative<NarxModel>(system); }
  const NarxModel& narx() const { return std::get<NarxModel>(system); }
};

/// The six published models:
///   heating-narx            three-term heater model
///   bouc-wen-narx           four-term piezo hysteresis model
///   valve-narx-constrained  valve model fitted with sum of output parameters = 1
///   valve-bouc-wen          Bouc-Wen fitted to the valve
///   valve-narx-isolable     valve model with an isolable input term
///   valve-narx-inverse      inverse valve model (input estimated from output)
const std::vector<Preset>& preset_models();
/// Throws ParameterError for an unknown name.
const Preset& find_preset(const std::string& name);

/// Free-run of an inverse-direction model: y is the exogenous signal and the
/// returned sequence is the estimated input.
SimulationResult run_inverse_model(const NarxModel& model, std::span<const double> y,
                                   std::span<const double> u_init);

}  // namespace narx
