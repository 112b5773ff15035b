#pragma once

/** @file
 * Polynomial NARX model representation: lagged regressor terms, candidate
 * enumeration, regression-matrix assembly and prediction.
 *
 * A model predicts
 *   y(k) = sum_i theta_i * psi_i(k-1)
 * where every psi_i is a product of lagged variables raised to positive
 * integer powers.  The variables are the model output y, the exogenous input
 * u, the first difference of the input phi1(k) = u(k) - u(k-1), its sign
 * phi2(k) = sign(phi1(k)), and (noise terms only) the residual e.
 */

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace narx {

enum class Variable { Output = 0, Input = 1, Phi1 = 2, Phi2 = 3, Residual = 4 };

/// Short symbol used in term strings: y, u, phi1, phi2, e.
std::string_view variable_symbol(Variable v);
Variable parse_variable(std::string_view symbol);

/// Sampled input/output record.
struct TimeSeriesData {
  std::vector<double> u;
  std::vector<double> y;
  double ts = 1.0;
  std::string label;

  std::size_t size() const noexcept { return y.size(); }

  /// Throws ParameterError unless |u| == |y| >= 1, ts > 0 and all samples are finite.
  void validate() const;
};

struct Factor {
  Variable variable = Variable::Output;
  int lag = 1;
  int exponent = 1;

  auto operator<=>(const Factor&) const = default;
};

/// One monomial of lagged variables.  Factors are kept sorted by
/// (variable, lag) and repeated (variable, lag) pairs are merged, so two terms
/// describing the same monomial compare equal.  A term without factors is the
/// constant regressor.
class RegressorTerm {
public:
  RegressorTerm() = default;
  explicit RegressorTerm(std::vector<Factor> factors);

  static RegressorTerm constant() { return RegressorTerm{}; }
  /// Parses strings such as "y(k-1)^2*phi2(k-1)" or "1".
  static RegressorTerm parse(std::string_view text);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  bool is_constant() const noexcept { return factors_.empty(); }
  int degree() const noexcept;
  int max_lag() const noexcept;
  /// Highest lag among factors of the given variable, 0 if absent.
  int max_lag(Variable v) const noexcept;
  /// Total exponent carried by the given variable over all lags.
  int exponent_of(Variable v) const noexcept;
  bool uses(Variable v) const noexcept { return exponent_of(v) > 0; }
  /// True for y(k-j) to the first power with no other factor.
  bool is_linear_output() const noexcept;

  std::string to_string() const;

  friend bool operator==(const RegressorTerm&, const RegressorTerm&) = default;
  /// Canonical order: total degree, then factor lists lexicographically.
  friend std::strong_ordering operator<=>(const RegressorTerm& a, const RegressorTerm& b);

private:
  std::vector<Factor> factors_;
};

enum class Direction { Direct, Inverse };

/// Meta-parameters of a model or candidate pool.
struct ModelMeta {
  int degree = 1;
  int ny = 1;
  int nu = 1;
  int delay = 1;
  double ts = 1.0;
  Direction direction = Direction::Direct;

  bool operator==(const ModelMeta&) const = default;
};

struct NarxModel {
  std::vector<RegressorTerm> process_terms;
  std::vector<double> theta;
  /// Moving-average part; terms may only use Variable::Residual.
  std::vector<RegressorTerm> noise_terms;
  std::vector<double> noise_theta;
  ModelMeta meta;

  /// Throws ParameterError when parameter counts disagree with term counts
  /// or a process term references the residual.
  void validate() const;
  int max_lag() const noexcept;
  int max_output_lag() const noexcept;
};

struct CandidateSet {
  std::vector<RegressorTerm> terms;
  ModelMeta meta;
  bool include_constant = false;
};

/// Every distinct monomial of total degree 1..degree over the lagged
/// variables (output lags 1..ny; input, phi1 and phi2 lags delay..nu;
/// residual lags 1..ny), canonically ordered.
CandidateSet generate_candidates(int degree, int ny, int nu, int delay,
                                 std::span<const Variable> variables,
                                 bool include_constant = false);

/// Borrowed view over the signals a term may read.  phi1/phi2 are derived
/// from u; residual is only needed by terms using Variable::Residual.
struct SignalView {
  std::span<const double> y;
  std::span<const double> u;
  std::span<const double> phi1;
  std::span<const double> phi2;
  std::span<const double> residual;
};

/// Value of the term at sample k; the caller guarantees k >= term.max_lag().
double evaluate(const RegressorTerm& term, const SignalView& signals, std::size_t k);

struct Regression {
  Eigen::MatrixXd psi;
  Eigen::VectorXd target;
  /// Sample index of the first row; rows cover first_row..N-1.
  std::size_t first_row = 0;
};

/// Largest lag over a term list (0 for an empty list or constants only).
int max_lag(std::span<const RegressorTerm> terms) noexcept;

/// Regression matrix of the given terms.  The first max-lag samples lack a
/// full history and are dropped.
Regression build_regression(std::span<const RegressorTerm> terms, const TimeSeriesData& data,
                            std::span<const double> residuals = {});
Regression build_regression(const CandidateSet& candidates, const TimeSeriesData& data,
                            std::span<const double> residuals = {});

/// One-step-ahead predictions from measured past outputs, for samples
/// max_lag..N-1.  Only the process part contributes.
std::vector<double> one_step_predict(const NarxModel& model, const TimeSeriesData& data);

struct SimulationResult {
  std::vector<double> y;
  bool diverged = false;
  /// Number of valid samples in y (equals y.size() unless diverged).
  std::size_t valid = 0;
};

/// Free-run simulation over the horizon of u.  y_init seeds the first
/// samples; when the model needs more history than y_init provides, the last
/// initial value is held.  Noise terms contribute zero.  The run stops with
/// diverged=true as soon as |y(k)| exceeds the bound, whose default is
/// 1e6 * max(max|y_init|, max|u|) + 1.
SimulationResult free_run_simulate(const NarxModel& model, std::span<const double> u,
                                   std::span<const double> y_init,
                                   std::optional<double> divergence_bound = std::nullopt);

}  // namespace narx
