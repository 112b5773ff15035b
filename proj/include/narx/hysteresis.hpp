#pragma once

// Hysteresis regressors phi1/phi2, candidate exclusion rules and the
// sum-of-linear-output-parameters constraint.

#include "narx/core.hpp"
#include "narx/estimation.hpp"

#include <span>
#include <string>
#include <vector>

namespace narx {

/// phi1(k) = x(k) - x(k-1) with phi1(0) = 0; phi2 = sign(phi1) with sign(0) = 0.
struct HysteresisSignals {
  std::vector<double> phi1;
  std::vector<double> phi2;
};

/// Requires at least two samples.
HysteresisSignals hysteresis_signals(std::span<const double> x);

/// Same as above without the length requirement; used internally where the
/// caller already checked history length.
HysteresisSignals hysteresis_signals_unchecked(std::span<const double> x);

struct HysteresisCandidateConfig {
  /// y^p (p > 1), alone or times any power of phi1 or phi2.
  bool apply_rule_i = true;
  /// phi2^q for q > 1.
  bool apply_rule_ii = true;
  /// Any term with an input factor but no phi1/phi2 factor.
  bool apply_rule_iii = true;
  bool enforce_sigma_y = false;
  Direction direction = Direction::Direct;
};

struct ExcludedTerm {
  RegressorTerm term;
  /// "i", "ii" or "iii"; the first matching rule.
  std::string rule;
};

struct ExclusionResult {
  CandidateSet kept;
  std::vector<ExcludedTerm> excluded;
};

/// Removes the terms matched by the enabled rules.  Matching is independent
/// of lags.
ExclusionResult apply_exclusion_rules(const CandidateSet& candidates,
                                      const HysteresisCandidateConfig& config);

/// Name of the first enabled rule the term violates, or empty.
std::string exclusion_rule_for(const RegressorTerm& term, const HysteresisCandidateConfig& config);

/// c has a 1 at every linear output term y(k-j), b = 1.  Throws
/// ConstraintInapplicableError if no such term exists.
LinearConstraint sigma_y_constraint(std::span<const RegressorTerm> terms);

/// Sum of the parameters of linear output terms.
double sigma_y(std::span<const RegressorTerm> terms, std::span<const double> theta);

/// Shoelace area of the closed polygon (x, y); positive for counterclockwise traversal.
double shoelace_area(std::span<const double> x, std::span<const double> y);

}  // namespace narx
