#include "narx/hysteresis.hpp"

#include "narx/errors.hpp"

namespace narx {

HysteresisSignals hysteresis_signals_unchecked(std::span<const double> x) {
  HysteresisSignals s;
  s.phi1.assign(x.size(), 0.0);
  s.phi2.assign(x.size(), 0.0);
  for (std::size_t k = 1; k < x.size(); ++k) {
    const double d = x[k] - x[k - 1];
    s.phi1[k] = d;
    s.phi2[k] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  return s;
}

HysteresisSignals hysteresis_signals(std::span<const double> x) {
  if (x.size() < 2) throw InsufficientDataError("hysteresis signals need at least two samples");
  return hysteresis_signals_unchecked(x);
}

std::string exclusion_rule_for(const RegressorTerm& term, const HysteresisCandidateConfig& config) {
  const bool has_phi = term.uses(Variable::Phi1) || term.uses(Variable::Phi2);
  if (config.apply_rule_i && term.exponent_of(Variable::Output) > 1) return "i";
  if (config.apply_rule_ii && term.exponent_of(Variable::Phi2) > 1) return "ii";
  if (config.apply_rule_iii && term.uses(Variable::Input) && !has_phi) return "iii";
  return {};
}

ExclusionResult apply_exclusion_rules(const CandidateSet& candidates,
                                      const HysteresisCandidateConfig& config) {
  ExclusionResult result;
  result.kept.meta = candidates.meta;
  result.kept.meta.direction = config.direction;
  result.kept.include_constant = candidates.include_constant;
  for (const auto& term : candidates.terms) {
    auto rule = exclusion_rule_for(term, config);
    if (rule.empty()) {
      result.kept.terms.push_back(term);
    } else {
      result.excluded.push_back({term, std::move(rule)});
    }
  }
  return result;
}

LinearConstraint sigma_y_constraint(std::span<const RegressorTerm> terms) {
  LinearConstraint con;
  con.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(terms.size()));
  con.b = 1.0;
  bool any = false;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].is_linear_output()) {
      con.c(static_cast<Eigen::Index>(i)) = 1.0;
      any = true;
    }
  }
  if (!any) throw ConstraintInapplicableError("no linear output regressor to constrain");
  return con;
}

double sigma_y(std::span<const RegressorTerm> terms, std::span<const double> theta) {
  double s = 0.0;
  for (std::size_t i = 0; i < terms.size() && i < theta.size(); ++i) {
    if (terms[i].is_linear_output()) s += theta[i];
  }
  return s;
}

double shoelace_area(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    twice += x[i] * y[j] - x[j] * y[i];
  }
  return 0.5 * twice;
}

}  // namespace narx
