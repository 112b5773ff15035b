#include "narx/core.hpp"

#include "narx/errors.hpp"
#include "narx/hysteresis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace narx {

std::string_view variable_symbol(Variable v) {
  switch (v) {
    case Variable::Output: return "y";
    case Variable::Input: return "u";
    case Variable::Phi1: return "phi1";
    case Variable::Phi2: return "phi2";
    case Variable::Residual: return "e";
  }
  return "?";
}

Variable parse_variable(std::string_view symbol) {
  for (auto v : {Variable::Output, Variable::Input, Variable::Phi1, Variable::Phi2,
                 Variable::Residual}) {
    if (variable_symbol(v) == symbol) return v;
  }
  throw FormatError("unknown variable symbol '" + std::string(symbol) + "'");
}

void TimeSeriesData::validate() const {
  if (y.empty()) throw ParameterError("time series is empty");
  if (u.size() != y.size()) {
    throw ParameterError("input and output lengths differ (" + std::to_string(u.size()) +
                         " vs " + std::to_string(y.size()) + ")");
  }
  if (!(ts > 0.0) || !std::isfinite(ts)) throw ParameterError("sampling interval must be > 0");
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(u.begin(), u.end(), finite) || !std::all_of(y.begin(), y.end(), finite)) {
    throw ParameterError("time series contains non-finite samples");
  }
}

// ---------------------------------------------------------------------------
// RegressorTerm

RegressorTerm::RegressorTerm(std::vector<Factor> factors) {
  std::map<std::pair<Variable, int>, int> merged;
  for (const auto& f : factors) {
    if (f.lag < 0) throw ParameterError("factor lag must be non-negative");
    if (f.exponent < 1) throw ParameterError("factor exponent must be positive");
    merged[{f.variable, f.lag}] += f.exponent;
  }
  factors_.reserve(merged.size());
  for (const auto& [key, exponent] : merged) factors_.push_back({key.first, key.second, exponent});
}

int RegressorTerm::degree() const noexcept {
  int d = 0;
  for (const auto& f : factors_) d += f.exponent;
  return d;
}

int RegressorTerm::max_lag() const noexcept {
  int m = 0;
  for (const auto& f : factors_) m = std::max(m, f.lag);
  return m;
}

int RegressorTerm::max_lag(Variable v) const noexcept {
  int m = 0;
  for (const auto& f : factors_)
    if (f.variable == v) m = std::max(m, f.lag);
  return m;
}

int RegressorTerm::exponent_of(Variable v) const noexcept {
  int e = 0;
  for (const auto& f : factors_)
    if (f.variable == v) e += f.exponent;
  return e;
}

bool RegressorTerm::is_linear_output() const noexcept {
  return factors_.size() == 1 && factors_[0].variable == Variable::Output &&
         factors_[0].exponent == 1;
}

std::string RegressorTerm::to_string() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (const auto& f : factors_) {
    if (!out.empty()) out += '*';
    out += variable_symbol(f.variable);
    out += "(k-" + std::to_string(f.lag) + ")";
    if (f.exponent > 1) out += "^" + std::to_string(f.exponent);
  }
  return out;
}

namespace {

int parse_int(std::string_view s, std::string_view context) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("malformed integer '" + std::string(s) + "' in term '" +
                      std::string(context) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

RegressorTerm RegressorTerm::parse(std::string_view text) {
  text = trim(text);
  if (text == "1") return RegressorTerm{};
  std::vector<Factor> factors;
  std::string_view rest = text;
  while (!rest.empty()) {
    auto star = rest.find('*');
    std::string_view piece = trim(rest.substr(0, star));
    rest = star == std::string_view::npos ? std::string_view{} : rest.substr(star + 1);

    auto open = piece.find("(k-");
    auto close = piece.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      throw FormatError("malformed factor '" + std::string(piece) + "'");
    }
    Factor f;
    f.variable = parse_variable(piece.substr(0, open));
    f.lag = parse_int(piece.substr(open + 3, close - open - 3), text);
    std::string_view tail = piece.substr(close + 1);
    if (!tail.empty()) {
      if (tail.front() != '^') throw FormatError("malformed exponent in '" + std::string(piece) + "'");
      f.exponent = parse_int(tail.substr(1), text);
    }
    factors.push_back(f);
  }
  return RegressorTerm{std::move(factors)};
}

std::strong_ordering operator<=>(const RegressorTerm& a, const RegressorTerm& b) {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.factors_.begin(), a.factors_.end(),
                                                b.factors_.begin(), b.factors_.end());
}

// ---------------------------------------------------------------------------
// NarxModel

void NarxModel::validate() const {
  if (theta.size() != process_terms.size()) {
    throw ParameterError("model has " + std::to_string(process_terms.size()) + " terms but " +
                         std::to_string(theta.size()) + " parameters");
  }
  if (noise_theta.size() != noise_terms.size()) {
    throw ParameterError("noise term and parameter counts differ");
  }
  for (const auto& t : process_terms) {
    if (t.uses(Variable::Residual)) {
      throw ParameterError("process term " + t.to_string() + " references the residual");
    }
  }
  for (const auto& t : noise_terms) {
    for (const auto& f : t.factors()) {
      if (f.variable != Variable::Residual) {
        throw ParameterError("noise term " + t.to_string() + " references a process variable");
      }
    }
  }
}

int NarxModel::max_lag() const noexcept {
  int m = narx::max_lag(process_terms);
  return std::max(m, narx::max_lag(noise_terms));
}

int NarxModel::max_output_lag() const noexcept {
  int m = 0;
  for (const auto& t : process_terms) m = std::max(m, t.max_lag(Variable::Output));
  return m;
}

int max_lag(std::span<const RegressorTerm> terms) noexcept {
  int m = 0;
  for (const auto& t : terms) m = std::max(m, t.max_lag());
  return m;
}

// ---------------------------------------------------------------------------
// Candidate enumeration

CandidateSet generate_candidates(int degree, int ny, int nu, int delay,
                                 std::span<const Variable> variables, bool include_constant) {
  if (degree < 1) throw ParameterError("degree must be >= 1");
  if (ny < 1) throw ParameterError("ny must be >= 1");
  if (delay < 1) throw ParameterError("input delay must be >= 1");
  if (nu < delay) throw ParameterError("nu must be >= input delay");

  std::vector<Variable> kinds(variables.begin(), variables.end());
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());

  std::vector<Factor> base;
  for (auto v : kinds) {
    const bool output_like = v == Variable::Output || v == Variable::Residual;
    const int first = output_like ? 1 : delay;
    const int last = output_like ? ny : nu;
    for (int lag = first; lag <= last; ++lag) base.push_back({v, lag, 1});
  }

  CandidateSet set;
  set.meta = {degree, ny, nu, delay, 1.0, Direction::Direct};
  set.include_constant = include_constant;
  if (include_constant) set.terms.push_back(RegressorTerm::constant());

  // Multisets of size d drawn from base, as non-decreasing index vectors.
  const int m = static_cast<int>(base.size());
  for (int d = 1; d <= degree && m > 0; ++d) {
    std::vector<int> idx(d, 0);
    while (true) {
      std::vector<Factor> factors;
      factors.reserve(d);
      for (int i : idx) factors.push_back(base[i]);
      set.terms.emplace_back(std::move(factors));

      int pos = d - 1;
      while (pos >= 0 && idx[pos] == m - 1) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j < d; ++j) idx[j] = idx[pos];
    }
  }
  std::sort(set.terms.begin(), set.terms.end());
  return set;
}

// ---------------------------------------------------------------------------
// Evaluation

double evaluate(const RegressorTerm& term, const SignalView& s, std::size_t k) {
  double value = 1.0;
  for (const auto& f : term.factors()) {
    const std::size_t i = k - static_cast<std::size_t>(f.lag);
    double x = 0.0;
    switch (f.variable) {
      case Variable::Output: x = s.y[i]; break;
      case Variable::Input: x = s.u[i]; break;
      case Variable::Phi1: x = s.phi1[i]; break;
      case Variable::Phi2: x = s.phi2[i]; break;
      case Variable::Residual: x = s.residual[i]; break;
    }
    double p = x;
    for (int e = 1; e < f.exponent; ++e) p *= x;
    value *= p;
  }
  return value;
}

namespace {

bool any_uses(std::span<const RegressorTerm> terms, Variable v) {
  return std::any_of(terms.begin(), terms.end(), [v](const auto& t) { return t.uses(v); });
}

}  // namespace

Regression build_regression(std::span<const RegressorTerm> terms, const TimeSeriesData& data,
                            std::span<const double> residuals) {
  data.validate();
  const std::size_t n = data.size();
  const auto p = static_cast<std::size_t>(max_lag(terms));
  if (n <= p) {
    throw InsufficientDataError("data has " + std::to_string(n) +
                                " samples but the terms need more than " + std::to_string(p));
  }
  if (any_uses(terms, Variable::Residual)) {
    if (residuals.empty()) throw MissingInputError("residual terms require a residual sequence");
    if (residuals.size() != n) throw ParameterError("residual sequence length differs from data");
  }

  HysteresisSignals phi;
  if (any_uses(terms, Variable::Phi1) || any_uses(terms, Variable::Phi2)) {
    phi = hysteresis_signals_unchecked(data.u);
  }
  const SignalView view{data.y, data.u, phi.phi1, phi.phi2, residuals};

  Regression reg;
  reg.first_row = p;
  const auto rows = static_cast<Eigen::Index>(n - p);
  reg.psi.resize(rows, static_cast<Eigen::Index>(terms.size()));
  reg.target.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t k = p + static_cast<std::size_t>(r);
    reg.target(r) = data.y[k];
    for (std::size_t c = 0; c < terms.size(); ++c) {
      reg.psi(r, static_cast<Eigen::Index>(c)) = evaluate(terms[c], view, k);
    }
  }
  return reg;
}

Regression build_regression(const CandidateSet& candidates, const TimeSeriesData& data,
                            std::span<const double> residuals) {
  return build_regression(std::span<const RegressorTerm>(candidates.terms), data, residuals);
}

std::vector<double> one_step_predict(const NarxModel& model, const TimeSeriesData& data) {
  model.validate();
  const auto reg = build_regression(model.process_terms, data);
  const Eigen::Map<const Eigen::VectorXd> theta(model.theta.data(),
                                                static_cast<Eigen::Index>(model.theta.size()));
  Eigen::VectorXd pred = reg.psi * theta;
  return {pred.data(), pred.data() + pred.size()};
}

SimulationResult free_run_simulate(const NarxModel& model, std::span<const double> u,
                                   std::span<const double> y_init,
                                   std::optional<double> divergence_bound) {
  model.validate();
  const auto out_lag = static_cast<std::size_t>(model.max_output_lag());
  if (y_init.size() < out_lag) {
    throw ParameterError("free-run simulation needs at least " + std::to_string(out_lag) +
                         " initial outputs");
  }
  const std::size_t n = u.size();
  const std::size_t start =
      std::max(y_init.size(), static_cast<std::size_t>(narx::max_lag(model.process_terms)));
  if (n < start) {
    throw InsufficientDataError("input horizon shorter than the initial history");
  }

  double bound = 0.0;
  if (divergence_bound) {
    bound = *divergence_bound;
  } else {
    double scale = 0.0;
    for (double v : y_init) scale = std::max(scale, std::abs(v));
    for (double v : u) scale = std::max(scale, std::abs(v));
    bound = 1e6 * scale + 1.0;
  }

  SimulationResult result;
  result.y.assign(n, 0.0);
  for (std::size_t k = 0; k < start; ++k) {
    result.y[k] = k < y_init.size() ? y_init[k] : (y_init.empty() ? 0.0 : y_init.back());
  }

  HysteresisSignals phi;
  if (any_uses(model.process_terms, Variable::Phi1) ||
      any_uses(model.process_terms, Variable::Phi2)) {
    phi = hysteresis_signals_unchecked(u);
  }
  const SignalView view{result.y, u, phi.phi1, phi.phi2, {}};

  for (std::size_t k = start; k < n; ++k) {
    double yk = 0.0;
    for (std::size_t i = 0; i < model.process_terms.size(); ++i) {
      yk += model.theta[i] * evaluate(model.process_terms[i], view, k);
    }
    if (!std::isfinite(yk) || std::abs(yk) > bound) {
      result.diverged = true;
      result.valid = k;
      result.y.resize(k);
      return result;
    }
    result.y[k] = yk;
  }
  result.valid = n;
  return result;
}

}  // namespace narx
