#include "narx/structure_selection.hpp"

#include "narx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace narx {

namespace {

// Orthogonalized column energy, relative to the raw column, below which a
// candidate is treated as linearly dependent on the selected ones.
constexpr double kVanishingEnergy = 1e-20;
constexpr double kOrthogonalityLoss = 1e-8;

}  // namespace

ErrRanking frols_rank(std::span<const RegressorTerm> terms, const Eigen::MatrixXd& psi,
                      const Eigen::VectorXd& target, const FrolsOptions& options) {
  const auto m = static_cast<std::size_t>(psi.cols());
  if (terms.size() != m) throw ParameterError("term count differs from regression columns");
  if (psi.rows() != target.size()) throw ParameterError("target length differs from rows");
  const double yy = target.squaredNorm();
  if (!(yy > 0.0)) throw DegenerateRangeError("target signal is identically zero");

  std::size_t max_terms = options.max_terms == 0 ? std::min<std::size_t>(30, m) : options.max_terms;
  if (max_terms > m) {
    throw ParameterError("max_terms (" + std::to_string(max_terms) +
                         ") exceeds the candidate count (" + std::to_string(m) + ")");
  }

  std::vector<std::size_t> remaining(m);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::stable_sort(remaining.begin(), remaining.end(),
                   [&](std::size_t a, std::size_t b) { return terms[a] < terms[b]; });

  Eigen::MatrixXd w = psi;
  Eigen::VectorXd raw_energy(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) raw_energy(j) = psi.col(j).squaredNorm();

  std::vector<Eigen::VectorXd> basis;
  Eigen::VectorXd residual = target;
  ErrRanking ranking;
  double cumulative = 0.0;

  while (ranking.ordered_terms.size() < max_terms && !remaining.empty()) {
    double best_err = -1.0;
    std::size_t best_pos = remaining.size();
    std::vector<std::size_t> still;
    still.reserve(remaining.size());
    for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
      const std::size_t j = remaining[pos];
      const double ww = w.col(j).squaredNorm();
      if (ww <= kVanishingEnergy * raw_energy(j) || raw_energy(j) == 0.0) {
        ranking.skipped.push_back(terms[j]);
        continue;
      }
      const double wy = w.col(j).dot(target);
      const double err = wy * wy / (ww * yy);
      if (err > best_err) {
        best_err = err;
        best_pos = still.size();
      }
      still.push_back(j);
    }
    remaining = std::move(still);
    if (remaining.empty() || best_err < options.err_floor) break;

    const std::size_t chosen = remaining[best_pos];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));

    Eigen::VectorXd q = w.col(chosen);
    double loss = 0.0;
    for (const auto& b : basis) {
      loss = std::max(loss, std::abs(q.dot(b)) / (q.norm() * b.norm()));
    }
    if (loss > kOrthogonalityLoss) {
      for (const auto& b : basis) q -= (q.dot(b) / b.squaredNorm()) * b;
    }

    const double qq = q.squaredNorm();
    const double g = q.dot(target) / qq;
    const double err = g * g * qq / yy;
    cumulative += err;
    residual -= g * q;
    ranking.ordered_terms.push_back(terms[chosen]);
    ranking.err_values.push_back(err);
    ranking.cumulative_err.push_back(cumulative);

    for (std::size_t j : remaining) {
      w.col(j) -= (q.dot(w.col(j)) / qq) * q;
    }
    basis.push_back(std::move(q));
  }

  ranking.residual_energy_ratio = residual.squaredNorm() / yy;
  return ranking;
}

ErrRanking frols_rank(const CandidateSet& candidates, const TimeSeriesData& data,
                      const FrolsOptions& options) {
  const auto reg = build_regression(candidates, data);
  return frols_rank(candidates.terms, reg.psi, reg.target, options);
}

double aic_value(std::size_t n_samples, double residual_variance, int n_theta) {
  return static_cast<double>(n_samples) * std::log(residual_variance) + 2.0 * n_theta;
}

AicCurve aic_curve(const ErrRanking& ranking, const TimeSeriesData& data, Estimator estimator,
                   const ElsConfig& els) {
  if (ranking.ordered_terms.empty()) throw ParameterError("AIC curve needs a non-empty ranking");
  const auto reg = build_regression(ranking.ordered_terms, data);
  const auto rows = static_cast<std::size_t>(reg.psi.rows());

  AicCurve curve;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= ranking.ordered_terms.size(); ++n) {
    curve.n_theta.push_back(static_cast<int>(n));
    double var = std::numeric_limits<double>::quiet_NaN();
    bool ok = true;
    try {
      const Eigen::MatrixXd sub = reg.psi.leftCols(static_cast<Eigen::Index>(n));
      const auto rep = estimator == Estimator::LS ? ls_estimate(sub, reg.target)
                                                  : els_estimate(sub, reg.target, els);
      var = rep.residual_variance;
    } catch (const Error&) {
      ok = false;
    }
    double j = std::numeric_limits<double>::quiet_NaN();
    if (ok && var > 0.0 && std::isfinite(var)) {
      j = aic_value(rows, var, static_cast<int>(n));
    } else if (ok && var == 0.0) {
      j = -std::numeric_limits<double>::infinity();
    } else {
      ok = false;
    }
    curve.residual_variance.push_back(var);
    curve.j_aic.push_back(j);
    curve.valid.push_back(ok);
    if (ok && j < best) {
      best = j;
      curve.argmin = static_cast<int>(n);
    }
  }
  if (curve.argmin == 0) throw Error("no valid point on the AIC curve");
  return curve;
}

NarxModel fit_model(std::span<const RegressorTerm> terms, const TimeSeriesData& data,
                    Estimator estimator, const ElsConfig& els, bool enforce_sigma_y,
                    const ModelMeta& meta, EstimationReport* report_out) {
  const auto reg = build_regression(terms, data);
  EstimationReport report;
  if (enforce_sigma_y) {
    report = constrained_ls_estimate(reg.psi, reg.target, {sigma_y_constraint(terms)});
  } else if (estimator == Estimator::ELS) {
    report = els_estimate(reg.psi, reg.target, els);
  } else {
    report = ls_estimate(reg.psi, reg.target);
  }

  NarxModel model;
  model.process_terms.assign(terms.begin(), terms.end());
  model.theta.assign(report.theta.data(), report.theta.data() + report.theta.size());
  for (Eigen::Index j = 0; j < report.noise_theta.size(); ++j) {
    model.noise_terms.emplace_back(
        std::vector<Factor>{{Variable::Residual, static_cast<int>(j) + 1, 1}});
    model.noise_theta.push_back(report.noise_theta(j));
  }
  model.meta = meta;
  model.meta.ts = data.ts;
  if (report_out) *report_out = std::move(report);
  return model;
}

SelectionResult select_structure(const CandidateSet& candidates, const TimeSeriesData& data,
                                 const SelectionConfig& config) {
  SelectionResult result;
  result.ranking = frols_rank(candidates, data, config.frols);
  if (result.ranking.ordered_terms.empty()) throw Error("ERR ranking selected no terms");
  result.aic = aic_curve(result.ranking, data, config.aic_estimator, config.els);

  const auto n = static_cast<std::size_t>(result.aic.argmin);
  std::span<const RegressorTerm> chosen(result.ranking.ordered_terms.data(), n);
  result.model = fit_model(chosen, data, config.final_estimator, config.els,
                           config.enforce_sigma_y, candidates.meta, &result.report);
  return result;
}

}  // namespace narx
