#pragma once

/** @file
 * Structure selection: forward-regression orthogonal least squares ranks the
 * candidate terms by error reduction ratio (ERR), and Akaike's information
 * criterion truncates the ranked list.
 */

#include "narx/core.hpp"
#include "narx/estimation.hpp"
#include "narx/hysteresis.hpp"

#include <cstddef>
#include <vector>

namespace narx {

struct ErrRanking {
  std::vector<RegressorTerm> ordered_terms;
  /// ERR of each selected term, g^2 (w^T w) / (y^T y).
  std::vector<double> err_values;
  std::vector<double> cumulative_err;
  /// Candidates whose orthogonalized column vanished; never selected.
  std::vector<RegressorTerm> skipped;
  /// ||y - sum g_i w_i||^2 / (y^T y) of the orthogonal model.
  double residual_energy_ratio = 1.0;
};

struct FrolsOptions {
  /// 0 selects min(30, candidate count).
  std::size_t max_terms = 0;
  /// Selection stops once the best remaining ERR drops below this.
  double err_floor = 1e-10;
};

/// Greedy ERR ranking over the columns of a prebuilt regression.  Terms are
/// visited in canonical order so exact ties resolve to the canonically
/// smaller term.
ErrRanking frols_rank(std::span<const RegressorTerm> terms, const Eigen::MatrixXd& psi,
                      const Eigen::VectorXd& target, const FrolsOptions& options = {});

ErrRanking frols_rank(const CandidateSet& candidates, const TimeSeriesData& data,
                      const FrolsOptions& options = {});

enum class Estimator { LS, ELS };

struct AicCurve {
  std::vector<int> n_theta;
  std::vector<double> j_aic;
  std::vector<double> residual_variance;
  /// False where estimation failed; such points are excluded from argmin.
  std::vector<bool> valid;
  int argmin = 0;
};

/// J(n) = N ln(sigma^2(n)) + 2n for the n top-ranked terms, n = 1..size.
/// sigma^2 is the variance of the one-step-ahead residuals; every n uses the
/// same rows (those with full history for the whole ranking).
AicCurve aic_curve(const ErrRanking& ranking, const TimeSeriesData& data, Estimator estimator,
                   const ElsConfig& els = {});

/// AIC evaluated directly from residual variances; exposed for tests.
double aic_value(std::size_t n_samples, double residual_variance, int n_theta);

struct SelectionConfig {
  FrolsOptions frols;
  Estimator aic_estimator = Estimator::LS;
  Estimator final_estimator = Estimator::ELS;
  ElsConfig els;
  /// Fit the final model with sum of linear output parameters forced to 1.
  bool enforce_sigma_y = false;
};

struct SelectionResult {
  NarxModel model;
  ErrRanking ranking;
  AicCurve aic;
  EstimationReport report;
};

/// Ranks, truncates at the AIC minimum and re-estimates the retained terms
/// on the full record.
SelectionResult select_structure(const CandidateSet& candidates, const TimeSeriesData& data,
                                 const SelectionConfig& config = {});

/// Estimates the given structure and packs it into a model.
NarxModel fit_model(std::span<const RegressorTerm> terms, const TimeSeriesData& data,
                    Estimator estimator, const ElsConfig& els, bool enforce_sigma_y,
                    const ModelMeta& meta, EstimationReport* report = nullptr);

}  // namespace narx
