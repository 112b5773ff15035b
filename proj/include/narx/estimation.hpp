#pragma once

/** @file
 * Least-squares parameter estimators: ordinary LS through Householder QR,
 * extended LS with lagged-residual (moving-average) columns, and
 * equality-constrained LS.
 */

#include "narx/core.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace narx {

struct ElsConfig {
  /// Convergence limit on the 2-norm of the parameter change between iterations.
  double zeta = 1e-8;
  int max_iterations = 30;
  /// Number of lagged-residual columns e(k-1)..e(k-n) appended to the regressors.
  int noise_terms = 1;

  void validate() const;
};

struct EstimationReport {
  /// Process parameters, one per regression column.
  Eigen::VectorXd theta;
  /// Moving-average parameters (ELS only), for e(k-1)..e(k-n).
  Eigen::VectorXd noise_theta;
  /// Residuals of the final fit, one per regression row.
  Eigen::VectorXd residuals;
  int iterations = 1;
  bool converged = true;
  double residual_variance = 0.0;
  /// ||theta_i - theta_{i-1}||_2 for every ELS iteration.
  std::vector<double> parameter_changes;
};

/// A single equality constraint c^T theta = b.
struct LinearConstraint {
  Eigen::VectorXd c;
  double b = 0.0;
};

/// Population variance (mean removed) of a vector; 0 for empty input.
double variance(const Eigen::VectorXd& v);

/// Minimizer of ||target - psi * theta||_2 via Householder QR.  Throws
/// SingularMatrixError naming the first column whose R diagonal falls below
/// 1e-10 of its column norm.
EstimationReport ls_estimate(const Eigen::MatrixXd& psi, const Eigen::VectorXd& target);

/**
 * Extended least squares.
 *
 * Starts from the LS estimate, then repeatedly appends the lagged residuals
 * of the previous iteration as extra columns and re-solves, until the
 * parameter change falls below zeta or max_iterations extensions have run.
 * Residual lags without history are taken as zero.  Non-convergence is
 * reported through converged=false.  When the LS fit is already exact the
 * residual columns carry no information and the LS solution is returned.
 */
EstimationReport els_estimate(const Eigen::MatrixXd& psi, const Eigen::VectorXd& target,
                              const ElsConfig& config = {});

/// ELS on the regression of a candidate set over a data record.
EstimationReport els_estimate(const CandidateSet& candidates, const TimeSeriesData& data,
                              const ElsConfig& config = {});

/// LS subject to c_j^T theta = b_j, solved in the null space of the
/// constraints.  Throws ConstraintError for dependent or inconsistent
/// constraints, or when there are as many constraints as parameters.
EstimationReport constrained_ls_estimate(const Eigen::MatrixXd& psi,
                                         const Eigen::VectorXd& target,
                                         const std::vector<LinearConstraint>& constraints);

}  // namespace narx
