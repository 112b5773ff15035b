#include "narx/estimation.hpp"

#include "narx/errors.hpp"

#include <cmath>
#include <string>

namespace narx {

namespace {

// Relative size below which an R diagonal marks a dependent column.
constexpr double kRankTolerance = 1e-10;

// Residual norm, relative to the target norm, below which a fit is exact.
constexpr double kExactFitTolerance = 1e-12;

Eigen::MatrixXd with_lagged_residuals(const Eigen::MatrixXd& psi, const Eigen::VectorXd& residuals,
                                      int lags) {
  const Eigen::Index rows = psi.rows();
  Eigen::MatrixXd ext(rows, psi.cols() + lags);
  ext.leftCols(psi.cols()) = psi;
  for (int j = 1; j <= lags; ++j) {
    auto col = ext.col(psi.cols() + j - 1);
    for (Eigen::Index r = 0; r < rows; ++r) col(r) = r >= j ? residuals(r - j) : 0.0;
  }
  return ext;
}

}  // namespace

void ElsConfig::validate() const {
  if (!(zeta > 0.0)) throw ParameterError("ELS convergence limit must be > 0");
  if (max_iterations < 1) throw ParameterError("ELS max_iterations must be >= 1");
  if (noise_terms < 0) throw ParameterError("ELS noise term count must be >= 0");
}

double variance(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

EstimationReport ls_estimate(const Eigen::MatrixXd& psi, const Eigen::VectorXd& target) {
  if (psi.rows() != target.size()) {
    throw ParameterError("regression matrix has " + std::to_string(psi.rows()) +
                         " rows but the target has " + std::to_string(target.size()));
  }
  if (psi.cols() == 0) throw ParameterError("regression matrix has no columns");
  if (psi.rows() < psi.cols()) {
    throw InsufficientDataError("regression has fewer rows (" + std::to_string(psi.rows()) +
                                ") than parameters (" + std::to_string(psi.cols()) + ")");
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(psi);
  const auto& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < psi.cols(); ++j) {
    const double norm = psi.col(j).norm();
    if (norm == 0.0 || std::abs(packed(j, j)) < kRankTolerance * norm) {
      throw SingularMatrixError("regression matrix is rank deficient at column " +
                                    std::to_string(j),
                                static_cast<std::size_t>(j));
    }
  }

  EstimationReport report;
  report.theta = qr.solve(target);
  report.residuals = target - psi * report.theta;
  report.residual_variance = variance(report.residuals);
  report.iterations = 1;
  report.converged = true;
  return report;
}

EstimationReport els_estimate(const Eigen::MatrixXd& psi, const Eigen::VectorXd& target,
                              const ElsConfig& config) {
  config.validate();
  EstimationReport ls = ls_estimate(psi, target);
  const int lags = config.noise_terms;
  if (lags == 0) return ls;

  ls.noise_theta = Eigen::VectorXd::Zero(lags);
  if (ls.residuals.norm() <= kExactFitTolerance * target.norm()) {
    ls.parameter_changes = {0.0};
    return ls;
  }

  const Eigen::Index np = psi.cols();
  Eigen::VectorXd previous = Eigen::VectorXd::Zero(np + lags);
  previous.head(np) = ls.theta;
  Eigen::VectorXd residuals = ls.residuals;

  EstimationReport report;
  report.converged = false;
  Eigen::VectorXd current;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const Eigen::MatrixXd ext = with_lagged_residuals(psi, residuals, lags);
    current = ls_estimate(ext, target).theta;
    residuals = target - ext * current;
    const double change = (current - previous).norm();
    report.parameter_changes.push_back(change);
    report.iterations = it;
    previous = current;
    if (change < config.zeta) {
      report.converged = true;
      break;
    }
  }

  report.theta = current.head(np);
  report.noise_theta = current.tail(lags);
  report.residuals = residuals;
  report.residual_variance = variance(residuals);
  return report;
}

EstimationReport els_estimate(const CandidateSet& candidates, const TimeSeriesData& data,
                              const ElsConfig& config) {
  const auto reg = build_regression(candidates, data);
  return els_estimate(reg.psi, reg.target, config);
}

EstimationReport constrained_ls_estimate(const Eigen::MatrixXd& psi,
                                         const Eigen::VectorXd& target,
                                         const std::vector<LinearConstraint>& constraints) {
  if (constraints.empty()) return ls_estimate(psi, target);
  const Eigen::Index n = psi.cols();
  const auto m = static_cast<Eigen::Index>(constraints.size());
  if (m >= n) {
    throw ConstraintError("need fewer constraints (" + std::to_string(m) + ") than parameters (" +
                          std::to_string(n) + ")");
  }

  Eigen::MatrixXd ct(n, m);
  Eigen::VectorXd b(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& con = constraints[static_cast<std::size_t>(j)];
    if (con.c.size() != n) throw ConstraintError("constraint length differs from parameter count");
    ct.col(j) = con.c;
    b(j) = con.b;
  }

  // C^T = Q R; theta = Q1 R1^{-T} b + Q2 phi, where Q2 spans the null space of C.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ct);
  const Eigen::MatrixXd r1 = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j) {
    const double norm = ct.col(j).norm();
    if (norm == 0.0 || std::abs(r1(j, j)) < kRankTolerance * norm) {
      throw ConstraintError("constraint " + std::to_string(j) +
                            " is linearly dependent on the preceding ones");
    }
  }
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd q1 = q.leftCols(m);
  const Eigen::MatrixXd z = q.rightCols(n - m);
  const Eigen::VectorXd w = r1.transpose().triangularView<Eigen::Lower>().solve(b);
  const Eigen::VectorXd particular = q1 * w;

  const Eigen::VectorXd reduced_target = target - psi * particular;
  const EstimationReport reduced = ls_estimate(psi * z, reduced_target);

  EstimationReport report;
  report.theta = particular + z * reduced.theta;
  report.residuals = target - psi * report.theta;
  report.residual_variance = variance(report.residuals);
  return report;
}

}  // namespace narx
