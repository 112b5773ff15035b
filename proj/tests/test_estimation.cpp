#include "doctest.h"
#include "support.hpp"

#include "narx/benchmarks.hpp"
#include "narx/errors.hpp"
#include "narx/estimation.hpp"
#include "narx/hysteresis.hpp"

#include <cmath>

using namespace narx;

namespace {

// y(k) = a y(k-1) + b u(k-1) + e(k) + c e(k-1)
struct Armax {
  double a = 0.8, b = 1.0, c = 0.8;
};

TimeSeriesData armax_record(const Armax& p, std::size_t n, unsigned seed) {
  const auto u = oracle::gaussian(n, seed, 1.0);
  const auto e = oracle::gaussian(n, seed + 7919, 0.5);
  TimeSeriesData d;
  d.u = u;
  d.y.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    d.y[k] = p.a * d.y[k - 1] + p.b * u[k - 1] + e[k] + p.c * e[k - 1];
  }
  return d;
}

}  // namespace

TEST_CASE("ls: identity system") {
  const Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd y = Eigen::Vector2d(3.0, 4.0);
  const auto r = ls_estimate(psi, y);
  CHECK(r.theta(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.theta(1) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("ls: noise-free exact fit") {
  const auto u = oracle::uniform(300, 11, -1.0, 1.0);
  TimeSeriesData d;
  d.u = u;
  d.y.assign(u.size(), 0.0);
  for (std::size_t k = 1; k < u.size(); ++k) d.y[k] = 2.0 * u[k - 1];
  const std::vector<RegressorTerm> terms{RegressorTerm::parse("u(k-1)")};
  const auto reg = build_regression(terms, d);
  const auto r = ls_estimate(reg.psi, reg.target);
  CHECK(std::abs(r.theta(0) - 2.0) < 1e-12);
}

TEST_CASE("ls: static nonlinearity refit") {
  const HammersteinParams p;
  const auto u = oracle::uniform(400, 5, 0.0, 1.0);
  Eigen::MatrixXd psi(400, 2);
  Eigen::VectorXd v(400);
  for (int k = 0; k < 400; ++k) {
    psi(k, 0) = u[k] * u[k];
    psi(k, 1) = u[k];
    v(k) = p.p1 * u[k] * u[k] + p.p2 * u[k];
  }
  const auto r = ls_estimate(psi, v);
  CHECK(r.theta(0) == doctest::Approx(p.p1).epsilon(1e-10));
  CHECK(r.theta(1) == doctest::Approx(p.p2).epsilon(1e-10));
}

TEST_CASE("ls: agrees with an SVD solve") {
  const auto a = oracle::gaussian(600, 21);
  const auto b = oracle::gaussian(120, 22);
  const Eigen::MatrixXd psi = Eigen::Map<const Eigen::MatrixXd>(a.data(), 120, 5);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(b.data(), 120);
  const auto r = ls_estimate(psi, y);
  const Eigen::VectorXd ref = oracle::svd_ls(psi, y);
  CHECK((r.theta - ref).norm() < 1e-10 * (1.0 + ref.norm()));
}

TEST_CASE("ls: residual orthogonal to every column") {
  const auto a = oracle::gaussian(800, 31);
  const auto b = oracle::gaussian(200, 32);
  const Eigen::MatrixXd psi = Eigen::Map<const Eigen::MatrixXd>(a.data(), 200, 4);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(b.data(), 200);
  const auto r = ls_estimate(psi, y);
  for (int j = 0; j < psi.cols(); ++j) {
    const double ip = std::abs(psi.col(j).dot(r.residuals));
    CHECK(ip < 1e-8 * psi.col(j).norm() * r.residuals.norm());
  }
}

TEST_CASE("ls: singular matrix names the column") {
  Eigen::MatrixXd psi(5, 3);
  psi << 1, 2, 3, 2, 1, 3, 3, 0, 3, 4, 1, 5, 5, 2, 7;  // column 2 = column 0 + column 1
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  try {
    ls_estimate(psi, y);
    FAIL("expected a singular-matrix error");
  } catch (const SingularMatrixError& e) {
    CHECK(e.column() == 2);
  }
}

TEST_CASE("els: exact data returns the ls solution") {
  const auto u = oracle::uniform(300, 3, -1.0, 1.0);
  TimeSeriesData d;
  d.u = u;
  d.y.assign(u.size(), 0.0);
  for (std::size_t k = 1; k < u.size(); ++k) d.y[k] = 0.5 * d.y[k - 1] + u[k - 1];
  const auto set = generate_candidates(1, 1, 1, 1, std::vector{Variable::Output, Variable::Input});
  const auto reg = build_regression(set, d);
  const auto ls = ls_estimate(reg.psi, reg.target);
  const auto els = els_estimate(set, d);
  CHECK(els.converged);
  CHECK((els.theta - ls.theta).norm() < 1e-10);
}

TEST_CASE("els: zero noise terms is ls") {
  const auto d = armax_record({}, 400, 9);
  const std::vector<RegressorTerm> terms{RegressorTerm::parse("y(k-1)"),
                                         RegressorTerm::parse("u(k-1)")};
  const auto reg = build_regression(terms, d);
  ElsConfig cfg;
  cfg.noise_terms = 0;
  const auto ls = ls_estimate(reg.psi, reg.target);
  const auto els = els_estimate(reg.psi, reg.target, cfg);
  CHECK((els.theta - ls.theta).norm() == 0.0);
  CHECK(els.noise_theta.size() == 0);
}

TEST_CASE("els: reports per-iteration parameter changes") {
  const auto d = armax_record({0.8, 1.0, 0.5}, 1000, 17);
  const std::vector<RegressorTerm> terms{RegressorTerm::parse("y(k-1)"),
                                         RegressorTerm::parse("u(k-1)")};
  const auto reg = build_regression(terms, d);
  const auto r = els_estimate(reg.psi, reg.target);
  CHECK(r.converged);
  CHECK(r.parameter_changes.size() == static_cast<std::size_t>(r.iterations));
  for (double c : r.parameter_changes) CHECK(std::isfinite(c));
  CHECK(r.parameter_changes.back() < ElsConfig{}.zeta);
  CHECK(r.noise_theta.size() == 1);
  CHECK(r.noise_theta(0) == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("els: non-convergence is reported, not thrown") {
  const auto d = armax_record({}, 500, 4);
  const std::vector<RegressorTerm> terms{RegressorTerm::parse("y(k-1)"),
                                         RegressorTerm::parse("u(k-1)")};
  const auto reg = build_regression(terms, d);
  ElsConfig cfg;
  cfg.max_iterations = 1;
  cfg.zeta = 1e-300;
  const auto r = els_estimate(reg.psi, reg.target, cfg);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(ElsConfig{-1.0}.validate(), ParameterError);
}

TEST_CASE("els: lower parameter error than ls on ARMAX data") {
  const Armax truth;
  double err_ls = 0.0, err_els = 0.0;
  const std::vector<RegressorTerm> terms{RegressorTerm::parse("y(k-1)"),
                                         RegressorTerm::parse("u(k-1)")};
  for (unsigned t = 0; t < 100; ++t) {
    const auto d = armax_record(truth, 500, 1000 + t);
    const auto reg = build_regression(terms, d);
    const auto ls = ls_estimate(reg.psi, reg.target);
    const auto els = els_estimate(reg.psi, reg.target);
    err_ls += std::abs(ls.theta(0) - truth.a) + std::abs(ls.theta(1) - truth.b);
    err_els += std::abs(els.theta(0) - truth.a) + std::abs(els.theta(1) - truth.b);
  }
  CHECK(err_els < err_ls);
}

TEST_CASE("constrained ls: inactive constraint gives plain ls") {
  const auto a = oracle::gaussian(400, 41);
  const Eigen::MatrixXd psi = Eigen::Map<const Eigen::MatrixXd>(a.data(), 200, 2);
  const Eigen::VectorXd y = psi * Eigen::Vector2d(0.3, 0.7);
  const auto r = constrained_ls_estimate(psi, y, {{Eigen::Vector2d(1.0, 1.0), 1.0}});
  CHECK(r.theta(0) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(r.theta(1) == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("constrained ls: solution on the constraint line, residual not smaller") {
  const auto a = oracle::gaussian(600, 51);
  const auto n = oracle::gaussian(200, 52, 0.3);
  const Eigen::MatrixXd psi = Eigen::Map<const Eigen::MatrixXd>(a.data(), 200, 3);
  Eigen::VectorXd y = psi * Eigen::Vector3d(0.5, 0.8, -0.2);
  y += Eigen::Map<const Eigen::VectorXd>(n.data(), 200);
  const LinearConstraint c{Eigen::Vector3d(1.0, 1.0, 0.0), 1.0};
  const auto con = constrained_ls_estimate(psi, y, {c});
  const auto free = ls_estimate(psi, y);
  CHECK(std::abs(con.theta(0) + con.theta(1) - 1.0) < 1e-10);
  CHECK(con.residuals.norm() >= free.residuals.norm() - 1e-12);
}

TEST_CASE("constrained ls: sigma-y constraint on lagged outputs") {
  // a random walk plus input effect: the true output coefficients sum to one
  const auto u = oracle::uniform(600, 61, -1.0, 1.0);
  const auto w = oracle::gaussian(600, 62, 0.01);
  TimeSeriesData d;
  d.u = u;
  d.y.assign(600, 0.0);
  for (std::size_t k = 2; k < 600; ++k) {
    d.y[k] = 0.7 * d.y[k - 1] + 0.3 * d.y[k - 2] + 0.1 * u[k - 1] + w[k];
  }
  const std::vector<RegressorTerm> terms{RegressorTerm::parse("y(k-1)"),
                                         RegressorTerm::parse("y(k-2)"),
                                         RegressorTerm::parse("u(k-1)")};
  const auto reg = build_regression(terms, d);
  const auto r = constrained_ls_estimate(reg.psi, reg.target, {sigma_y_constraint(terms)});
  CHECK(std::abs(r.theta(0) + r.theta(1) - 1.0) < 1e-10);
}

TEST_CASE("constrained ls: published valve model satisfies the constraint") {
  const auto& m = find_preset("valve-narx-constrained").narx();
  CHECK(std::abs(sigma_y(m.process_terms, m.theta) - 1.0) < 1e-12);
}

TEST_CASE("constrained ls: errors") {
  const Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(4, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  const LinearConstraint c1{Eigen::Vector2d(1.0, 1.0), 1.0};
  const LinearConstraint c2{Eigen::Vector2d(2.0, 2.0), 2.0};
  const LinearConstraint c3{Eigen::Vector2d(1.0, 1.0), 3.0};
  CHECK_THROWS_AS(constrained_ls_estimate(psi, y, {c1, c2}), ConstraintError);
  CHECK_THROWS_AS(constrained_ls_estimate(psi, y, {c1, c3}), ConstraintError);
  const LinearConstraint wrong{Eigen::Vector3d(1.0, 1.0, 1.0), 1.0};
  CHECK_THROWS_AS(constrained_ls_estimate(psi, y, {wrong}), Error);
}

TEST_CASE("variance helper") {
  CHECK(variance(Eigen::VectorXd()) == 0.0);
  CHECK(variance(Eigen::Vector3d(1.0, 2.0, 3.0)) == doctest::Approx(2.0 / 3.0));
}
