#pragma once

// Independent reference implementations used as oracles by the tests.  None
// of these call into the library code they check.

#include "narx/core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct LaggedVar {
  std::string symbol;
  int lag;
};

inline std::vector<LaggedVar> lagged_vars(int ny, int nu, int delay,
                                          const std::vector<std::string>& kinds) {
  std::vector<LaggedVar> out;
  for (const auto& k : kinds) {
    const bool output_like = k == "y" || k == "e";
    const int lo = output_like ? 1 : delay;
    const int hi = output_like ? ny : nu;
    for (int lag = lo; lag <= hi; ++lag) out.push_back({k, lag});
  }
  return out;
}

// Every exponent vector over the lagged variables with total degree in
// [1, degree], rendered as a sorted set of "sym(k-lag)^e" factor strings.
inline std::set<std::string> brute_force_monomials(const std::vector<LaggedVar>& vars,
                                                   int degree) {
  std::set<std::string> out;
  std::vector<int> exps(vars.size(), 0);
  auto emit = [&] {
    int total = 0;
    for (int e : exps) total += e;
    if (total < 1 || total > degree) return;
    std::set<std::string> factors;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (exps[i] == 0) continue;
      std::string f = vars[i].symbol + "(k-" + std::to_string(vars[i].lag) + ")";
      if (exps[i] > 1) f += "^" + std::to_string(exps[i]);
      factors.insert(f);
    }
    std::string joined;
    for (const auto& f : factors) joined += (joined.empty() ? "" : "|") + f;
    out.insert(joined);
  };
  // odometer over exponents 0..degree
  while (true) {
    emit();
    std::size_t i = 0;
    while (i < exps.size() && exps[i] == degree) exps[i++] = 0;
    if (i == exps.size()) break;
    ++exps[i];
  }
  return out;
}

// Same rendering applied to a library term, so both sides can be compared.
inline std::string factor_key(const narx::RegressorTerm& t) {
  std::set<std::string> factors;
  for (const auto& f : t.factors()) {
    std::string s = std::string(narx::variable_symbol(f.variable)) + "(k-" +
                    std::to_string(f.lag) + ")";
    if (f.exponent > 1) s += "^" + std::to_string(f.exponent);
    factors.insert(s);
  }
  std::string joined;
  for (const auto& f : factors) joined += (joined.empty() ? "" : "|") + f;
  return joined;
}

inline long binomial(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Least squares through the SVD, a different factorization from the
// library's QR path.
inline Eigen::VectorXd svd_ls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

inline std::vector<double> gaussian(std::size_t n, unsigned seed, double sd = 1.0) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

inline std::vector<double> uniform(std::size_t n, unsigned seed, double lo, double hi) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

inline double stddev(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

// Direct-form difference equation a[0] y(k) = sum b_i x(k-i) - sum_{i>0} a_i y(k-i).
inline std::vector<double> difference_equation(const std::vector<double>& b,
                                               const std::vector<double>& a,
                                               const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < b.size() && i <= k; ++i) acc += b[i] * x[k - i];
    for (std::size_t i = 1; i < a.size() && i <= k; ++i) acc -= a[i] * y[k - i];
    y[k] = acc / a[0];
  }
  return y;
}

// Magnitude of the digital Butterworth response obtained from the analog
// prototype |H(jW)|^2 = 1 / (1 + (W / Wc)^(2n)) under the bilinear map
// W = tan(pi f / fs), with the cutoff prewarped the same way.
inline double butterworth_magnitude(int order, double cutoff, double fs, double f) {
  const double pi = 3.14159265358979323846;
  const double ratio = std::tan(pi * f / fs) / std::tan(pi * cutoff / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(ratio, 2.0 * order));
}

}  // namespace oracle
