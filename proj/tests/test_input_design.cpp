#include "doctest.h"
#include "support.hpp"

#include "narx/errors.hpp"
#include "narx/input_design.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

using namespace narx;

namespace {

constexpr double kPi = 3.14159265358979323846;

InputDesignSpec heating_spec() {
  InputDesignSpec s;
  s.frequencies = {0.001, 0.005};
  s.segment_lengths = {999, 999};
  s.operating_points = {0.3, 0.5, 0.7};
  s.amplitudes = {0.2, 0.2, 0.2};
  s.sample_rate = 0.1;
  return s;
}

InputDesignSpec piezo_spec() {
  InputDesignSpec s;
  s.frequencies = {0.2, 5.0};
  s.segment_lengths = {16000, 3200};
  s.operating_points = {0.0, 0.0};
  s.amplitudes = {25.0, 50.0};
  s.sample_rate = 200.0;
  return s;
}

// Periodogram power of x (mean removed) in bins above f_lo, as a fraction of the total.
double power_fraction_above(const std::vector<double>& x, double f_lo, double fs) {
  const std::size_t n = x.size();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double total = 0.0, above = 0.0;
  for (std::size_t b = 1; b <= n / 2; ++b) {
    std::complex<double> acc{};
    for (std::size_t k = 0; k < n; ++k) {
      acc += (x[k] - mean) * std::polar(1.0, -2.0 * kPi * static_cast<double>(b * k) /
                                                 static_cast<double>(n));
    }
    const double p = std::norm(acc);
    total += p;
    if (static_cast<double>(b) * fs / static_cast<double>(n) > f_lo) above += p;
  }
  return above / total;
}

}  // namespace

TEST_CASE("normalize to the unit range") {
  const std::vector<double> a{0.0, 5.0, 10.0};
  CHECK(normalize_unit_range(a) == std::vector<double>{-1.0, 0.0, 1.0});
  const std::vector<double> b{-1.0, 0.25, 1.0, -0.5};
  const auto nb = normalize_unit_range(b);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(nb[i] == doctest::Approx(b[i]).epsilon(1e-15));
  const auto g = normalize_unit_range(oracle::gaussian(1000, 3));
  CHECK(*std::min_element(g.begin(), g.end()) == -1.0);
  CHECK(*std::max_element(g.begin(), g.end()) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> flat(4, 2.0);
  CHECK_THROWS_AS(normalize_unit_range(flat), DegenerateRangeError);
}

TEST_CASE("butterworth: magnitude matches the prototype under the bilinear map") {
  for (int order : {1, 2, 3, 5, 6}) {
    for (double fc : {0.001, 0.05, 0.2, 0.45}) {
      const auto f = design_butterworth(order, fc, 1.0);
      CHECK(f.stable());
      CHECK(std::abs(f.magnitude(0.0) - 1.0) < 1e-6);
      CHECK(std::abs(f.magnitude(fc) - 1.0 / std::sqrt(2.0)) < 1e-3);
      for (double r : {0.1, 0.5, 0.9, 1.5, 2.0}) {
        const double freq = r * fc;
        if (freq >= 0.5) continue;
        CHECK(f.magnitude(freq) ==
              doctest::Approx(oracle::butterworth_magnitude(order, fc, 1.0, freq))
                  .epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("butterworth: fifth order stopband and structure") {
  const auto f = design_butterworth(5, 0.005, 1.0);
  const double db = 20.0 * std::log10(f.magnitude(0.05));
  CHECK(db == doctest::Approx(-100.0).epsilon(0.02));
  REQUIRE(f.numerator.size() == 6);
  REQUIRE(f.denominator.size() == 6);
  CHECK(f.denominator[0] == 1.0);
  // zeros all at z = -1: numerator proportional to binomial coefficients
  for (int i = 0; i <= 5; ++i) {
    CHECK(f.numerator[i] / f.numerator[0] ==
          doctest::Approx(static_cast<double>(oracle::binomial(5, i))).epsilon(1e-9));
  }
  for (const auto& p : f.poles) CHECK(std::abs(p) < 1.0);
  CHECK_THROWS_AS(design_butterworth(5, 0.6, 1.0), ParameterError);
  CHECK_THROWS_AS(design_butterworth(5, 0.0, 1.0), ParameterError);
}

TEST_CASE("butterworth: cascade equals the direct-form difference equation") {
  const auto f = design_butterworth(5, 0.1, 1.0);
  const auto x = oracle::gaussian(500, 8);
  const auto y = apply_filter(f, x);
  const auto ref = oracle::difference_equation(f.numerator, f.denominator, x);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(y[k] == doctest::Approx(ref[k]).epsilon(1e-9));
}

TEST_CASE("filtering from steady state leaves a constant untouched") {
  const auto f = design_butterworth(5, 0.01, 1.0);
  const std::vector<double> c(300, 0.7);
  const auto y = apply_filter(f, c, true);
  for (double v : y) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("segment: blocks stay within their excursion") {
  auto spec = heating_spec();
  Rng rng(5);
  const auto s = design_segment(0, spec, rng);
  REQUIRE(s.size() == 999);
  for (std::size_t j = 0; j < 3; ++j) {
    double peak = 0.0;
    for (std::size_t k = j * 333; k < (j + 1) * 333; ++k) {
      peak = std::max(peak, std::abs(s[k] - spec.operating_points[j]));
    }
    CHECK(peak == doctest::Approx(spec.amplitudes[j]).epsilon(1e-12));
  }
}

TEST_CASE("segment: power concentrated below twice the design frequency") {
  InputDesignSpec spec;
  spec.frequencies = {0.05};
  spec.segment_lengths = {2000};
  spec.operating_points = {0.0};
  spec.amplitudes = {1.0};
  Rng rng(9);
  const auto s = design_segment(0, spec, rng);
  CHECK(power_fraction_above(s, 0.1, 1.0) < 0.05);
}

TEST_CASE("design: spec validation") {
  auto spec = heating_spec();
  spec.segment_lengths = {1000, 1000};
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  spec.allow_uneven_blocks = true;
  CHECK_NOTHROW(spec.validate());
  spec.frequencies = {0.001, 0.06};
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  auto s2 = heating_spec();
  s2.amplitudes = {0.2};
  CHECK_THROWS_AS(s2.validate(), ParameterError);
}

TEST_CASE("design: heating input visits every level in both segments") {
  auto spec = heating_spec();
  spec.segment_lengths = {1000, 1000};
  spec.allow_uneven_blocks = true;
  const auto u = design_input(spec);
  REQUIRE(u.size() == 2000);
  for (std::size_t seg = 0; seg < 2; ++seg) {
    for (std::size_t j = 0; j < 3; ++j) {
      const std::size_t begin = seg * 1000 + j * 1000 / 3, end = seg * 1000 + (j + 1) * 1000 / 3;
      const double mean = std::accumulate(u.begin() + static_cast<std::ptrdiff_t>(begin) + 50,
                                          u.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                          static_cast<double>(end - begin - 50);
      CHECK(std::abs(mean - spec.operating_points[j]) < 0.15);
    }
  }
}

TEST_CASE("design: single segment is the segment followed by the smoothing filter") {
  InputDesignSpec spec;
  spec.frequencies = {0.05};
  spec.segment_lengths = {600};
  spec.operating_points = {0.0, 1.0};
  spec.amplitudes = {0.5, 0.5};
  spec.seed = 44;
  Rng a(44);
  const auto seg = design_segment(0, spec, a);
  const auto expected = apply_filter(design_butterworth(5, 0.05, 1.0), seg, true);
  CHECK(design_input(spec) == expected);
}

TEST_CASE("design: piezo input grows in amplitude and stays in range") {
  const auto spec = piezo_spec();
  const auto u = design_input(spec);
  REQUIRE(u.size() == 19200);
  const auto peak = [&](std::size_t b, std::size_t e) {
    double p = 0.0;
    for (std::size_t k = b; k < e; ++k) p = std::max(p, std::abs(u[k]));
    return p;
  };
  CHECK(peak(0, 8000) <= 25.0 * 1.05);
  CHECK(peak(17600, 19200) > 30.0);
  // centred on the zero operating point
  const double mean = std::accumulate(u.begin(), u.end(), 0.0) / 19200.0;
  CHECK(std::abs(mean) < 0.25 * 50.0);
}

TEST_CASE("design: input bounded by the operating band plus the smoothing overshoot") {
  const auto h0 = heating_spec();
  const auto smoothing = design_butterworth(5, 0.005, h0.sample_rate);
  const std::vector<double> step(2000, 1.0);
  const auto response = apply_filter(smoothing, step);
  const double overshoot = *std::max_element(response.begin(), response.end()) - 1.0;
  CHECK(overshoot > 0.0);
  CHECK(overshoot < 0.15);
  const double margin = overshoot * (0.9 - 0.1);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto h = h0;
    h.seed = seed;
    const auto u = design_input(h);
    CHECK(*std::min_element(u.begin(), u.end()) >= 0.1 - margin);
    CHECK(*std::max_element(u.begin(), u.end()) <= 0.9 + margin);
  }
}

TEST_CASE("design: reproducible per seed, distinct across seeds") {
  auto spec = heating_spec();
  spec.seed = 17;
  const auto a = design_input(spec);
  const auto b = design_input(spec);
  CHECK(a == b);
  spec.seed = 18;
  CHECK(design_input(spec) != a);
}

TEST_CASE("output noise") {
  const auto y = oracle::uniform(2000, 5, 0.0, 1.0);
  Rng rng(3);
  CHECK(add_output_noise(y, 0.0, rng) == y);
  for (double ratio : {0.05, 0.30}) {
    const auto noisy = add_output_noise(y, ratio, rng);
    std::vector<double> w(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) w[k] = noisy[k] - y[k];
    CHECK(oracle::stddev(w) == doctest::Approx(ratio * oracle::stddev(y)).epsilon(0.05));
  }
  CHECK_THROWS_AS(add_output_noise(y, -0.1, rng), ParameterError);
}

TEST_CASE("sine input") {
  const auto c = sine_input(0.0, 0.1, 0.0, 3.0, 10, 0.01);
  for (double v : c) CHECK(v == 3.0);
  const auto s = sine_input(0.45, 0.1, kPi / 4.0, 3.0, 2001, 0.01);
  CHECK(s[0] == doctest::Approx(3.0 + 0.45 * std::sin(kPi / 4.0)));
  CHECK(s[1000] == doctest::Approx(s[0]).epsilon(1e-12));
  CHECK(s[500] == doctest::Approx(3.0 - 0.45 * std::sin(kPi / 4.0)).epsilon(1e-12));
}
