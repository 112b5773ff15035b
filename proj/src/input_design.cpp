#include "narx/input_design.hpp"

#include "narx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace narx {

std::size_t InputDesignSpec::total_length() const noexcept {
  return std::accumulate(segment_lengths.begin(), segment_lengths.end(), std::size_t{0});
}

void InputDesignSpec::validate() const {
  if (frequencies.empty()) throw ParameterError("input design needs at least one frequency");
  if (segment_lengths.size() != frequencies.size()) {
    throw ParameterError("segment_lengths must have one entry per frequency");
  }
  if (operating_points.empty()) throw ParameterError("input design needs an operating point");
  if (amplitudes.size() != operating_points.size()) {
    throw ParameterError("amplitudes must have one entry per operating point");
  }
  if (!(sample_rate > 0.0)) throw ParameterError("sample_rate must be > 0");
  if (filter_order < 1) throw ParameterError("filter_order must be >= 1");
  const std::size_t v = operating_points.size();
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > 0.0) || !(frequencies[i] < 0.5 * sample_rate)) {
      throw ParameterError("frequency " + std::to_string(frequencies[i]) +
                           " Hz is not inside (0, Nyquist)");
    }
    if (segment_lengths[i] < v || (!allow_uneven_blocks && segment_lengths[i] % v != 0)) {
      throw ParameterError("segment length " + std::to_string(segment_lengths[i]) +
                           " is not a positive multiple of the " + std::to_string(v) +
                           " operating points");
    }
  }
  for (double g : amplitudes) {
    if (!(g > 0.0)) throw ParameterError("amplitudes must be > 0");
  }
}

// ---------------------------------------------------------------------------
// Butterworth

std::complex<double> FilterSpec::response(double frequency) const {
  const double w = 2.0 * std::numbers::pi * frequency / sample_rate;
  const std::complex<double> zinv = std::polar(1.0, -w);
  std::complex<double> h = 1.0;
  for (const auto& s : sections) {
    h *= (s.b0 + zinv * (s.b1 + zinv * s.b2)) / (1.0 + zinv * (s.a1 + zinv * s.a2));
  }
  return h;
}

bool FilterSpec::stable() const {
  return std::all_of(poles.begin(), poles.end(), [](auto p) { return std::abs(p) < 1.0; });
}

namespace {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

FilterSpec design_butterworth(int order, double cutoff, double sample_rate) {
  if (order < 1) throw ParameterError("filter order must be >= 1");
  if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be > 0");
  if (!(cutoff > 0.0) || !(cutoff < 0.5 * sample_rate)) {
    throw ParameterError("cutoff " + std::to_string(cutoff) + " Hz outside (0, " +
                         std::to_string(0.5 * sample_rate) + ") Hz");
  }

  FilterSpec f;
  f.order = order;
  f.cutoff = cutoff;
  f.sample_rate = sample_rate;

  const double k2 = 2.0 * sample_rate;
  const double warped = k2 * std::tan(std::numbers::pi * cutoff / sample_rate);
  auto bilinear = [k2](std::complex<double> s) { return (k2 + s) / (k2 - s); };

  // Analog poles in the upper half plane pair with their conjugates; an odd
  // order leaves one real pole at -warped.
  for (int k = 0; k < order / 2; ++k) {
    const double angle = std::numbers::pi * (2.0 * k + 1.0 + order) / (2.0 * order);
    const std::complex<double> z = bilinear(std::polar(warped, angle));
    f.poles.push_back(z);
    f.poles.push_back(std::conj(z));
    Biquad s;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    const double g = (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = g;
    s.b1 = 2.0 * g;
    s.b2 = g;
    f.sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double z = bilinear({-warped, 0.0}).real();
    f.poles.emplace_back(z, 0.0);
    Biquad s;
    s.a1 = -z;
    const double g = (1.0 + s.a1) / 2.0;
    s.b0 = g;
    s.b1 = g;
    f.sections.push_back(s);
  }

  f.numerator = {1.0};
  f.denominator = {1.0};
  for (const auto& s : f.sections) {
    f.numerator = poly_mul(f.numerator, {s.b0, s.b1, s.b2});
    f.denominator = poly_mul(f.denominator, {1.0, s.a1, s.a2});
  }
  f.numerator.resize(static_cast<std::size_t>(order) + 1);
  f.denominator.resize(static_cast<std::size_t>(order) + 1);
  return f;
}

std::vector<double> apply_filter(const FilterSpec& filter, std::span<const double> x,
                                 bool steady_state_start) {
  std::vector<double> y(x.begin(), x.end());
  if (y.empty()) return y;
  for (const auto& s : filter.sections) {
    // Transposed direct form II.
    double s1 = 0.0, s2 = 0.0;
    if (steady_state_start) {
      const double x0 = y.front();  // unit DC gain: steady output equals x0
      s2 = s.b2 * x0 - s.a2 * x0;
      s1 = x0 - s.b0 * x0;
    }
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + s1;
      s1 = s.b1 * in - s.a1 * out + s2;
      s2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// Signal design

std::vector<double> normalize_unit_range(std::span<const double> e) {
  if (e.empty()) throw DegenerateRangeError("cannot normalize an empty sequence");
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  const double min = *lo, max = *hi;
  if (!(max > min)) throw DegenerateRangeError("sequence has zero range");
  std::vector<double> out(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    out[k] = 2.0 * ((e[k] - min) / (max - min)) - 1.0;
  }
  out[static_cast<std::size_t>(lo - e.begin())] = -1.0;
  out[static_cast<std::size_t>(hi - e.begin())] = 1.0;
  return out;
}

std::vector<double> design_segment(std::size_t i, const InputDesignSpec& spec, Rng& rng) {
  spec.validate();
  if (i >= spec.frequencies.size()) throw ParameterError("segment index out of range");
  const std::size_t n = spec.segment_lengths[i];
  const std::size_t v = spec.operating_points.size();

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> e(n);
  for (double& x : e) x = normal(rng);
  e = normalize_unit_range(e);
  const auto filter = design_butterworth(spec.filter_order, spec.frequencies[i], spec.sample_rate);
  const auto filtered = apply_filter(filter, e);

  std::vector<double> s(n);
  for (std::size_t j = 0; j < v; ++j) {
    const std::size_t begin = j * n / v, end = (j + 1) * n / v;
    const auto first = filtered.begin() + static_cast<std::ptrdiff_t>(begin);
    const auto last = filtered.begin() + static_cast<std::ptrdiff_t>(end);
    double peak = 0.0;
    for (auto it = first; it != last; ++it) peak = std::max(peak, std::abs(*it));
    if (!(peak > 0.0)) {
      throw DegenerateRangeError("block " + std::to_string(j) + " of segment " +
                                 std::to_string(i) + " is identically zero");
    }
    const double alpha = spec.amplitudes[j] / peak;
    for (std::size_t k = begin; k < end; ++k) {
      s[k] = alpha * filtered[k] + spec.operating_points[j];
    }
  }
  return s;
}

std::vector<double> design_input(const InputDesignSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<double> u;
  u.reserve(spec.total_length());
  for (std::size_t i = 0; i < spec.frequencies.size(); ++i) {
    const auto s = design_segment(i, spec, rng);
    u.insert(u.end(), s.begin(), s.end());
  }
  const double fmax = *std::max_element(spec.frequencies.begin(), spec.frequencies.end());
  const auto smoothing = design_butterworth(spec.filter_order, fmax, spec.sample_rate);
  return apply_filter(smoothing, u, true);
}

std::vector<double> design_input(const InputDesignSpec& spec) {
  Rng rng(spec.seed);
  return design_input(spec, rng);
}

double sample_std(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

std::vector<double> add_output_noise(std::span<const double> y, double ratio, Rng& rng) {
  if (!(ratio >= 0.0)) throw ParameterError("noise ratio must be >= 0");
  std::vector<double> out(y.begin(), y.end());
  if (ratio == 0.0) return out;
  std::normal_distribution<double> normal(0.0, ratio * sample_std(y));
  for (double& v : out) v += normal(rng);
  return out;
}

std::vector<double> sine_input(double amplitude, double frequency, double phase, double offset,
                               std::size_t n, double ts) {
  std::vector<double> u(n);
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = amplitude * std::sin(2.0 * std::numbers::pi * frequency * static_cast<double>(k) * ts +
                                phase) +
           offset;
  }
  return u;
}

}  // namespace narx
