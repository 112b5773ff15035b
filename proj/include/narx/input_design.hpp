#pragma once

/** @file
 * Excitation-signal design: low-pass filtered Gaussian noise scaled around a
 * set of operating points, one segment per frequency of interest, followed by
 * a smoothing pass over the concatenation.  Also output-noise injection and
 * sinusoidal validation inputs.
 */

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace narx {

using Rng = std::mt19937_64;

struct InputDesignSpec {
  /// One frequency of interest per segment, Hz.
  std::vector<double> frequencies;
  /// Samples per segment; each must be a multiple of the operating point
  /// count unless allow_uneven_blocks is set.
  std::vector<std::size_t> segment_lengths;
  std::vector<double> operating_points;
  /// Excursion allowed around each operating point.
  std::vector<double> amplitudes;
  double sample_rate = 1.0;
  int filter_order = 5;
  std::uint64_t seed = 1;
  /// Accept segment lengths that do not split evenly; block j then covers
  /// samples [j N_i / v, (j + 1) N_i / v) with integer division.
  bool allow_uneven_blocks = false;

  std::size_t total_length() const noexcept;
  /// Throws ParameterError naming the violated condition.
  void validate() const;
};

/// Second-order section b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct FilterSpec {
  int order = 0;
  double cutoff = 0.0;
  double sample_rate = 1.0;
  /// Transfer function coefficients in powers of z^-1, a[0] = 1.
  std::vector<double> numerator;
  std::vector<double> denominator;
  std::vector<std::complex<double>> poles;
  /// Cascade used for filtering; each section has unit DC gain.
  std::vector<Biquad> sections;

  std::complex<double> response(double frequency) const;
  double magnitude(double frequency) const { return std::abs(response(frequency)); }
  bool stable() const;
};

/// Digital Butterworth low-pass from the analog prototype by the bilinear
/// transform with the cutoff prewarped, so |H(cutoff)| = 1/sqrt(2).
FilterSpec design_butterworth(int order, double cutoff, double sample_rate);

/// Causal filtering.  With steady_state_start the filter starts as if the
/// first sample had been applied forever, instead of from rest.
std::vector<double> apply_filter(const FilterSpec& filter, std::span<const double> x,
                                 bool steady_state_start = false);

/// Affine map onto [-1, 1]: 2 (e - min) / (max - min) - 1.
std::vector<double> normalize_unit_range(std::span<const double> e);

/// Segment i: normalized Gaussian noise, filtered at frequencies[i], split
/// into one block per operating point, each block scaled so that its peak
/// absolute excursion equals the block amplitude, then offset.
std::vector<double> design_segment(std::size_t i, const InputDesignSpec& spec, Rng& rng);

/// All segments concatenated and smoothed by the filter of the highest
/// frequency (started at steady state on the first sample).
std::vector<double> design_input(const InputDesignSpec& spec, Rng& rng);
/// Same, drawing from a generator seeded with spec.seed.
std::vector<double> design_input(const InputDesignSpec& spec);

/// Standard deviation with the n-1 normalization.
double sample_std(std::span<const double> x);

/// y + w with w white Gaussian, std(w) = ratio * sample_std(y).
std::vector<double> add_output_noise(std::span<const double> y, double ratio, Rng& rng);

/// u(k) = amplitude sin(2 pi f k ts + phase) + offset, k = 0..n-1.
std::vector<double> sine_input(double amplitude, double frequency, double phase, double offset,
                               std::size_t n, double ts);

}  // namespace narx
