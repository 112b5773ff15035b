#include "narx/evaluation.hpp"

#include "narx/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace narx {

double mape(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw ParameterError("MAPE inputs differ in length");
  if (y.empty()) throw ParameterError("MAPE of an empty sequence");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double range = std::abs(*hi - *lo);
  if (!(range > 0.0)) throw DegenerateRangeError("MAPE reference has zero range");
  double sum = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) sum += std::abs(y[k] - yhat[k]);
  return 100.0 * sum / (static_cast<double>(y.size()) * range);
}

ValidationResult validate(const NarxModel& model, const TimeSeriesData& data,
                          ValidationMode mode) {
  data.validate();
  ValidationResult r;
  r.first = static_cast<std::size_t>(narx::max_lag(model.process_terms));
  if (data.size() <= r.first) throw InsufficientDataError("validation record too short");
  const std::span<const double> reference(data.y.data() + r.first, data.size() - r.first);

  if (mode == ValidationMode::OneStep) {
    r.prediction = one_step_predict(model, data);
  } else {
    const std::span<const double> init(data.y.data(), r.first);
    auto sim = free_run_simulate(model, data.u, init);
    if (sim.diverged) {
      r.diverged = true;
      r.mape = std::numeric_limits<double>::infinity();
      r.prediction.assign(sim.y.begin() + static_cast<std::ptrdiff_t>(r.first), sim.y.end());
      return r;
    }
    r.prediction.assign(sim.y.begin() + static_cast<std::ptrdiff_t>(r.first), sim.y.end());
  }
  r.mape = mape(reference, r.prediction);
  return r;
}

CandidateSet CandidateSpec::build() const {
  auto set = generate_candidates(degree, ny, nu, delay, variables, include_constant);
  if (hysteresis) set = apply_exclusion_rules(set, *hysteresis).kept;
  return set;
}

GeneratedData generate_data(const BenchmarkSystem& system, std::span<const double> u,
                            double noise_ratio, Rng& rng) {
  const auto y = system.simulate(u);
  GeneratedData g;
  g.data.ts = system.identification_ts();
  g.data.label = system.name;
  const std::size_t step = std::max<std::size_t>(1, system.decimation);
  for (std::size_t k = 0; k < u.size(); k += step) {
    g.data.u.push_back(u[k]);
    g.y_clean.push_back(y[k]);
  }
  g.data.y = add_output_noise(g.y_clean, noise_ratio, rng);
  return g;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

namespace {

std::string structure_string(const NarxModel& m) {
  std::string s;
  for (const auto& t : m.process_terms) {
    if (!s.empty()) s += " + ";
    s += t.to_string();
  }
  return s;
}

}  // namespace

MonteCarloReport monte_carlo_noise_sweep(const BenchmarkSystem& system,
                                         const PipelineConfig& config,
                                         std::span<const double> ratios, std::size_t trials,
                                         std::uint64_t base_seed, unsigned threads) {
  if (trials < 1) throw ParameterError("Monte Carlo needs at least one trial per ratio");
  if (ratios.empty()) throw ParameterError("Monte Carlo needs at least one noise ratio");
  if (!std::is_sorted(ratios.begin(), ratios.end())) {
    throw ParameterError("noise ratios must be ascending");
  }

  InputDesignSpec valid_spec = config.design;
  valid_spec.seed = derive_seed(base_seed, 0xB);
  Rng unused(0);
  const auto valid = generate_data(system, design_input(valid_spec), 0.0, unused);
  const auto candidates = config.candidates.build();

  MonteCarloReport report;
  report.ratios.assign(ratios.begin(), ratios.end());
  report.trials = trials;
  const std::size_t nr = ratios.size();
  report.seeds.assign(nr, std::vector<std::uint64_t>(trials));
  report.mapes.assign(nr, std::vector<double>(trials, std::numeric_limits<double>::quiet_NaN()));
  report.structures.assign(nr, std::vector<std::string>(trials));
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t t = 0; t < trials; ++t) report.seeds[r][t] = derive_seed(base_seed, r + 1, t);

  auto run_trial = [&](std::size_t job) {
    const std::size_t r = job / trials, t = job % trials;
    const std::uint64_t seed = report.seeds[r][t];
    try {
      InputDesignSpec spec = config.design;
      spec.seed = derive_seed(seed, 0xA);
      Rng rng(derive_seed(seed, 0xC));
      const auto ident = generate_data(system, design_input(spec), ratios[r], rng);
      const auto sel = select_structure(candidates, ident.data, config.selection);
      const auto val = validate(sel.model, valid.data, config.validation_mode);
      report.structures[r][t] = structure_string(sel.model);
      if (!val.diverged && std::isfinite(val.mape)) report.mapes[r][t] = val.mape;
    } catch (const Error&) {
      // counted as a failure below
    }
  };

  const std::size_t jobs = nr * trials;
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) run_trial(job);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  for (std::size_t r = 0; r < nr; ++r) {
    std::vector<double> ok;
    for (double m : report.mapes[r])
      if (std::isfinite(m)) ok.push_back(m);
    report.failures.push_back(static_cast<int>(trials - ok.size()));
    double mean = std::numeric_limits<double>::quiet_NaN(), sd = 0.0;
    if (!ok.empty()) {
      mean = std::accumulate(ok.begin(), ok.end(), 0.0) / static_cast<double>(ok.size());
      sd = sample_std(ok);
    }
    report.mape_mean.push_back(mean);
    report.mape_std.push_back(sd);
  }
  return report;
}

}  // namespace narx
