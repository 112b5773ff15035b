// Command-line front end for the NARX identification toolkit.
//
// Configuration precedence, lowest to highest: built-in defaults for the
// selected system, the --config file, then individual flags.  Output files go
// to --out, else the config's output_dir, else $NARX_OUTPUT_DIR, else the
// current directory.

#include "narx/benchmarks.hpp"
#include "narx/errors.hpp"
#include "narx/evaluation.hpp"
#include "narx/experiment.hpp"
#include "narx/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace narx;

namespace {

constexpr const char* kOutputEnv = "NARX_OUTPUT_DIR";

struct CommonOptions {
  std::string config_path;
  std::string system;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_ratio;
  std::string data_path;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_noise = true, bool with_data = true) {
  cmd->add_option("-c,--config", o.config_path, "Experiment configuration file (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--system", o.system, "heating, piezo, valve or csv");
  cmd->add_option("--seed", o.seed, "Base random seed");
  if (with_noise) {
    cmd->add_option("--noise-ratio", o.noise_ratio, "Output noise std / signal std (fraction)");
  }
  if (with_data) {
    cmd->add_option("-d,--data", o.data_path, "CSV data record (k,u,y)")->check(CLI::ExistingFile);
  }
  cmd->add_option("-o,--out", o.out_dir, "Output directory");
}

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig c;
  if (!o.config_path.empty()) {
    c = load_config(o.config_path);
    if (!o.system.empty()) c.system = o.system;
  } else {
    c = default_config(o.system.empty() ? "heating" : o.system);
  }
  if (o.seed) c.seed = *o.seed;
  if (o.noise_ratio) c.noise_ratio = *o.noise_ratio;
  if (!o.data_path.empty()) c.data_path = o.data_path;
  if (!o.out_dir.empty()) {
    c.output_dir = o.out_dir;
  } else if (c.output_dir.empty()) {
    const char* env = std::getenv(kOutputEnv);
    c.output_dir = env && *env ? env : ".";
  }
  c.validate();
  return c;
}

fs::path out_path(const ExperimentConfig& c, const std::string& name) {
  return fs::path(c.output_dir) / name;
}

void report_written(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

InputDesignSpec seeded_design(const ExperimentConfig& c, std::uint64_t seed) {
  InputDesignSpec d = c.design;
  d.seed = seed;
  return d;
}

// Identification data: either the configured CSV or a simulated benchmark run
// with the design seeded by the base seed and the noise by a derived seed.
GeneratedData identification_data(const ExperimentConfig& c) {
  if (!c.data_path.empty()) {
    auto file = io::read_data_csv(c.data_path, 1.0 / c.design.sample_rate);
    GeneratedData g;
    g.data = std::move(file.data);
    if (file.y_clean) g.y_clean = std::move(*file.y_clean);
    return g;
  }
  const auto system = c.benchmark();
  const auto u = design_input(seeded_design(c, c.seed));
  Rng rng(derive_seed(c.seed, 0xC));
  return generate_data(system, u, c.noise_ratio, rng);
}

int cmd_design_input(const CommonOptions& o) {
  const auto c = resolve(o);
  const auto spec = seeded_design(c, c.seed);
  const auto u = design_input(spec);
  const auto path = out_path(c, "input.csv");
  io::write_columns_csv(path, {"u"}, {u});
  io::Json log = {{"command", "design-input"},
                  {"seed", c.seed},
                  {"samples", u.size()},
                  {"config", config_to_json(c)}};
  const auto log_path = out_path(c, "design_log.json");
  io::write_json_file(log_path, log);
  report_written(path);
  report_written(log_path);
  return 0;
}

int cmd_simulate(const CommonOptions& o, const std::string& input_path, const std::string& preset,
                 std::size_t periods) {
  const auto c = resolve(o);
  std::vector<double> u;
  const Preset* p = preset.empty() ? nullptr : &find_preset(preset);
  double ts = 1.0 / c.design.sample_rate;
  if (p) {
    ts = p->is_narx() ? p->narx().meta.ts : std::get<BoucWenParams>(p->system).dt;
  }
  if (!input_path.empty()) {
    u = io::read_input_csv(input_path);
  } else if (p) {
    const auto n = static_cast<std::size_t>(
        std::ceil(static_cast<double>(periods) / (c.sine.frequency * ts)));
    u = sine_input(c.sine.amplitude, c.sine.frequency, c.sine.phase, c.sine.offset, n, ts);
  } else {
    u = design_input(seeded_design(c, c.seed));
  }

  std::vector<double> y_clean, h;
  if (p && p->is_narx()) {
    const std::vector<double> rest(static_cast<std::size_t>(p->narx().max_lag()), 0.0);
    const auto sim = free_run_simulate(p->narx(), u, rest);
    if (sim.diverged) throw Error(preset + ": free-run simulation diverged");
    y_clean = sim.y;
  } else if (p) {
    auto params = std::get<BoucWenParams>(p->system);
    auto r = simulate_bouc_wen(params, u);
    if (r.diverged) throw Error(preset + ": simulation diverged");
    y_clean = std::move(r.y);
    h = std::move(r.h);
  } else {
    const auto system = c.benchmark();
    if (const auto* bw = std::get_if<BoucWenParams>(&system.dynamics)) {
      BoucWenParams params = *bw;
      params.dt = system.ts;
      auto r = simulate_bouc_wen(params, u);
      if (r.diverged) throw Error(system.name + ": simulation diverged");
      y_clean = std::move(r.y);
      h = std::move(r.h);
    } else {
      y_clean = system.simulate(u);
    }
  }
  Rng rng(derive_seed(c.seed, 0xC));
  const auto y = add_output_noise(y_clean, c.noise_ratio, rng);

  std::vector<std::string> names{"u", "y", "y_clean"};
  std::vector<std::span<const double>> cols{u, y, y_clean};
  if (!h.empty()) {
    names.emplace_back("h");
    cols.emplace_back(h);
  }
  const auto path = out_path(c, "simulated.csv");
  io::write_columns_csv(path, names, cols);
  report_written(path);
  return 0;
}

int cmd_identify(const CommonOptions& o) {
  const auto c = resolve(o);
  const auto g = identification_data(c);
  auto candidates = generate_candidates(c.candidates.degree, c.candidates.ny, c.candidates.nu,
                                        c.candidates.delay, c.candidates.variables,
                                        c.candidates.include_constant);
  candidates.meta.ts = g.data.ts;
  std::optional<ExclusionResult> exclusions;
  if (c.candidates.hysteresis) {
    exclusions = apply_exclusion_rules(candidates, *c.candidates.hysteresis);
    candidates = exclusions->kept;
    if (c.candidates.hysteresis->direction == Direction::Inverse) {
      candidates.meta.direction = Direction::Inverse;
    }
  }
  const auto result = select_structure(candidates, g.data, c.selection);

  const auto model_path = out_path(c, "model.json");
  io::save_model(model_path, result.model);
  io::write_ranking_csv(out_path(c, "err_ranking.csv"), result.ranking);
  io::write_aic_csv(out_path(c, "aic.csv"), result.aic);
  io::write_residuals_csv(out_path(c, "residuals.csv"), result.report,
                          static_cast<std::size_t>(result.model.max_lag()));
  io::write_data_csv(out_path(c, "identification_data.csv"), g.data,
                     g.y_clean.empty() ? nullptr : &g.y_clean);
  if (exclusions) io::write_exclusions_csv(out_path(c, "exclusions.csv"), *exclusions);
  io::Json report = {{"command", "identify"},
                     {"candidates", candidates.terms.size()},
                     {"aic_argmin", result.aic.argmin},
                     {"selected_terms", result.model.process_terms.size()},
                     {"estimation", io::report_to_json(result.report)},
                     {"sigma_y", sigma_y(result.model.process_terms, result.model.theta)},
                     {"config", config_to_json(c)}};
  io::write_json_file(out_path(c, "report.json"), report);

  std::cout << "candidates: " << candidates.terms.size() << "\n"
            << "AIC minimum at " << result.aic.argmin << " terms\n";
  for (std::size_t i = 0; i < result.model.process_terms.size(); ++i) {
    std::cout << "  " << result.model.process_terms[i].to_string() << " = "
              << io::format_double(result.model.theta[i]) << '\n';
  }
  report_written(model_path);
  return 0;
}

int cmd_validate(const CommonOptions& o, const std::string& model_path, const std::string& mode,
                 bool sine) {
  auto c = resolve(o);
  if (!mode.empty()) c.validation_mode = mode == "one-step" ? ValidationMode::OneStep
                                                            : ValidationMode::FreeRun;
  const auto model = io::load_model(model_path);

  TimeSeriesData data;
  if (!c.data_path.empty()) {
    data = io::read_data_csv(c.data_path, model.meta.ts).data;
  } else {
    const auto system = c.benchmark();
    std::vector<double> u;
    if (sine) {
      u = sine_input(c.sine.amplitude, c.sine.frequency, c.sine.phase, c.sine.offset,
                     c.sine.length, system.ts);
    } else {
      u = design_input(seeded_design(c, derive_seed(c.seed, 0xB)));
    }
    Rng unused(0);
    data = generate_data(system, u, 0.0, unused).data;
  }
  auto r = validate(model, data, c.validation_mode);
  r.prediction.resize(data.size() - r.first, std::numeric_limits<double>::quiet_NaN());

  std::vector<double> u(data.u.begin() + static_cast<std::ptrdiff_t>(r.first), data.u.end());
  std::vector<double> y(data.y.begin() + static_cast<std::ptrdiff_t>(r.first), data.y.end());
  const auto pred_path = out_path(c, "prediction.csv");
  io::write_columns_csv(pred_path, {"u", "y", "y_hat"}, {u, y, r.prediction});
  io::Json report = {{"command", "validate"},
                     {"model", model_path},
                     {"mode", c.validation_mode == ValidationMode::FreeRun ? "free-run"
                                                                            : "one-step"},
                     {"input", !c.data_path.empty() ? "data" : (sine ? "sine" : "designed")},
                     {"first_sample", r.first},
                     {"diverged", r.diverged},
                     {"mape_percent", io::format_double(r.mape)}};
  io::write_json_file(out_path(c, "validation.json"), report);
  std::cout << "MAPE: " << io::format_double(r.mape) << " %"
            << (r.diverged ? " (free run diverged)" : "") << '\n';
  report_written(pred_path);
  return 0;
}

int cmd_monte_carlo(const CommonOptions& o, std::optional<std::size_t> trials,
                    const std::string& ratios_percent, std::optional<unsigned> threads) {
  auto c = resolve(o);
  if (trials) c.mc_trials = *trials;
  if (!ratios_percent.empty()) {
    c.mc_ratios.clear();
    for (double r : parse_number_list(ratios_percent)) c.mc_ratios.push_back(r / 100.0);
  }
  if (threads) c.mc_threads = *threads;
  c.validate();
  const auto report = monte_carlo_noise_sweep(c.benchmark(), c.pipeline(), c.mc_ratios,
                                              c.mc_trials, c.seed, c.mc_threads);
  const auto path = out_path(c, "monte_carlo.csv");
  io::write_monte_carlo_csv(path, report);
  io::write_monte_carlo_trials_csv(out_path(c, "monte_carlo_trials.csv"), report);
  std::cout << "ratio,mean_mape,std_mape,failures\n";
  for (std::size_t r = 0; r < report.ratios.size(); ++r) {
    std::cout << io::format_double(report.ratios[r]) << ','
              << io::format_double(report.mape_mean[r]) << ','
              << io::format_double(report.mape_std[r]) << ',' << report.failures[r] << '\n';
  }
  report_written(path);
  return 0;
}

int cmd_presets_list() {
  for (const auto& p : preset_models()) {
    std::cout << p.name << "  " << p.description << '\n';
  }
  return 0;
}

int cmd_presets_show(const std::string& name) {
  const auto& p = find_preset(name);
  io::Json j;
  j["name"] = p.name;
  j["description"] = p.description;
  if (!p.note.empty()) j["note"] = p.note;
  if (p.is_narx()) {
    j["model"] = io::model_to_json(p.narx());
    j["sigma_y"] = sigma_y(p.narx().process_terms, p.narx().theta);
  } else {
    const auto& b = std::get<BoucWenParams>(p.system);
    j["bouc_wen"] = {{"alpha", b.alpha}, {"beta", b.beta}, {"gamma", b.gamma},
                     {"nu_y", b.nu_y},   {"dt", b.dt}};
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NARX polynomial model identification toolkit"};
  app.require_subcommand(1);
  app.footer(std::string("Flags override the --config file, which overrides built-in defaults.\n"
                         "Default output directory: $") +
             kOutputEnv + ", else the current directory.");

  CommonOptions design_opts, sim_opts, ident_opts, valid_opts, mc_opts;

  auto* design = app.add_subcommand("design-input", "Generate an excitation signal (k,u CSV)");
  add_common(design, design_opts, false, false);

  std::string sim_input, sim_preset;
  std::size_t sim_periods = 3;
  auto* simulate = app.add_subcommand("simulate", "Simulate a benchmark or preset (k,u,y CSV)");
  add_common(simulate, sim_opts, true, false);
  simulate->add_option("-i,--input", sim_input, "Input CSV with a u column")
      ->check(CLI::ExistingFile);
  simulate->add_option("-p,--preset", sim_preset, "Simulate a published model instead");
  simulate->add_option("--periods", sim_periods, "Sine periods when a preset runs without --input")
      ->check(CLI::PositiveNumber);

  auto* identify = app.add_subcommand("identify", "Select a structure and estimate a model");
  add_common(identify, ident_opts);

  std::string model_path, valid_mode;
  bool valid_sine = false;
  auto* validate_cmd = app.add_subcommand("validate", "Score a model file by MAPE");
  add_common(validate_cmd, valid_opts, false, true);
  validate_cmd->add_option("-m,--model", model_path, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  validate_cmd->add_option("--mode", valid_mode, "free-run or one-step")
      ->check(CLI::IsMember({"free-run", "one-step"}));
  validate_cmd->add_flag("--sine", valid_sine, "Validate on the configured sinusoidal input");

  std::optional<std::size_t> mc_trials;
  std::optional<unsigned> mc_threads;
  std::string mc_ratios;
  auto* mc = app.add_subcommand("monte-carlo", "Noise-robustness sweep");
  add_common(mc, mc_opts, false, false);
  mc->add_option("--trials", mc_trials, "Trials per noise ratio")->check(CLI::PositiveNumber);
  mc->add_option("--ratios", mc_ratios, "Noise ratios in percent: 0:2:30 or 0,10,20");
  mc->add_option("--threads", mc_threads, "Worker threads (0 = all cores)");

  std::string preset_name;
  auto* presets = app.add_subcommand("presets", "Published model catalog");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "List preset names");
  auto* presets_show = presets->add_subcommand("show", "Print one preset");
  presets_show->add_option("name", preset_name, "Preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*design) return cmd_design_input(design_opts);
    if (*simulate) return cmd_simulate(sim_opts, sim_input, sim_preset, sim_periods);
    if (*identify) return cmd_identify(ident_opts);
    if (*validate_cmd) return cmd_validate(valid_opts, model_path, valid_mode, valid_sine);
    if (*mc) return cmd_monte_carlo(mc_opts, mc_trials, mc_ratios, mc_threads);
    if (*presets_list) return cmd_presets_list();
    if (*presets_show) return cmd_presets_show(preset_name);
  } catch (const narx::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
