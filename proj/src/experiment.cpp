#include "narx/experiment.hpp"

#include "narx/errors.hpp"

#include <cmath>
#include <set>

namespace narx {

namespace fs = std::filesystem;
using io::Json;

namespace {

std::string estimator_name(Estimator e) { return e == Estimator::LS ? "ls" : "els"; }

Estimator parse_estimator(const std::string& s, const std::string& key) {
  if (s == "ls") return Estimator::LS;
  if (s == "els") return Estimator::ELS;
  throw FormatError(key + ": expected \"ls\" or \"els\", got \"" + s + "\"");
}

std::string mode_name(ValidationMode m) {
  return m == ValidationMode::FreeRun ? "free-run" : "one-step";
}

ValidationMode parse_mode(const std::string& s, const std::string& key) {
  if (s == "free-run") return ValidationMode::FreeRun;
  if (s == "one-step") return ValidationMode::OneStep;
  throw FormatError(key + ": expected \"free-run\" or \"one-step\", got \"" + s + "\"");
}

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw FormatError(path + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw FormatError(path + "." + key + ": unknown key");
  }
}

// Reads j[key] into out when present, reporting type errors with the full key path.
template <class T>
void get_if(const Json& j, const char* key, const std::string& path, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw FormatError(path + "." + key + ": wrong type (" + j.at(key).dump() + ")");
  }
}

Json design_to_json(const InputDesignSpec& d) {
  return {{"frequencies", d.frequencies},
          {"segment_lengths", d.segment_lengths},
          {"operating_points", d.operating_points},
          {"amplitudes", d.amplitudes},
          {"sample_rate", d.sample_rate},
          {"filter_order", d.filter_order},
          {"allow_uneven_blocks", d.allow_uneven_blocks}};
}

void design_from_json(const Json& j, InputDesignSpec& d) {
  const std::string p = "design";
  check_keys(j, p,
             {"frequencies", "segment_lengths", "operating_points", "amplitudes", "sample_rate",
              "filter_order", "allow_uneven_blocks"});
  get_if(j, "frequencies", p, d.frequencies);
  get_if(j, "segment_lengths", p, d.segment_lengths);
  get_if(j, "operating_points", p, d.operating_points);
  get_if(j, "amplitudes", p, d.amplitudes);
  get_if(j, "sample_rate", p, d.sample_rate);
  get_if(j, "filter_order", p, d.filter_order);
  get_if(j, "allow_uneven_blocks", p, d.allow_uneven_blocks);
}

Json candidates_to_json(const CandidateSpec& c) {
  Json vars = Json::array();
  for (auto v : c.variables) vars.push_back(std::string(variable_symbol(v)));
  Json j = {{"degree", c.degree},     {"ny", c.ny},
            {"nu", c.nu},             {"delay", c.delay},
            {"variables", vars},      {"include_constant", c.include_constant},
            {"hysteresis", nullptr}};
  if (c.hysteresis) {
    j["hysteresis"] = {{"rule_i", c.hysteresis->apply_rule_i},
                       {"rule_ii", c.hysteresis->apply_rule_ii},
                       {"rule_iii", c.hysteresis->apply_rule_iii},
                       {"direction", c.hysteresis->direction == Direction::Direct ? "direct"
                                                                                  : "inverse"}};
  }
  return j;
}

void candidates_from_json(const Json& j, CandidateSpec& c) {
  const std::string p = "candidates";
  check_keys(j, p,
             {"degree", "ny", "nu", "delay", "variables", "include_constant", "hysteresis"});
  get_if(j, "degree", p, c.degree);
  get_if(j, "ny", p, c.ny);
  get_if(j, "nu", p, c.nu);
  get_if(j, "delay", p, c.delay);
  get_if(j, "include_constant", p, c.include_constant);
  if (j.contains("variables")) {
    std::vector<std::string> names;
    get_if(j, "variables", p, names);
    c.variables.clear();
    for (const auto& n : names) {
      try {
        c.variables.push_back(parse_variable(n));
      } catch (const Error&) {
        throw FormatError(p + ".variables: unknown variable \"" + n + "\"");
      }
    }
  }
  if (j.contains("hysteresis")) {
    const auto& h = j.at("hysteresis");
    if (h.is_null() || (h.is_boolean() && !h.get<bool>())) {
      c.hysteresis.reset();
    } else if (h.is_boolean()) {
      c.hysteresis = HysteresisCandidateConfig{};
    } else {
      const std::string hp = p + ".hysteresis";
      check_keys(h, hp, {"rule_i", "rule_ii", "rule_iii", "direction"});
      HysteresisCandidateConfig cfg = c.hysteresis.value_or(HysteresisCandidateConfig{});
      get_if(h, "rule_i", hp, cfg.apply_rule_i);
      get_if(h, "rule_ii", hp, cfg.apply_rule_ii);
      get_if(h, "rule_iii", hp, cfg.apply_rule_iii);
      std::string dir = cfg.direction == Direction::Direct ? "direct" : "inverse";
      get_if(h, "direction", hp, dir);
      if (dir != "direct" && dir != "inverse") {
        throw FormatError(hp + ".direction: expected \"direct\" or \"inverse\"");
      }
      cfg.direction = dir == "direct" ? Direction::Direct : Direction::Inverse;
      c.hysteresis = cfg;
    }
  }
}

Json selection_to_json(const SelectionConfig& s) {
  return {{"aic_estimator", estimator_name(s.aic_estimator)},
          {"final_estimator", estimator_name(s.final_estimator)},
          {"enforce_sigma_y", s.enforce_sigma_y},
          {"max_terms", s.frols.max_terms},
          {"err_floor", s.frols.err_floor},
          {"els",
           {{"zeta", s.els.zeta},
            {"max_iterations", s.els.max_iterations},
            {"noise_terms", s.els.noise_terms}}}};
}

void selection_from_json(const Json& j, SelectionConfig& s) {
  const std::string p = "estimation";
  check_keys(j, p,
             {"aic_estimator", "final_estimator", "enforce_sigma_y", "max_terms", "err_floor",
              "els"});
  std::string aic = estimator_name(s.aic_estimator), fin = estimator_name(s.final_estimator);
  get_if(j, "aic_estimator", p, aic);
  get_if(j, "final_estimator", p, fin);
  s.aic_estimator = parse_estimator(aic, p + ".aic_estimator");
  s.final_estimator = parse_estimator(fin, p + ".final_estimator");
  get_if(j, "enforce_sigma_y", p, s.enforce_sigma_y);
  get_if(j, "max_terms", p, s.frols.max_terms);
  get_if(j, "err_floor", p, s.frols.err_floor);
  if (j.contains("els")) {
    const auto& e = j.at("els");
    check_keys(e, p + ".els", {"zeta", "max_iterations", "noise_terms"});
    get_if(e, "zeta", p + ".els", s.els.zeta);
    get_if(e, "max_iterations", p + ".els", s.els.max_iterations);
    get_if(e, "noise_terms", p + ".els", s.els.noise_terms);
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::set<std::string> systems{"heating", "piezo", "valve", "csv"};
  if (!systems.contains(system)) {
    throw ParameterError("system must be heating, piezo, valve or csv, got '" + system + "'");
  }
  if (system == "csv" && data_path.empty()) throw ParameterError("system 'csv' needs data_path");
  if (!data_path.empty() && !fs::exists(data_path)) {
    throw ParameterError("data_path '" + data_path + "' does not exist");
  }
  design.validate();
  if (candidates.degree < 1) throw ParameterError("candidates.degree must be >= 1");
  if (candidates.ny < 1) throw ParameterError("candidates.ny must be >= 1");
  if (candidates.delay < 1) throw ParameterError("candidates.delay must be >= 1");
  if (candidates.nu < candidates.delay) {
    throw ParameterError("candidates.nu must be >= candidates.delay");
  }
  if (candidates.variables.empty()) throw ParameterError("candidates.variables is empty");
  selection.els.validate();
  if (!(noise_ratio >= 0.0)) throw ParameterError("noise_ratio must be >= 0");
  if (mc_trials < 1) throw ParameterError("monte_carlo.trials must be >= 1");
  for (double r : mc_ratios) {
    if (!(r >= 0.0)) throw ParameterError("monte_carlo.ratios must be >= 0");
  }
  if (sine.length < 2) throw ParameterError("validation.sine.length must be >= 2");
}

PipelineConfig ExperimentConfig::pipeline() const {
  PipelineConfig p;
  p.design = design;
  p.design.seed = seed;
  p.candidates = candidates;
  p.selection = selection;
  p.noise_ratio = noise_ratio;
  p.validation_mode = validation_mode;
  return p;
}

BenchmarkSystem ExperimentConfig::benchmark() const {
  if (system == "heating") {
    auto s = heating_system();
    s.ts = 1.0 / design.sample_rate;
    return s;
  }
  if (system == "piezo") {
    auto s = piezo_system();
    s.ts = 1.0 / design.sample_rate;
    return s;
  }
  if (system == "valve") {
    throw DataUnavailableError(
        "valve: experimental data not distributed; the published valve models are available "
        "as presets (see 'presets list'), or point data_path at your own measurements");
  }
  throw ParameterError("system '" + system + "' is a data file, not a simulated benchmark");
}

ExperimentConfig default_config(const std::string& system) {
  ExperimentConfig c;
  c.system = system;
  if (system == "heating" || system == "csv") {
    c.design.frequencies = {0.001, 0.005};
    c.design.segment_lengths = {1000, 1000};
    c.design.operating_points = {0.3, 0.5, 0.7};
    c.design.amplitudes = {0.2, 0.2, 0.2};
    c.design.sample_rate = 0.1;
    c.design.allow_uneven_blocks = true;
    c.candidates.degree = 3;
    c.candidates.ny = 3;
    c.candidates.nu = 3;
    c.candidates.variables = {Variable::Output, Variable::Input};
    c.sine = {0.2, 0.002, 0.0, 0.5, 2000};
  } else if (system == "piezo") {
    c.design.frequencies = {0.2, 5.0};
    c.design.segment_lengths = {16000, 3200};
    c.design.operating_points = {0.0, 0.0};
    c.design.amplitudes = {25.0, 50.0};
    c.design.sample_rate = 200.0;
    c.candidates.degree = 3;
    c.candidates.ny = 1;
    c.candidates.nu = 1;
    c.candidates.variables = {Variable::Output, Variable::Input, Variable::Phi1, Variable::Phi2};
    c.candidates.hysteresis = HysteresisCandidateConfig{};
    c.sine = {30.0, 0.2, 0.0, 0.0, 3000};
  } else if (system == "valve") {
    c.design.frequencies = {0.1, 1.0};
    c.design.segment_lengths = {4000, 4000};
    c.design.operating_points = {0.0, 0.0};
    c.design.amplitudes = {1.0, 1.0};
    c.design.sample_rate = 100.0;
    c.candidates.degree = 3;
    c.candidates.ny = 2;
    c.candidates.nu = 2;
    c.candidates.variables = {Variable::Output, Variable::Input, Variable::Phi1, Variable::Phi2};
    c.candidates.hysteresis = HysteresisCandidateConfig{};
    c.selection.enforce_sigma_y = true;
    c.sine = {1.0, 0.1, 0.0, 0.0, 3000};
  } else {
    throw ParameterError("system must be heating, piezo, valve or csv, got '" + system + "'");
  }
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  return {{"system", c.system},
          {"data_path", c.data_path},
          {"seed", c.seed},
          {"noise_ratio", c.noise_ratio},
          {"output_dir", c.output_dir},
          {"design", design_to_json(c.design)},
          {"candidates", candidates_to_json(c.candidates)},
          {"estimation", selection_to_json(c.selection)},
          {"validation",
           {{"mode", mode_name(c.validation_mode)},
            {"sine",
             {{"amplitude", c.sine.amplitude},
              {"frequency", c.sine.frequency},
              {"phase", c.sine.phase},
              {"offset", c.sine.offset},
              {"length", c.sine.length}}}}},
          {"monte_carlo",
           {{"ratios", c.mc_ratios}, {"trials", c.mc_trials}, {"threads", c.mc_threads}}}};
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
  const std::string p = "config";
  check_keys(j, p,
             {"system", "data_path", "seed", "noise_ratio", "output_dir", "design", "candidates",
              "estimation", "validation", "monte_carlo"});
  get_if(j, "system", p, c.system);
  get_if(j, "data_path", p, c.data_path);
  get_if(j, "seed", p, c.seed);
  get_if(j, "noise_ratio", p, c.noise_ratio);
  get_if(j, "output_dir", p, c.output_dir);
  if (j.contains("design")) design_from_json(j.at("design"), c.design);
  if (j.contains("candidates")) candidates_from_json(j.at("candidates"), c.candidates);
  if (j.contains("estimation")) selection_from_json(j.at("estimation"), c.selection);
  if (j.contains("validation")) {
    const auto& v = j.at("validation");
    check_keys(v, "validation", {"mode", "sine"});
    std::string mode = mode_name(c.validation_mode);
    get_if(v, "mode", "validation", mode);
    c.validation_mode = parse_mode(mode, "validation.mode");
    if (v.contains("sine")) {
      const auto& s = v.at("sine");
      const std::string sp = "validation.sine";
      check_keys(s, sp, {"amplitude", "frequency", "phase", "offset", "length"});
      get_if(s, "amplitude", sp, c.sine.amplitude);
      get_if(s, "frequency", sp, c.sine.frequency);
      get_if(s, "phase", sp, c.sine.phase);
      get_if(s, "offset", sp, c.sine.offset);
      get_if(s, "length", sp, c.sine.length);
    }
  }
  if (j.contains("monte_carlo")) {
    const auto& m = j.at("monte_carlo");
    check_keys(m, "monte_carlo", {"ratios", "trials", "threads"});
    get_if(m, "ratios", "monte_carlo", c.mc_ratios);
    get_if(m, "trials", "monte_carlo", c.mc_trials);
    get_if(m, "threads", "monte_carlo", c.mc_threads);
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  const Json j = io::read_json_file(path);
  if (!j.is_object()) throw FormatError(path.string() + ": top level must be an object");
  std::string system = "heating";
  get_if(j, "system", "config", system);
  try {
    auto c = config_from_json(j, default_config(system));
    if (!c.data_path.empty() && fs::path(c.data_path).is_relative()) {
      c.data_path = (path.parent_path() / c.data_path).string();
    }
    return c;
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<double> parse_number_list(const std::string& text) {
  auto number = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw ParameterError("'" + s + "' is not a number in list '" + text + "'");
    }
    return v;
  };
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  std::vector<double> out;
  if (sep == ':') {
    if (parts.size() != 3) throw ParameterError("range must be start:step:stop, got '" + text + "'");
    const double a = number(parts[0]), step = number(parts[1]), b = number(parts[2]);
    if (!(step > 0.0) || b < a) throw ParameterError("range '" + text + "' is empty or has step <= 0");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + step * static_cast<double>(i));
  } else {
    for (const auto& s : parts) out.push_back(number(s));
  }
  return out;
}

}  // namespace narx
