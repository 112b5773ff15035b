#include "narx/benchmarks.hpp"

#include "narx/errors.hpp"

#include <cmath>
#include <utility>

namespace narx {

double HammersteinParams::steady_state(double u) const {
  const double v = p1 * u * u + p2 * u;
  return (b2 + b4) * v / (1.0 - b1 - b3);
}

HammersteinResult simulate_hammerstein(const HammersteinParams& p, std::span<const double> u) {
  HammersteinResult r;
  r.y.assign(u.size(), 0.0);
  double y1 = 0.0, y2 = 0.0, v1 = 0.0, v2 = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double yk = p.b1 * y1 + p.b2 * v1 + p.b3 * y2 + p.b4 * v2;
    if (!std::isfinite(yk) || std::abs(yk) > 1e12) {
      r.diverged = true;
      r.y.resize(k);
      return r;
    }
    r.y[k] = yk;
    if (u[k] < 0.0 || u[k] > 1.0) r.out_of_range = true;
    y2 = y1;
    y1 = yk;
    v2 = v1;
    v1 = p.p1 * u[k] * u[k] + p.p2 * u[k];
  }
  return r;
}

namespace {

double bouc_wen_rate(const BoucWenParams& p, double h, double du) {
  return p.alpha * du - p.beta * std::abs(du) * h - p.gamma * du * std::abs(h);
}

bool blown_up(double h) { return !std::isfinite(h) || std::abs(h) > 1e12; }

}  // namespace

BoucWenResult simulate_bouc_wen(const BoucWenParams& p, std::span<const double> u) {
  if (!(p.dt > 0.0)) throw ParameterError("Bouc-Wen integration step must be > 0");
  BoucWenResult r;
  const std::size_t n = u.size();
  if (n == 0) return r;

  std::vector<double> du(n, 0.0);
  if (n > 1) {
    du[0] = (u[1] - u[0]) / p.dt;
    du[n - 1] = (u[n - 1] - u[n - 2]) / p.dt;
    for (std::size_t k = 1; k + 1 < n; ++k) du[k] = (u[k + 1] - u[k - 1]) / (2.0 * p.dt);
  }

  r.h.assign(n, 0.0);
  r.y.assign(n, 0.0);
  double h = 0.0;
  r.y[0] = p.nu_y * u[0];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double d0 = du[k], d1 = du[k + 1], dm = 0.5 * (d0 + d1);
    const double k1 = bouc_wen_rate(p, h, d0);
    const double k2 = bouc_wen_rate(p, h + 0.5 * p.dt * k1, dm);
    const double k3 = bouc_wen_rate(p, h + 0.5 * p.dt * k2, dm);
    const double k4 = bouc_wen_rate(p, h + p.dt * k3, d1);
    h += p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (blown_up(h)) {
      r.diverged = true;
      r.h.resize(k + 1);
      r.y.resize(k + 1);
      return r;
    }
    r.h[k + 1] = h;
    r.y[k + 1] = p.nu_y * u[k + 1] - h;
  }
  return r;
}

BoucWenResult simulate_bouc_wen(const BoucWenParams& p, const std::function<double(double)>& u,
                                const std::function<double(double)>& du, std::size_t steps) {
  if (!(p.dt > 0.0)) throw ParameterError("Bouc-Wen integration step must be > 0");
  BoucWenResult r;
  r.h.assign(steps + 1, 0.0);
  r.y.assign(steps + 1, 0.0);
  double h = 0.0;
  r.y[0] = p.nu_y * u(0.0);

  auto rk4 = [&](double h0, double t0, double s) {
    const double k1 = bouc_wen_rate(p, h0, du(t0));
    const double k2 = bouc_wen_rate(p, h0 + 0.5 * s * k1, du(t0 + 0.5 * s));
    const double k3 = bouc_wen_rate(p, h0 + 0.5 * s * k2, du(t0 + 0.5 * s));
    const double k4 = bouc_wen_rate(p, h0 + s * k3, du(t0 + s));
    return h0 + s / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  // The right-hand side has kinks where du/dt or h changes sign.  Stepping
  // across one costs an order of accuracy, so steps are split there.
  auto advance_smooth_du = [&](double h0, double t0, double s) {
    const double h1 = rk4(h0, t0, s);
    if (!(h0 * h1 < 0.0)) return h1;
    double lo = 0.0, hi = s;
    for (int it = 0; it < 60 && hi - lo > 1e-15 * s; ++it) {
      const double mid = 0.5 * (lo + hi);
      (rk4(h0, t0, mid) * h0 > 0.0 ? lo : hi) = mid;
    }
    const double tc = 0.5 * (lo + hi);
    return rk4(rk4(h0, t0, tc), t0 + tc, s - tc);
  };
  auto advance = [&](double h0, double t0, double s) {
    const double d0 = du(t0), d1 = du(t0 + s);
    if (!(d0 * d1 < 0.0)) return advance_smooth_du(h0, t0, s);
    double lo = 0.0, hi = s;
    for (int it = 0; it < 60 && hi - lo > 1e-15 * s; ++it) {
      const double mid = 0.5 * (lo + hi);
      (du(t0 + mid) * d0 > 0.0 ? lo : hi) = mid;
    }
    const double tc = 0.5 * (lo + hi);
    return advance_smooth_du(advance_smooth_du(h0, t0, tc), t0 + tc, s - tc);
  };

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * p.dt;
    h = advance(h, t, p.dt);
    if (blown_up(h)) {
      r.diverged = true;
      r.h.resize(k + 1);
      r.y.resize(k + 1);
      return r;
    }
    r.h[k + 1] = h;
    r.y[k + 1] = p.nu_y * u(t + p.dt) - h;
  }
  return r;
}

std::vector<double> BenchmarkSystem::simulate(std::span<const double> u) const {
  if (const auto* hp = std::get_if<HammersteinParams>(&dynamics)) {
    auto r = simulate_hammerstein(*hp, u);
    if (r.diverged) throw Error(name + ": simulation diverged");
    return std::move(r.y);
  }
  BoucWenParams p = std::get<BoucWenParams>(dynamics);
  p.dt = ts;
  auto r = simulate_bouc_wen(p, u);
  if (r.diverged) throw Error(name + ": simulation diverged");
  return std::move(r.y);
}

BenchmarkSystem heating_system() {
  return {"heating", HammersteinParams{}, 10.0, 1};
}

BenchmarkSystem piezo_system() {
  return {"piezo", BoucWenParams{}, 0.005, 1};
}

namespace {

NarxModel make_model(std::initializer_list<std::pair<const char*, double>> terms,
                     ModelMeta meta) {
  NarxModel m;
  for (const auto& [text, value] : terms) {
    m.process_terms.push_back(RegressorTerm::parse(text));
    m.theta.push_back(value);
  }
  m.meta = meta;
  return m;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  out.push_back({"heating-narx", "Three-term NARX model of the Hammerstein heater (T_s = 10 s)",
                 make_model({{"y(k-1)", 8.958185e-1},
                             {"u(k-2)^2", 6.393347e-2},
                             {"y(k-2)", -1.746750e-2}},
                            {3, 3, 3, 1, 10.0, Direction::Direct}),
                 ""});
  out.push_back({"bouc-wen-narx", "Four-term hysteretic NARX model of the piezo actuator",
                 make_model({{"y(k-1)", 1.000099},
                             {"u(k-1)*phi1(k-1)*phi2(k-1)", 6.630567e-3},
                             {"y(k-1)*phi1(k-1)*phi2(k-1)", -6.247018e-3},
                             {"phi2(k-1)", 7.892915}},
                            {3, 1, 1, 1, 0.005, Direction::Direct}),
                 "published with an undefined phi3 factor, stored as phi1"});
  out.push_back({"valve-narx-constrained",
                 "Valve NARX model, exclusion rules and sum of output parameters = 1",
                 make_model({{"y(k-1)", 9.76e-1},
                             {"y(k-2)", 2.40e-2},
                             {"phi1(k-1)", 1.19e-1},
                             {"u(k-1)*phi1(k-1)*phi2(k-1)", 3.76},
                             {"y(k-2)*phi1(k-1)*phi2(k-1)", -4.73}},
                            {3, 2, 1, 1, 0.01, Direction::Direct}),
                 ""});
  out.push_back({"valve-bouc-wen", "Bouc-Wen model fitted to the valve (T_s = 10 ms)",
                 BoucWenParams{7.54e-1, 4.96, 3.61, 7.21e-1, 0.01},
                 "parameters taken as published"});
  out.push_back({"valve-narx-isolable",
                 "Valve NARX model with an additional constraint isolating the input",
                 make_model({{"y(k-1)", 1.0},
                             {"phi1(k-2)", -19.76},
                             {"phi1(k-1)", 19.32},
                             {"u(k-2)*phi1(k-2)*phi2(k-2)", 9.44},
                             {"y(k-1)*phi1(k-2)*phi2(k-2)", -12.61}},
                            {3, 2, 2, 1, 0.01, Direction::Direct}),
                 ""});
  out.push_back({"valve-narx-inverse",
                 "Inverse valve model: output y is the model input, estimated input is the "
                 "model output",
                 make_model({{"y(k-1)", 1.0},
                             {"phi1(k-1)", 86.67},
                             {"phi1(k-2)", -85.02},
                             {"u(k-2)*phi1(k-1)", -0.98},
                             {"u(k-2)*phi1(k-2)*phi2(k-2)", 1.72},
                             {"y(k-1)*phi1(k-2)*phi2(k-2)", -1.13}},
                            {3, 2, 2, 1, 0.01, Direction::Inverse}),
                 "roles swapped: y/u symbols denote estimated input / measured output"});
  return out;
}

}  // namespace

const std::vector<Preset>& preset_models() {
  static const std::vector<Preset> presets = build_presets();
  return presets;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : preset_models()) {
    if (p.name == name) return p;
  }
  throw ParameterError("unknown preset '" + name + "'");
}

SimulationResult run_inverse_model(const NarxModel& model, std::span<const double> y,
                                   std::span<const double> u_init) {
  if (model.meta.direction != Direction::Inverse) {
    throw ParameterError("run_inverse_model requires an inverse-direction model");
  }
  return free_run_simulate(model, y, u_init);
}

}  // namespace narx
