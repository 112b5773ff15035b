#include "narx/io.hpp"

#include "narx/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace narx::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  // strtod handles nan/inf spellings that from_chars in older libstdc++ may not
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return std::nullopt;
  return v;
}

}  // namespace

DataFile read_data_csv(const fs::path& path, double ts) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open data file " + path.string());
  DataFile out;
  out.data.ts = ts;
  out.data.label = path.filename().string();

  std::string line;
  std::size_t line_no = 0;
  int col_u = -1, col_y = -1, col_clean = -1;
  std::size_t width = 0;
  bool have_layout = false;
  std::vector<double> clean;

  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const char sep = line.find(',') != std::string::npos ? ',' : (line.find(';') != std::string::npos ? ';' : ' ');
    auto cells = split(line, sep);
    if (sep == ' ') {
      std::erase_if(cells, [](const std::string& c) { return c.empty(); });
    }
    if (!have_layout) {
      have_layout = true;
      width = cells.size();
      if (!parse_number(cells.front())) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (cells[c] == "u") col_u = static_cast<int>(c);
          else if (cells[c] == "y") col_y = static_cast<int>(c);
          else if (cells[c] == "y_clean") col_clean = static_cast<int>(c);
        }
        if (col_u < 0 || col_y < 0) {
          throw FormatError(path.string() + ":" + std::to_string(line_no) +
                            ": header must name columns 'u' and 'y'");
        }
        continue;
      }
      if (width != 2) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": a file without header needs exactly two columns (u, y)");
      }
      col_u = 0;
      col_y = 1;
    }
    if (cells.size() != width) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " columns, found " +
                        std::to_string(cells.size()));
    }
    auto get = [&](int c) {
      const auto v = parse_number(cells[static_cast<std::size_t>(c)]);
      if (!v) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": '" +
                          cells[static_cast<std::size_t>(c)] + "' is not a number");
      }
      return *v;
    };
    out.data.u.push_back(get(col_u));
    out.data.y.push_back(get(col_y));
    if (col_clean >= 0) clean.push_back(get(col_clean));
  }
  if (out.data.y.empty()) throw FormatError(path.string() + ": no data rows");
  if (col_clean >= 0) out.y_clean = std::move(clean);
  return out;
}

std::vector<double> read_input_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open input file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  int col_u = -1;
  std::size_t width = 0;
  std::vector<double> u;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    if (col_u < 0) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == "u") col_u = static_cast<int>(c);
      }
      if (col_u < 0) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": header must name a column 'u'");
      }
      width = cells.size();
      continue;
    }
    if (cells.size() != width) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " columns, found " +
                        std::to_string(cells.size()));
    }
    const auto v = parse_number(cells[static_cast<std::size_t>(col_u)]);
    if (!v) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": '" +
                        cells[static_cast<std::size_t>(col_u)] + "' is not a number");
    }
    u.push_back(*v);
  }
  if (u.empty()) throw FormatError(path.string() + ": no data rows");
  return u;
}

void write_columns_csv(const fs::path& path, const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns) {
  if (names.size() != columns.size()) throw ParameterError("column names and data disagree");
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != n) throw ParameterError("columns differ in length");
  }
  auto out = open_out(path);
  out << 'k';
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t k = 0; k < n; ++k) {
    out << k;
    for (const auto& c : columns) out << ',' << format_double(c[k]);
    out << '\n';
  }
}

void write_data_csv(const fs::path& path, const TimeSeriesData& data,
                    const std::vector<double>* y_clean) {
  std::vector<std::string> names{"u", "y"};
  std::vector<std::span<const double>> cols{data.u, data.y};
  if (y_clean) {
    names.emplace_back("y_clean");
    cols.emplace_back(*y_clean);
  }
  write_columns_csv(path, names, cols);
}

Json term_to_json(const RegressorTerm& term) {
  Json factors = Json::array();
  for (const auto& f : term.factors()) {
    factors.push_back({std::string(variable_symbol(f.variable)), f.lag, f.exponent});
  }
  return factors;
}

RegressorTerm term_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("a term must be a list of [variable, lag, exponent]");
  std::vector<Factor> factors;
  for (const auto& f : j) {
    if (!f.is_array() || f.size() != 3 || !f[0].is_string() || !f[1].is_number_integer() ||
        !f[2].is_number_integer()) {
      throw FormatError("malformed factor " + f.dump() + "; expected [variable, lag, exponent]");
    }
    Factor x;
    x.variable = parse_variable(f[0].get<std::string>());
    x.lag = f[1].get<int>();
    x.exponent = f[2].get<int>();
    if (x.lag < 1 || x.exponent < 1) {
      throw FormatError("factor " + f.dump() + " needs lag >= 1 and exponent >= 1");
    }
    factors.push_back(x);
  }
  return RegressorTerm(std::move(factors));
}

namespace {

Json terms_to_json(std::span<const RegressorTerm> terms, std::span<const double> theta) {
  Json out = Json::array();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out.push_back({{"term", terms[i].to_string()},
                   {"factors", term_to_json(terms[i])},
                   {"parameter", theta[i]}});
  }
  return out;
}

void terms_from_json(const Json& j, std::vector<RegressorTerm>& terms, std::vector<double>& theta) {
  if (!j.is_array()) throw FormatError("term list must be an array");
  for (const auto& entry : j) {
    if (!entry.contains("factors") || !entry.contains("parameter")) {
      throw FormatError("term entry needs 'factors' and 'parameter': " + entry.dump());
    }
    terms.push_back(term_from_json(entry.at("factors")));
    if (!entry.at("parameter").is_number()) throw FormatError("parameter must be a number");
    theta.push_back(entry.at("parameter").get<double>());
  }
}

}  // namespace

Json model_to_json(const NarxModel& model) {
  model.validate();
  Json j;
  j["format"] = "narx-model";
  j["version"] = 1;
  j["meta"] = {{"degree", model.meta.degree},
               {"ny", model.meta.ny},
               {"nu", model.meta.nu},
               {"delay", model.meta.delay},
               {"ts", model.meta.ts},
               {"direction", model.meta.direction == Direction::Direct ? "direct" : "inverse"}};
  j["process_terms"] = terms_to_json(model.process_terms, model.theta);
  j["noise_terms"] = terms_to_json(model.noise_terms, model.noise_theta);
  return j;
}

NarxModel model_from_json(const Json& j) {
  try {
    if (j.value("format", "") != "narx-model") throw FormatError("not a narx-model document");
    NarxModel m;
    const auto& meta = j.at("meta");
    m.meta.degree = meta.at("degree").get<int>();
    m.meta.ny = meta.at("ny").get<int>();
    m.meta.nu = meta.at("nu").get<int>();
    m.meta.delay = meta.at("delay").get<int>();
    m.meta.ts = meta.at("ts").get<double>();
    const auto dir = meta.value("direction", "direct");
    if (dir == "direct") m.meta.direction = Direction::Direct;
    else if (dir == "inverse") m.meta.direction = Direction::Inverse;
    else throw FormatError("direction must be 'direct' or 'inverse'");
    terms_from_json(j.at("process_terms"), m.process_terms, m.theta);
    if (j.contains("noise_terms")) terms_from_json(j.at("noise_terms"), m.noise_terms, m.noise_theta);
    m.validate();
    return m;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed model document: ") + e.what());
  }
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": JSON syntax error: " + e.what());
  }
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path.string());
}

void write_json_file(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void save_model(const fs::path& path, const NarxModel& model) {
  write_json_file(path, model_to_json(model));
}

NarxModel load_model(const fs::path& path) { return model_from_json(read_json_file(path)); }

Json report_to_json(const EstimationReport& report) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"theta", vec(report.theta)},
          {"noise_theta", vec(report.noise_theta)},
          {"iterations", report.iterations},
          {"converged", report.converged},
          {"residual_variance", report.residual_variance},
          {"parameter_changes", report.parameter_changes},
          {"residual_count", report.residuals.size()}};
}

void write_ranking_csv(const fs::path& path, const ErrRanking& ranking) {
  auto out = open_out(path);
  out << "rank,term,err,cumulative_err\n";
  for (std::size_t i = 0; i < ranking.ordered_terms.size(); ++i) {
    out << i + 1 << ',' << ranking.ordered_terms[i].to_string() << ','
        << format_double(ranking.err_values[i]) << ',' << format_double(ranking.cumulative_err[i])
        << '\n';
  }
}

void write_aic_csv(const fs::path& path, const AicCurve& aic) {
  auto out = open_out(path);
  out << "n_theta,j_aic,residual_variance,valid\n";
  for (std::size_t i = 0; i < aic.n_theta.size(); ++i) {
    out << aic.n_theta[i] << ',' << format_double(aic.j_aic[i]) << ','
        << format_double(aic.residual_variance[i]) << ',' << (aic.valid[i] ? 1 : 0) << '\n';
  }
}

void write_residuals_csv(const fs::path& path, const EstimationReport& report,
                         std::size_t first_row) {
  auto out = open_out(path);
  out << "k,residual\n";
  for (Eigen::Index i = 0; i < report.residuals.size(); ++i) {
    out << first_row + static_cast<std::size_t>(i) << ',' << format_double(report.residuals(i))
        << '\n';
  }
}

void write_monte_carlo_csv(const fs::path& path, const MonteCarloReport& report) {
  auto out = open_out(path);
  out << "ratio,mean_mape,std_mape,failures\n";
  for (std::size_t r = 0; r < report.ratios.size(); ++r) {
    out << format_double(report.ratios[r]) << ',' << format_double(report.mape_mean[r]) << ','
        << format_double(report.mape_std[r]) << ',' << report.failures[r] << '\n';
  }
}

void write_monte_carlo_trials_csv(const fs::path& path, const MonteCarloReport& report) {
  auto out = open_out(path);
  out << "ratio,trial,seed,mape,structure\n";
  for (std::size_t r = 0; r < report.ratios.size(); ++r) {
    for (std::size_t t = 0; t < report.trials; ++t) {
      out << format_double(report.ratios[r]) << ',' << t << ',' << report.seeds[r][t] << ','
          << format_double(report.mapes[r][t]) << ",\"" << report.structures[r][t] << "\"\n";
    }
  }
}

void write_exclusions_csv(const fs::path& path, const ExclusionResult& result) {
  auto out = open_out(path);
  out << "term,status,rule\n";
  for (const auto& t : result.kept.terms) out << t.to_string() << ",kept,\n";
  for (const auto& e : result.excluded) out << e.term.to_string() << ",excluded," << e.rule << '\n';
}

}  // namespace narx::io
