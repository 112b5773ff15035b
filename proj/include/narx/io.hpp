#pragma once

/** @file
 * File formats: CSV data records, JSON model files and estimation reports,
 * and CSV exports of rankings, AIC curves and Monte Carlo summaries.
 *
 * Every floating-point value written to CSV uses 17 significant digits so a
 * value survives a write/read cycle bit for bit.
 */

#include "narx/core.hpp"
#include "narx/estimation.hpp"
#include "narx/evaluation.hpp"
#include "narx/hysteresis.hpp"
#include "narx/structure_selection.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace narx::io {

using Json = nlohmann::json;

/// Decimal text of x with 17 significant digits ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_double(double x);

struct DataFile {
  TimeSeriesData data;
  /// Present when the file carried a y_clean column.
  std::optional<std::vector<double>> y_clean;
};

/// Reads a CSV record.  With a header, the columns u and y are required and
/// k, y_clean and any other column are optional.  A file without a header
/// must have exactly two numeric columns, taken as u and y.  Errors carry the
/// offending line number.
DataFile read_data_csv(const std::filesystem::path& path, double ts = 1.0);

/// Reads the u column of a CSV with a header (k,u or any layout naming u).
std::vector<double> read_input_csv(const std::filesystem::path& path);

/// Writes k,u,y and, when given, y_clean.
void write_data_csv(const std::filesystem::path& path, const TimeSeriesData& data,
                    const std::vector<double>* y_clean = nullptr);

/// Generic column writer: header names plus equally long columns, with an
/// integer k column prepended.
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns);

Json term_to_json(const RegressorTerm& term);
RegressorTerm term_from_json(const Json& j);

Json model_to_json(const NarxModel& model);
NarxModel model_from_json(const Json& j);
void save_model(const std::filesystem::path& path, const NarxModel& model);
NarxModel load_model(const std::filesystem::path& path);

Json report_to_json(const EstimationReport& report);

void write_ranking_csv(const std::filesystem::path& path, const ErrRanking& ranking);
void write_aic_csv(const std::filesystem::path& path, const AicCurve& aic);
void write_residuals_csv(const std::filesystem::path& path, const EstimationReport& report,
                         std::size_t first_row);
void write_monte_carlo_csv(const std::filesystem::path& path, const MonteCarloReport& report);
/// One row per trial: ratio, trial, seed, mape, structure.
void write_monte_carlo_trials_csv(const std::filesystem::path& path,
                                  const MonteCarloReport& report);
void write_exclusions_csv(const std::filesystem::path& path, const ExclusionResult& result);

/// Parses JSON text, translating parse failures into FormatError messages
/// that name the line and column.
Json parse_json(const std::string& text, const std::string& source);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace narx::io
