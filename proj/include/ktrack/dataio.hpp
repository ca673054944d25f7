#pragma once

// On-disk formats: datasets as versioned JSON, sweep results as CSV with a
// fixed header, charts as self-contained SVG. All writers are
// locale-independent and embed no timestamps, so identical inputs give
// identical bytes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktrack/dataset.hpp"
#include "ktrack/sweep.hpp"

namespace ktrack {

inline constexpr int kDatasetVersion = 1;

nlohmann::json dataset_to_json(const Dataset& dataset);
/// Throws Parse with the offending field path, UnsupportedVersion for
/// version != 1.
Dataset dataset_from_json(const nlohmann::json& doc);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// 64-bit FNV-1a over the bit patterns of every field; equal datasets hash
/// equal.
std::uint64_t dataset_digest(const Dataset& dataset);

// Results table

std::span<const std::string_view> results_columns();
std::string results_header();

/// Shortest decimal that round-trips, '.' separator, "nan"/"inf"/"-inf".
std::string format_number(double v);

struct ResultsTable {
  nlohmann::json config;  // resolved configuration echoed in the file
  std::vector<SweepRow> rows;
};

struct ResultsWriteOptions {
  bool include_wall_clock = false;  // wall-clock columns break byte-determinism
};

std::string format_row(const SweepRow& row, const ResultsWriteOptions& options = {});
SweepRow parse_row(std::string_view line);

/// Streams rows to disk one flushed line at a time; a crash leaves at most
/// one truncated final line, which read_results drops.
class ResultsWriter {
 public:
  ResultsWriter(const std::filesystem::path& path, const nlohmann::json& config,
                ResultsWriteOptions options = {});
  void write(const SweepRow& row);

 private:
  std::ofstream out_;
  ResultsWriteOptions options_;
};

void write_results(const std::filesystem::path& path, const ResultsTable& table,
                   ResultsWriteOptions options = {});
ResultsTable read_results(const std::filesystem::path& path);

nlohmann::json results_to_json(const ResultsTable& table, ResultsWriteOptions options = {});

/// Numeric value of a named results column for charting; empty when the cell
/// is blank.
std::optional<double> numeric_column(const SweepRow& row, std::string_view column);
std::string text_column(const SweepRow& row, std::string_view column);

// Charts

struct ChartAxes {
  std::string x_column = "n";
  std::string y_column = "pck5";
  std::string series_column = "predictor";
  std::string title;
};

/// Line chart, one series per distinct series_column value; y is averaged
/// over rows that share (series, x). Throws NothingToPlot when no row has
/// both coordinates.
std::string render_chart_svg(std::span<const SweepRow> rows, const ChartAxes& axes,
                             const nlohmann::json& config = {});
void emit_chart(std::span<const SweepRow> rows, const ChartAxes& axes,
                const std::filesystem::path& path, const nlohmann::json& config = {});

}  // namespace ktrack
