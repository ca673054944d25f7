#include "ktrack/dataio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ktrack/error.hpp"

namespace ktrack {
namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  fail(ErrorKind::Parse, where + ": " + what);
}

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) parse_error(where, "expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) parse_error(where, std::string("missing field '") + name + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_error(where, "expected a finite number");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out.flush()) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

constexpr std::array<std::string_view, 29> kColumns = {
    "dataset",     "tracker",       "predictor",          "n",
    "warmup",      "grid",          "seed",               "frames",
    "points",      "complete",      "tracker_calls",      "nominal_calls",
    "failed_measurements",          "sim_cost_ms",        "wall_ms",
    "frames_scored", "epe",         "pck1",               "pck2",
    "pck4",        "pck5",          "pck8",               "pck16",
    "aj",          "fps_sim",       "fps_wall",           "speedup",
    "retention",   "error",
};

std::size_t column_index(std::string_view name) {
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (kColumns[i] == name) return i;
  }
  fail(ErrorKind::InvalidParameter, "unknown results column '" + std::string(name) + "'");
}

std::string csv_quote(std::string_view s) {
  std::string clean(s);
  std::replace(clean.begin(), clean.end(), '\n', ' ');
  std::replace(clean.begin(), clean.end(), '\r', ' ');
  if (clean.find_first_of(",\"") == std::string::npos) return clean;
  std::string out = "\"";
  for (char c : clean) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cells.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  if (quoted) fail(ErrorKind::Parse, "results: unterminated quoted cell");
  return cells;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

double parse_double(const std::string& s, std::string_view column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::Parse, "results: column '" + std::string(column) + "' is not a number: '" + s + "'");
  }
  return v;
}

template <class Int>
Int parse_int(const std::string& s, std::string_view column) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::Parse, "results: column '" + std::string(column) + "' is not an integer: '" + s + "'");
  }
  return v;
}

std::optional<double> parse_opt(const std::string& s, std::string_view column) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, column);
}

std::vector<std::string> row_cells(const SweepRow& row, const ResultsWriteOptions& options) {
  std::vector<std::string> c;
  c.reserve(kColumns.size());
  c.push_back(csv_quote(row.cell.dataset));
  c.push_back(csv_quote(row.cell.tracker));
  c.emplace_back(to_string(row.cell.kind));
  c.push_back(std::to_string(row.cell.n));
  c.push_back(std::to_string(row.cell.warmup));
  c.push_back(std::to_string(row.cell.grid));
  c.push_back(std::to_string(row.cell.seed));
  c.push_back(std::to_string(row.frames));
  c.push_back(std::to_string(row.points));
  c.emplace_back(row.complete ? "true" : "false");
  c.push_back(std::to_string(row.tracker_calls));
  c.push_back(std::to_string(row.nominal_calls));
  c.push_back(std::to_string(row.failed_measurements));
  c.push_back(format_number(row.simulated_cost_ms));
  c.push_back(options.include_wall_clock ? opt_number(row.wall_clock_ms) : "");
  if (row.report) {
    const MetricReport& r = *row.report;
    c.push_back(std::to_string(r.frames));
    c.push_back(format_number(r.epe));
    for (double v : r.pck) c.push_back(format_number(v));
    c.push_back(format_number(r.average_jaccard));
    c.push_back(format_number(r.fps_simulated));
    c.push_back(options.include_wall_clock ? format_number(r.fps_wall) : "");
    c.push_back(opt_number(r.speedup));
    c.push_back(opt_number(r.retention));
  } else {
    for (int i = 0; i < 13; ++i) c.emplace_back();
  }
  c.push_back(csv_quote(row.error));
  return c;
}

std::string join_cells(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- datasets

json dataset_to_json(const Dataset& dataset) {
  json points = json::array();
  const auto& tracks = dataset.tracks();
  for (std::size_t p = 0; p < dataset.num_points(); ++p) {
    json track = json::array();
    for (std::size_t f = 0; f < tracks.frames(); ++f) {
      const auto& s = tracks(p, f);
      track.push_back({s.position.x, s.position.y, s.visible});
    }
    points.push_back({{"id", dataset.point_ids()[p]}, {"track", std::move(track)}});
  }
  return {{"version", kDatasetVersion},
          {"frameBounds", {{"width", dataset.bounds().width}, {"height", dataset.bounds().height}}},
          {"T", dataset.frames()},
          {"points", std::move(points)},
          {"provenance", dataset.provenance()}};
}

Dataset dataset_from_json(const json& doc) {
  const json& version = field(doc, "version", "dataset");
  if (!version.is_number_integer()) parse_error("dataset.version", "expected an integer");
  if (version.get<int>() != kDatasetVersion) {
    fail(ErrorKind::UnsupportedVersion,
         "dataset: version " + std::to_string(version.get<int>()) + " is not supported");
  }
  const json& fb = field(doc, "frameBounds", "dataset");
  FrameBounds bounds{number(field(fb, "width", "dataset.frameBounds"), "dataset.frameBounds.width"),
                     number(field(fb, "height", "dataset.frameBounds"), "dataset.frameBounds.height")};
  if (!(bounds.width > 0.0 && bounds.height > 0.0)) {
    parse_error("dataset.frameBounds", "width and height must be positive");
  }
  const json& tj = field(doc, "T", "dataset");
  if (!tj.is_number_integer() || tj.get<std::int64_t>() < 1) parse_error("dataset.T", "expected an integer >= 1");
  const auto frames = static_cast<std::size_t>(tj.get<std::int64_t>());

  const json& pts = field(doc, "points", "dataset");
  if (!pts.is_array() || pts.empty()) parse_error("dataset.points", "expected a non-empty array");
  std::vector<PointId> ids;
  PointFrameArray<GroundTruthSample> tracks(pts.size(), frames);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const std::string where = "dataset.points[" + std::to_string(p) + "]";
    const json& id = field(pts[p], "id", where);
    if (!id.is_number_integer()) parse_error(where + ".id", "expected an integer");
    ids.push_back(id.get<PointId>());
    const json& track = field(pts[p], "track", where);
    if (!track.is_array()) parse_error(where + ".track", "expected an array");
    if (track.size() != frames) {
      parse_error(where + ".track", "length " + std::to_string(track.size()) + " != T = " +
                                        std::to_string(frames));
    }
    for (std::size_t f = 0; f < frames; ++f) {
      const std::string at = where + ".track[" + std::to_string(f) + "]";
      const json& s = track[f];
      if (!s.is_array() || s.size() != 3 || !s[2].is_boolean()) {
        parse_error(at, "expected [x, y, visible]");
      }
      tracks(p, f) = {{number(s[0], at + "[0]"), number(s[1], at + "[1]")}, s[2].get<bool>()};
    }
  }
  json provenance = doc.contains("provenance") ? doc["provenance"] : json();
  try {
    return Dataset(bounds, std::move(ids), std::move(tracks), std::move(provenance));
  } catch (const Error& e) {
    parse_error("dataset", e.what());
  }
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_file(path, dataset_to_json(dataset).dump(1) + "\n");
}

Dataset read_dataset(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  try {
    return dataset_from_json(doc);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) fail(ErrorKind::Parse, path.string() + ": " + e.what());
    throw;
  }
}

std::uint64_t dataset_digest(const Dataset& dataset) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  mix(std::bit_cast<std::uint64_t>(dataset.bounds().width));
  mix(std::bit_cast<std::uint64_t>(dataset.bounds().height));
  mix(static_cast<std::uint64_t>(dataset.frames()));
  for (PointId id : dataset.point_ids()) mix(static_cast<std::uint64_t>(id));
  for (const auto& s : dataset.tracks().data()) {
    mix(std::bit_cast<std::uint64_t>(s.position.x));
    mix(std::bit_cast<std::uint64_t>(s.position.y));
    mix(s.visible ? 1u : 0u);
  }
  for (char c : dataset.provenance().dump()) mix(static_cast<unsigned char>(c));
  return h;
}

// ----------------------------------------------------------------- results

std::span<const std::string_view> results_columns() { return kColumns; }

std::string results_header() {
  std::string h;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) h += ',';
    h += kColumns[i];
  }
  return h;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_row(const SweepRow& row, const ResultsWriteOptions& options) {
  return join_cells(row_cells(row, options));
}

SweepRow parse_row(std::string_view line) {
  const auto c = split_csv(line);
  if (c.size() != kColumns.size()) {
    fail(ErrorKind::Parse, "results: expected " + std::to_string(kColumns.size()) + " cells, got " +
                               std::to_string(c.size()));
  }
  auto col = [&](std::string_view name) -> const std::string& { return c[column_index(name)]; };

  SweepRow row;
  row.cell.dataset = col("dataset");
  row.cell.tracker = col("tracker");
  try {
    row.cell.kind = parse_predictor_kind(col("predictor"));
  } catch (const Error& e) {
    fail(ErrorKind::Parse, std::string("results: ") + e.what());
  }
  row.cell.n = parse_int<std::int64_t>(col("n"), "n");
  row.cell.warmup = parse_int<std::int64_t>(col("warmup"), "warmup");
  row.cell.grid = parse_int<int>(col("grid"), "grid");
  row.cell.seed = parse_int<std::uint64_t>(col("seed"), "seed");
  row.frames = parse_int<std::int64_t>(col("frames"), "frames");
  row.points = parse_int<std::int64_t>(col("points"), "points");
  const std::string& complete = col("complete");
  if (complete != "true" && complete != "false") fail(ErrorKind::Parse, "results: bad 'complete' cell");
  row.complete = complete == "true";
  row.tracker_calls = parse_int<std::int64_t>(col("tracker_calls"), "tracker_calls");
  row.nominal_calls = parse_int<std::int64_t>(col("nominal_calls"), "nominal_calls");
  row.failed_measurements = parse_int<std::int64_t>(col("failed_measurements"), "failed_measurements");
  row.simulated_cost_ms = parse_double(col("sim_cost_ms"), "sim_cost_ms");
  row.wall_clock_ms = parse_opt(col("wall_ms"), "wall_ms");
  if (!col("frames_scored").empty()) {
    MetricReport r;
    r.frames = parse_int<std::int64_t>(col("frames_scored"), "frames_scored");
    r.epe = parse_double(col("epe"), "epe");
    constexpr std::array<std::string_view, 6> pck_cols = {"pck1", "pck2", "pck4", "pck5", "pck8", "pck16"};
    for (std::size_t i = 0; i < pck_cols.size(); ++i) r.pck[i] = parse_double(col(pck_cols[i]), pck_cols[i]);
    r.average_jaccard = parse_double(col("aj"), "aj");
    r.fps_simulated = parse_double(col("fps_sim"), "fps_sim");
    r.fps_wall = parse_opt(col("fps_wall"), "fps_wall").value_or(0.0);
    r.simulated_cost_ms = row.simulated_cost_ms;
    r.speedup = parse_opt(col("speedup"), "speedup");
    r.retention = parse_opt(col("retention"), "retention");
    row.report = r;
  }
  row.error = col("error");
  return row;
}

ResultsWriter::ResultsWriter(const std::filesystem::path& path, const json& config,
                             ResultsWriteOptions options)
    : out_(path, std::ios::binary | std::ios::trunc), options_(options) {
  if (!out_) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out_ << "# config " << config.dump() << '\n' << results_header() << '\n';
  out_.flush();
}

void ResultsWriter::write(const SweepRow& row) {
  out_ << format_row(row, options_) << '\n';
  if (!out_.flush()) fail(ErrorKind::Io, "results write failed");
}

void write_results(const std::filesystem::path& path, const ResultsTable& table,
                   ResultsWriteOptions options) {
  ResultsWriter w(path, table.config, options);
  for (const auto& row : table.rows) w.write(row);
}

ResultsTable read_results(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) break;  // unterminated final line: truncated write, dropped
    lines.emplace_back(text.data() + start, nl - start);
    start = nl + 1;
  }

  ResultsTable table;
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (!line.empty() && line.front() == '#') {
      constexpr std::string_view prefix = "# config ";
      if (line.starts_with(prefix)) {
        table.config = json::parse(line.substr(prefix.size()), nullptr, false);
        if (table.config.is_discarded()) fail(ErrorKind::Parse, where + ": malformed config line");
      }
      continue;
    }
    if (!header_seen) {
      if (line != results_header()) fail(ErrorKind::Parse, where + ": unexpected results header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    try {
      table.rows.push_back(parse_row(line));
    } catch (const Error& e) {
      fail(ErrorKind::Parse, where + ": " + e.what());
    }
  }
  if (!header_seen) fail(ErrorKind::Parse, path.string() + ": missing results header");
  return table;
}

json results_to_json(const ResultsTable& table, ResultsWriteOptions options) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::string_view column : kColumns) {
      const std::string key(column);
      if (const auto v = numeric_column(row, column)) {
        if (column == "wall_ms" || column == "fps_wall") {
          if (!options.include_wall_clock) {
            obj[key] = nullptr;
            continue;
          }
        }
        obj[key] = std::isfinite(*v) ? json(*v) : json(format_number(*v));
      } else if (column == "dataset" || column == "tracker" || column == "predictor" ||
                 column == "error") {
        obj[key] = text_column(row, column);
      } else if (column == "complete") {
        obj[key] = row.complete;
      } else {
        obj[key] = nullptr;
      }
    }
    rows.push_back(std::move(obj));
  }
  return {{"config", table.config}, {"rows", std::move(rows)}};
}

std::optional<double> numeric_column(const SweepRow& row, std::string_view column) {
  auto d = [](auto v) { return std::optional<double>(static_cast<double>(v)); };
  if (column == "n") return d(row.cell.n);
  if (column == "warmup") return d(row.cell.warmup);
  if (column == "grid") return d(row.cell.grid);
  if (column == "seed") return d(row.cell.seed);
  if (column == "frames") return d(row.frames);
  if (column == "points") return d(row.points);
  if (column == "tracker_calls") return d(row.tracker_calls);
  if (column == "nominal_calls") return d(row.nominal_calls);
  if (column == "failed_measurements") return d(row.failed_measurements);
  if (column == "sim_cost_ms") return row.simulated_cost_ms;
  if (column == "wall_ms") return row.wall_clock_ms;
  if (!row.report) return std::nullopt;
  const MetricReport& r = *row.report;
  if (column == "frames_scored") return d(r.frames);
  if (column == "epe") return r.epe;
  if (column == "pck1") return r.pck[0];
  if (column == "pck2") return r.pck[1];
  if (column == "pck4") return r.pck[2];
  if (column == "pck5") return r.pck[3];
  if (column == "pck8") return r.pck[4];
  if (column == "pck16") return r.pck[5];
  if (column == "aj") return r.average_jaccard;
  if (column == "fps_sim") return r.fps_simulated;
  if (column == "fps_wall") return r.fps_wall;
  if (column == "speedup") return r.speedup;
  if (column == "retention") return r.retention;
  return std::nullopt;
}

std::string text_column(const SweepRow& row, std::string_view column) {
  if (column == "dataset") return row.cell.dataset;
  if (column == "tracker") return row.cell.tracker;
  if (column == "predictor") return std::string(to_string(row.cell.kind));
  if (column == "error") return row.error;
  if (column == "complete") return row.complete ? "true" : "false";
  column_index(column);
  const auto v = numeric_column(row, column);
  return v ? format_number(*v) : "";
}

// ------------------------------------------------------------------ charts

std::string render_chart_svg(std::span<const SweepRow> rows, const ChartAxes& axes,
                             const json& config) {
  column_index(axes.x_column);
  column_index(axes.y_column);
  column_index(axes.series_column);

  // series -> x -> (sum, count)
  std::map<std::string, std::map<double, std::pair<double, int>>> series;
  for (const auto& row : rows) {
    const auto x = numeric_column(row, axes.x_column);
    const auto y = numeric_column(row, axes.y_column);
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) continue;
    auto& cell = series[text_column(row, axes.series_column)][*x];
    cell.first += *y;
    cell.second += 1;
  }
  if (series.empty()) {
    fail(ErrorKind::NothingToPlot, "chart: no rows with both '" + axes.x_column + "' and '" +
                                       axes.y_column + "'");
  }

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& [name, pts] : series) {
    for (const auto& [x, acc] : pts) {
      const double y = acc.first / acc.second;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax == xmin) { xmin -= 1.0; xmax += 1.0; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  constexpr double W = 720, H = 440, L = 70, R = 190, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return T + (ymax - y) / (ymax - ymin) * ph; };

  static constexpr std::array<const char*, 8> palette = {
      "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!config.is_null()) svg << "<desc>" << xml_escape(config.dump()) << "</desc>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string title =
      axes.title.empty() ? axes.y_column + " vs " + axes.x_column : axes.title;
  svg << "<text x=\"" << L + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";
  svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    svg << "<text x=\"" << fmt("%.2f", sx(xv)) << "\" y=\"" << T + ph + 18
        << "\" text-anchor=\"middle\">" << fmt("%.3g", xv) << "</text>\n";
    svg << "<text x=\"" << L - 6 << "\" y=\"" << fmt("%.2f", sy(yv) + 4)
        << "\" text-anchor=\"end\">" << fmt("%.3g", yv) << "</text>\n";
  }
  svg << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
      << xml_escape(axes.x_column) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << T + ph / 2 << ")\">" << xml_escape(axes.y_column) << "</text>\n";

  std::size_t idx = 0;
  for (const auto& [name, pts] : series) {
    const char* color = palette[idx % palette.size()];
    std::string points;
    for (const auto& [x, acc] : pts) {
      if (!points.empty()) points += ' ';
      points += fmt("%.2f", sx(x)) + "," + fmt("%.2f", sy(acc.first / acc.second));
    }
    svg << "<g class=\"series\" data-name=\"" << xml_escape(name) << "\">\n";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
        << points << "\"/>\n";
    for (const auto& [x, acc] : pts) {
      svg << "<circle cx=\"" << fmt("%.2f", sx(x)) << "\" cy=\""
          << fmt("%.2f", sy(acc.first / acc.second)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = T + 14 + 18.0 * static_cast<double>(idx);
    svg << "<line x1=\"" << L + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + pw + 32
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << L + pw + 38 << "\" y=\"" << ly << "\">" << xml_escape(name)
        << "</text>\n</g>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_chart(std::span<const SweepRow> rows, const ChartAxes& axes,
                const std::filesystem::path& path, const json& config) {
  write_file(path, render_chart_svg(rows, axes, config));
}

}  // namespace ktrack
