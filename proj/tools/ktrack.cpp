// ktrack command-line driver: dataset generation, single runs, sweeps,
// ablations and chart reports. Exit codes are listed in README.md.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ktrack/bridge.hpp"
#include "ktrack/dataio.hpp"
#include "ktrack/error.hpp"
#include "ktrack/sweep.hpp"
#include "ktrack/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ktrack;

namespace {

constexpr int kUsageExit = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataFlags {
  std::string dataset;
  std::string motion = "constant-velocity";
  int grid = 20;
  std::int64_t frames = 100;
  double width = 256, height = 256;
  double speed_min = 0.5, speed_max = 2.0;
  double amplitude = 5, period = 20;
  double radius = 10, angular_rate = 0.1;
  double accel_bound = 0.2;
};

struct TrackerFlags {
  std::string tracker = "oracle";
  double noise = 1.0;
  double failure = 0.0;
  double cost_ms = 556.0;
};

struct FilterFlags {
  double sigma_p = 0.1, sigma_m = 0.3, sigma_v = 10.0;
  std::int64_t warmup = 3;
  std::string predictor = "full-kalman";
};

struct OutputFlags {
  std::string out;
  std::string format = "csv";
  bool wall_clock = false;
  bool serial = false;
};

std::optional<std::uint64_t> g_seed_flag;

std::uint64_t resolved_seed() {
  if (g_seed_flag) return *g_seed_flag;
  if (const char* env = std::getenv("KTRACK_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("KTRACK_SEED must be a non-negative integer");
  }
  return 0;
}

void add_data_flags(CLI::App* cmd, DataFlags& d, bool allow_dataset) {
  CLI::Option* ds = nullptr;
  if (allow_dataset) {
    ds = cmd->add_option("--dataset", d.dataset, "Dataset JSON file (default: synthetic)")
             ->check(CLI::ExistingFile);
  }
  std::vector<CLI::Option*> synth = {
      cmd->add_option("--motion", d.motion, "Synthetic motion kind")
          ->check(CLI::IsMember({"constant-velocity", "circular", "sinusoidal",
                                 "piecewise-acceleration"})),
      cmd->add_option("--frames", d.frames, "Synthetic sequence length")->check(CLI::PositiveNumber),
      cmd->add_option("--width", d.width, "Frame width, px")->check(CLI::PositiveNumber),
      cmd->add_option("--height", d.height, "Frame height, px")->check(CLI::PositiveNumber),
      cmd->add_option("--speed-min", d.speed_min, "Minimum speed, px/frame")
          ->check(CLI::NonNegativeNumber),
      cmd->add_option("--speed-max", d.speed_max, "Maximum speed, px/frame")
          ->check(CLI::NonNegativeNumber),
      cmd->add_option("--amplitude", d.amplitude, "Sinusoid amplitude, px")
          ->check(CLI::NonNegativeNumber),
      cmd->add_option("--period", d.period, "Sinusoid period, frames")->check(CLI::PositiveNumber),
      cmd->add_option("--radius", d.radius, "Circle radius, px")->check(CLI::NonNegativeNumber),
      cmd->add_option("--angular-rate", d.angular_rate, "Circle angular rate, rad/frame"),
      cmd->add_option("--accel-bound", d.accel_bound, "Acceleration bound, px/frame^2")
          ->check(CLI::NonNegativeNumber),
  };
  if (ds) {
    for (auto* o : synth) ds->excludes(o);
  }
}

void add_tracker_flags(CLI::App* cmd, TrackerFlags& t) {
  cmd->add_option("--tracker", t.tracker, "oracle | external:COMMAND");
  cmd->add_option("--oracle-noise", t.noise, "Oracle noise std, px")->check(CLI::NonNegativeNumber);
  cmd->add_option("--oracle-failure", t.failure, "Oracle failure probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--cost-ms", t.cost_ms, "Simulated oracle cost per call, ms")
      ->check(CLI::PositiveNumber);
}

void add_filter_flags(CLI::App* cmd, FilterFlags& f) {
  cmd->add_option("--sigma-p", f.sigma_p, "Process noise intensity")->check(CLI::NonNegativeNumber);
  cmd->add_option("--sigma-m", f.sigma_m, "Measurement noise std, px")->check(CLI::PositiveNumber);
  cmd->add_option("--sigma-v", f.sigma_v, "Initial velocity std, px/frame")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", f.warmup, "Warmup frames")->check(CLI::NonNegativeNumber);
  cmd->add_option("--predictor", f.predictor, "Predictor kind");
}

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
  cmd->add_option("--out", o.out, "Output file (default: stdout)");
  cmd->add_option("--format", o.format, "Results format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--wall-clock", o.wall_clock, "Include wall-clock columns (not reproducible)");
  cmd->add_flag("--serial", o.serial, "Disable OpenMP parallelism");
}

void add_seed_flag(CLI::App* cmd) {
  cmd->add_option_function<std::uint64_t>(
         "--seed", [](const std::uint64_t& v) { g_seed_flag = v; }, "Seed (default: $KTRACK_SEED or 0)");
}

bool is_external(const TrackerFlags& t) { return t.tracker.rfind("external:", 0) == 0; }

void check_tracker(const TrackerFlags& t, CLI::App* cmd) {
  if (t.tracker != "oracle" && !is_external(t)) {
    throw UsageError("--tracker must be 'oracle' or 'external:COMMAND'");
  }
  if (is_external(t)) {
    if (t.tracker.size() == 9) throw UsageError("--tracker external: needs a command");
    for (const char* flag : {"--oracle-noise", "--oracle-failure", "--cost-ms"}) {
      if (cmd->count(flag) > 0) throw UsageError(std::string(flag) + " only applies to --tracker oracle");
    }
  }
}

KalmanParams params_from(const FilterFlags& f) {
  KalmanParams p;
  p.sigma_p = f.sigma_p;
  p.sigma_m = f.sigma_m;
  p.sigma_v = f.sigma_v;
  p.validate();
  return p;
}

TrajectorySpec spec_from(const DataFlags& d, int grid, std::uint64_t seed) {
  TrajectorySpec s;
  s.kind = parse_trajectory_kind(d.motion);
  s.frames = d.frames;
  s.num_points = grid;
  s.bounds = {d.width, d.height};
  s.seed = seed;
  s.speed_min = d.speed_min;
  s.speed_max = d.speed_max;
  s.amplitude = d.amplitude;
  s.period = d.period;
  s.radius = d.radius;
  s.angular_rate = d.angular_rate;
  s.accel_bound = d.accel_bound;
  return s;
}

json params_json(const KalmanParams& p) {
  return {{"sigmaP", p.sigma_p}, {"sigmaM", p.sigma_m}, {"sigmaV", p.sigma_v}, {"dt", p.dt}};
}

json tracker_json(const TrackerFlags& t) {
  if (is_external(t)) return {{"kind", "external"}, {"command", t.tracker.substr(9)}};
  return {{"kind", "oracle"}, {"noiseStd", t.noise}, {"failureProb", t.failure}, {"costMs", t.cost_ms}};
}

// Data source shared by run, sweep and ablate.
struct Source {
  std::optional<Dataset> loaded;
  std::string label;
  DataFlags flags;

  static Source from(const DataFlags& d) {
    Source s;
    s.flags = d;
    if (!d.dataset.empty()) {
      s.loaded = read_dataset(d.dataset);
      s.label = fs::path(d.dataset).stem().string();
    } else {
      s.label = d.motion;
    }
    return s;
  }

  std::vector<int> grids(const std::vector<int>& requested) const {
    if (loaded) return {static_cast<int>(loaded->num_points())};
    return requested;
  }

  DatasetFactory factory() const {
    return [this](int grid, std::uint64_t seed) {
      if (loaded) return SweepInput{label, *loaded};
      return SweepInput{label, generate(spec_from(flags, grid, seed))};
    };
  }

  json describe() const {
    if (loaded) {
      char digest[17];
      std::snprintf(digest, sizeof digest, "%016llx",
                    static_cast<unsigned long long>(dataset_digest(*loaded)));
      return {{"path", flags.dataset}, {"digest", digest}, {"points", loaded->num_points()},
              {"frames", loaded->frames()}};
    }
    json j = to_json(spec_from(flags, 0, 0));
    j.erase("numPoints");
    j.erase("seed");
    j.erase("occlusions");
    return {{"synthetic", j}};
  }
};

TrackerFactory tracker_factory(const TrackerFlags& t) {
  if (is_external(t)) {
    const std::string command = t.tracker.substr(9);
    return [command](const Dataset& ds, std::uint64_t) -> std::unique_ptr<TrackerSource> {
      return std::make_unique<ExternalTracker>(
          BridgeSession::open(command, ds.point_ids(), ds.bounds()));
    };
  }
  return [t](const Dataset& ds, std::uint64_t seed) -> std::unique_ptr<TrackerSource> {
    OracleConfig cfg;
    cfg.noise_std = t.noise;
    cfg.failure_prob = t.failure;
    cfg.simulated_cost_ms = t.cost_ms;
    cfg.seed = seed;
    return std::make_unique<OracleTracker>(ds, cfg);
  };
}

// Streams CSV rows as they complete; JSON is written once at the end.
class Emitter {
 public:
  Emitter(const OutputFlags& o, json config) : o_(o), config_(std::move(config)) {
    if (o_.format == "csv") {
      if (!o_.out.empty()) {
        writer_.emplace(o_.out, config_, ResultsWriteOptions{o_.wall_clock});
      } else {
        std::cout << "# config " << config_.dump() << '\n' << results_header() << '\n' << std::flush;
      }
    }
  }

  void operator()(const SweepRow& row) {
    if (o_.format == "json") {
      table_.rows.push_back(row);
    } else if (writer_) {
      writer_->write(row);
    } else {
      std::cout << format_row(row, {o_.wall_clock}) << '\n' << std::flush;
    }
  }

  void finish() {
    if (o_.format != "json") return;
    table_.config = config_;
    const std::string text = results_to_json(table_, {o_.wall_clock}).dump(2) + "\n";
    if (o_.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(o_.out, std::ios::binary | std::ios::trunc);
      if (!(out << text)) fail(ErrorKind::Io, "cannot write '" + o_.out + "'");
    }
  }

 private:
  OutputFlags o_;
  json config_;
  std::optional<ResultsWriter> writer_;
  ResultsTable table_;
};

json base_config(const std::string& command, const Source& src, const TrackerFlags& t,
                 const KalmanParams& p, std::uint64_t seed) {
  return {{"command", command},
          {"seed", seed},
          {"dataset", src.describe()},
          {"tracker", tracker_json(t)},
          {"filter", params_json(p)}};
}

int cmd_generate(const DataFlags& d, const std::string& out) {
  const std::uint64_t seed = resolved_seed();
  const Dataset ds = generate(spec_from(d, d.grid, seed));
  write_dataset(ds, out);
  return 0;
}

int cmd_run(const DataFlags& d, const TrackerFlags& t, const FilterFlags& f, const OutputFlags& o,
            std::int64_t n) {
  const std::uint64_t seed = resolved_seed();
  const KalmanParams params = params_from(f);
  const PredictorKind kind = parse_predictor_kind(f.predictor);
  const Source src = Source::from(d);
  const SweepInput input = src.factory()(d.grid, seed);
  const ScheduleConfig sc{input.dataset.frames(), n, f.warmup};
  sc.validate();

  json config = base_config("run", src, t, params, seed);
  config["n"] = n;
  config["warmup"] = f.warmup;
  config["predictor"] = f.predictor;
  config["grid"] = input.dataset.num_points();
  Emitter emit(o, config);
  const SweepRow row = run_single(input, tracker_factory(t), sc, kind, params,
                                  static_cast<int>(input.dataset.num_points()), seed);
  emit(row);
  emit.finish();
  if (row.error.empty()) return 0;
  if (!row.error_kind) {
    std::cerr << "ktrack: " << row.error << '\n';
    return 1;
  }
  std::cerr << "ktrack: " << to_string(*row.error_kind) << ": " << row.error << '\n';
  return exit_code(*row.error_kind);
}

std::vector<PredictorKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<PredictorKind> out;
  for (const auto& n : names) out.push_back(parse_predictor_kind(n));
  return out;
}

// Failed cells are recorded in their rows and do not change the exit code.
void warn_failures(const std::vector<SweepRow>& rows) {
  const auto failed = std::count_if(rows.begin(), rows.end(),
                                    [](const SweepRow& r) { return !r.error.empty(); });
  if (failed > 0) std::cerr << "ktrack: " << failed << " of " << rows.size() << " cells failed\n";
}

int cmd_sweep(const DataFlags& d, const TrackerFlags& t, const FilterFlags& f, const OutputFlags& o,
              const std::vector<std::int64_t>& ns, const std::vector<std::string>& predictors,
              const std::vector<int>& grids, const std::vector<std::int64_t>& warmups,
              const std::vector<std::uint64_t>& seeds_in) {
  const std::uint64_t seed = resolved_seed();
  const Source src = Source::from(d);
  SweepPlan plan;
  plan.ns = ns;
  plan.kinds = parse_kinds(predictors.empty() ? std::vector<std::string>{f.predictor} : predictors);
  plan.grid_sizes = src.grids(grids.empty() ? std::vector<int>{d.grid} : grids);
  plan.warmups = warmups.empty() ? std::vector<std::int64_t>{f.warmup} : warmups;
  plan.seeds = seeds_in.empty() ? std::vector<std::uint64_t>{seed} : seeds_in;
  plan.params = params_from(f);
  plan.validate();

  json config = base_config("sweep", src, t, plan.params, seed);
  config["ns"] = plan.ns;
  config["predictors"] = predictors.empty() ? std::vector<std::string>{f.predictor} : predictors;
  config["grids"] = plan.grid_sizes;
  config["warmups"] = plan.warmups;
  config["seeds"] = plan.seeds;
  Emitter emit(o, config);
  warn_failures(run_sweep(plan, src.factory(), tracker_factory(t), std::ref(emit),
                          o.serial ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel));
  emit.finish();
  return 0;
}

int cmd_ablate(const DataFlags& d, const TrackerFlags& t, const FilterFlags& f, const OutputFlags& o,
               std::int64_t n) {
  const std::uint64_t seed = resolved_seed();
  const Source src = Source::from(d);
  const KalmanParams params = params_from(f);
  const std::vector<std::int64_t> warmup_axis = {0, 1, 2, 3, 5, 10};

  SweepPlan by_kind;
  by_kind.ns = {n};
  by_kind.kinds = {kAllPredictorKinds.begin(), kAllPredictorKinds.end()};
  by_kind.grid_sizes = src.grids({d.grid});
  by_kind.warmups = {f.warmup};
  by_kind.seeds = {seed};
  by_kind.params = params;
  SweepPlan by_warmup = by_kind;
  by_warmup.kinds = {parse_predictor_kind(f.predictor)};
  by_warmup.warmups = warmup_axis;
  by_kind.validate();

  json config = base_config("ablate", src, t, params, seed);
  config["n"] = n;
  config["warmup"] = f.warmup;
  config["predictor"] = f.predictor;
  config["grid"] = by_kind.grid_sizes.front();
  config["blocks"] = {{{"axis", "predictor"}, {"rows", by_kind.kinds.size()}},
                      {{"axis", "warmup"}, {"warmups", warmup_axis}}};
  Emitter emit(o, config);
  const auto policy = o.serial ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
  auto rows = run_sweep(by_kind, src.factory(), tracker_factory(t), std::ref(emit), policy);
  const auto more = run_sweep(by_warmup, src.factory(), tracker_factory(t), std::ref(emit), policy);
  rows.insert(rows.end(), more.begin(), more.end());
  warn_failures(rows);
  emit.finish();
  return 0;
}

int cmd_report(const std::string& results, const std::string& out_dir,
               const std::vector<std::string>& metrics, const std::string& x,
               const std::string& series) {
  const ResultsTable table = read_results(results);
  fs::create_directories(out_dir);
  json config = {{"command", "report"}, {"results", results}, {"x", x}, {"series", series},
                 {"source", table.config}};
  for (const auto& metric : metrics) {
    ChartAxes axes{x, metric, series, metric + " vs " + x};
    emit_chart(table.rows, axes, fs::path(out_dir) / (metric + ".svg"), config);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kalman-filter keyframe acceleration for black-box point trackers"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", "ktrack 1.0");

  DataFlags data;
  TrackerFlags tracker;
  FilterFlags filter;
  OutputFlags output;
  std::int64_t n = 5;
  std::string gen_out;
  std::vector<std::int64_t> ns = {0, 2, 3, 5, 10, 15};
  std::vector<std::string> predictors;
  std::vector<int> grids;
  std::vector<std::int64_t> warmups;
  std::vector<std::uint64_t> seeds;
  std::string results, out_dir;
  std::vector<std::string> metrics = {"pck5", "epe", "aj", "retention", "speedup"};
  std::string x_axis = "n", series = "predictor";

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  add_data_flags(gen, data, false);
  gen->add_option("--grid", data.grid, "Number of points")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Dataset file")->required();
  add_seed_flag(gen);

  auto* run = app.add_subcommand("run", "One keyframe interval against its per-frame baseline");
  add_data_flags(run, data, true);
  run->add_option("--grid", data.grid, "Number of synthetic points")->check(CLI::PositiveNumber);
  add_tracker_flags(run, tracker);
  add_filter_flags(run, filter);
  add_output_flags(run, output);
  add_seed_flag(run);
  run->add_option("--n", n, "Keyframe interval (0 = per-frame baseline)")
      ->check(CLI::NonNegativeNumber);

  auto* sweep = app.add_subcommand("sweep", "Cartesian sweep over N, predictor, grid, warmup, seed");
  add_data_flags(sweep, data, true);
  add_tracker_flags(sweep, tracker);
  add_filter_flags(sweep, filter);
  add_output_flags(sweep, output);
  add_seed_flag(sweep);
  sweep->add_option("--ns", ns, "Keyframe intervals")->delimiter(',')->check(CLI::NonNegativeNumber);
  sweep->add_option("--predictors", predictors, "Predictor kinds (default: --predictor)")
      ->delimiter(',');
  auto* grid_opt = sweep->add_option("--grids", grids, "Synthetic point counts")
                       ->delimiter(',')
                       ->check(CLI::PositiveNumber);
  sweep->add_option("--grid", data.grid, "Synthetic point count")
      ->check(CLI::PositiveNumber)
      ->excludes(grid_opt);
  sweep->add_option("--warmups", warmups, "Warmup counts (default: --warmup)")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--seeds", seeds, "Seeds (default: --seed)")->delimiter(',');

  auto* ablate = app.add_subcommand("ablate", "Predictor and warmup ablations at a fixed N");
  add_data_flags(ablate, data, true);
  ablate->add_option("--grid", data.grid, "Number of synthetic points")->check(CLI::PositiveNumber);
  add_tracker_flags(ablate, tracker);
  add_filter_flags(ablate, filter);
  add_output_flags(ablate, output);
  add_seed_flag(ablate);
  ablate->add_option("--n", n, "Keyframe interval")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "One SVG chart per metric from a results file");
  report->add_option("--results", results, "Results CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--out-dir", out_dir, "Chart directory")->required();
  report->add_option("--metrics", metrics, "Metric columns")->delimiter(',');
  report->add_option("--x", x_axis, "x-axis column");
  report->add_option("--series", series, "Series column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ktrack: " << e.what() << '\n';
    return kUsageExit;
  }

  try {
    if (*gen) return cmd_generate(data, gen_out);
    if (*run) {
      check_tracker(tracker, run);
      return cmd_run(data, tracker, filter, output, n);
    }
    if (*sweep) {
      check_tracker(tracker, sweep);
      return cmd_sweep(data, tracker, filter, output, ns, predictors, grids, warmups, seeds);
    }
    if (*ablate) {
      check_tracker(tracker, ablate);
      return cmd_ablate(data, tracker, filter, output, n);
    }
    if (*report) return cmd_report(results, out_dir, metrics, x_axis, series);
  } catch (const UsageError& e) {
    std::cerr << "ktrack: " << e.what() << '\n';
    return kUsageExit;
  } catch (const Error& e) {
    std::cerr << "ktrack: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ktrack: unexpected failure: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
