// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "ktrack/dataio.hpp"
#include "ktrack/error.hpp"
#include "ktrack/kalman.hpp"
#include "ktrack/metrics.hpp"
#include "ktrack/scheduler.hpp"
#include "ktrack/sweep.hpp"
#include "ktrack/synthgen.hpp"
#include "ktrack/trackers.hpp"

using namespace ktrack;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Mat4 random_spd(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat4 a;
  for (int i = 0; i < 16; ++i) a(i) = n(rng);
  return scale * (a * a.transpose() + 0.1 * Mat4::Identity());
}

oracle::Gaussian to_oracle(const FilterState& s) {
  oracle::Gaussian g;
  for (int i = 0; i < 4; ++i) {
    g.mean(i, 0) = s.mean(i);
    for (int j = 0; j < 4; ++j) g.cov(i, j) = s.cov(i, j);
  }
  return g;
}

double rel_error(const FilterState& s, const oracle::Gaussian& g) {
  double diff = 0, ref = 0;
  for (int i = 0; i < 4; ++i) {
    diff = std::max(diff, std::abs(s.mean(i) - g.mean(i, 0)));
    ref = std::max(ref, std::abs(g.mean(i, 0)));
    for (int j = 0; j < 4; ++j) {
      diff = std::max(diff, std::abs(s.cov(i, j) - g.cov(i, j)));
      ref = std::max(ref, std::abs(g.cov(i, j)));
    }
  }
  return diff / ref;
}

Verdict filter_vs_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-50, 50), sig(0.05, 3.0), dts(0.25, 2.0);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    KalmanParams p{sig(rng), sig(rng), sig(rng) * 3, dts(rng)};
    FilterState s;
    for (int k = 0; k < 4; ++k) s.mean(k) = u(rng);
    s.cov = random_spd(rng, sig(rng));
    const Point2 z{u(rng), u(rng)};

    const FilterState pred = predict(s, MotionModel::constant_velocity(p));
    const auto opred = oracle::predict(to_oracle(s), p.dt, p.sigma_p);
    worst = std::max(worst, rel_error(pred, opred));

    const FilterState post = update(pred, z, MeasurementModel::position(p.sigma_m), 1);
    const auto opost = oracle::update(opred, z.x, z.y, p.sigma_m);
    worst = std::max(worst, rel_error(post, opost));
  }
  const double t = seconds_since(start);
  return {worst <= 1e-9 && t < 1.0, fmt("max relative error %.2e, %.3f s", worst, t)};
}

// 1-D position-velocity grid filter. Nodes share spacing h on both axes and
// v = 0 sits on a node, so (x, v) -> (x + v, v) maps nodes to nodes. The
// rank-one process noise a * (1/2, 1) is sampled at a = 2 k h, which shifts
// by (k, 2k) nodes.
struct GridFilter {
  static constexpr int kSize = 400;
  double h, x0;
  int v_zero = kSize / 2;
  std::vector<double> p;

  GridFilter(double spacing, double x_min) : h(spacing), x0(x_min), p(kSize * kSize, 0.0) {}

  double x(int i) const { return x0 + i * h; }
  double v(int j) const { return (j - v_zero) * h; }
  double& at(int i, int j) { return p[static_cast<std::size_t>(i) * kSize + j]; }

  void normalize() {
    double total = 0;
    for (double w : p) total += w;
    for (double& w : p) w /= total;
  }

  void set_prior(double mx, double sx, double mv, double sv) {
    for (int i = 0; i < kSize; ++i)
      for (int j = 0; j < kSize; ++j) {
        const double dx = (x(i) - mx) / sx, dv = (v(j) - mv) / sv;
        at(i, j) = std::exp(-0.5 * (dx * dx + dv * dv));
      }
    normalize();
  }

  void predict(double sigma_p) {
    std::vector<double> kernel;
    const int reach = static_cast<int>(std::ceil(8 * sigma_p / (2 * h)));
    for (int k = -reach; k <= reach; ++k) {
      const double a = 2 * k * h / sigma_p;
      kernel.push_back(std::exp(-0.5 * a * a));
    }
    double ksum = 0;
    for (double w : kernel) ksum += w;
    std::vector<double> next(p.size(), 0.0);
    for (int i = 0; i < kSize; ++i)
      for (int j = 0; j < kSize; ++j) {
        const double w = at(i, j);
        if (w == 0) continue;
        const int i1 = i + (j - v_zero);
        for (int k = -reach; k <= reach; ++k) {
          const int ii = i1 + k, jj = j + 2 * k;
          if (ii < 0 || ii >= kSize || jj < 0 || jj >= kSize) continue;
          next[static_cast<std::size_t>(ii) * kSize + jj] += w * kernel[k + reach] / ksum;
        }
      }
    p.swap(next);
    normalize();
  }

  void update(double z, double sigma_m) {
    for (int i = 0; i < kSize; ++i) {
      const double d = (x(i) - z) / sigma_m;
      const double l = std::exp(-0.5 * d * d);
      for (int j = 0; j < kSize; ++j) at(i, j) *= l;
    }
    normalize();
  }

  std::pair<double, double> mean() {
    double mx = 0, mv = 0;
    for (int i = 0; i < kSize; ++i)
      for (int j = 0; j < kSize; ++j) {
        mx += at(i, j) * x(i);
        mv += at(i, j) * v(j);
      }
    return {mx, mv};
  }
};

Verdict bayesian_grid() {
  const auto start = Clock::now();
  const KalmanParams params{0.5, 1.0, 1.0, 1.0};
  const double h = 0.05;
  const std::vector<double> zs = {0.3, 0.2, 1.4, 1.1, 2.3, 2.4};

  GridFilter grid(h, -8.0);
  grid.set_prior(zs[0], params.sigma_m, 0.0, params.sigma_v);
  FilterState kf = init_filter({zs[0], 0.0}, 0, params);
  const auto motion = MotionModel::constant_velocity(params);
  const auto meas = MeasurementModel::position(params.sigma_m);

  double worst = 0;
  for (std::size_t t = 1; t <= 5; ++t) {
    grid.predict(params.sigma_p);
    grid.update(zs[t], params.sigma_m);
    kf = update(predict(kf, motion), {zs[t], 0.0}, meas, static_cast<std::int64_t>(t));
    const auto [gx, gv] = grid.mean();
    worst = std::max({worst, std::abs(gx - kf.mean(0)), std::abs(gv - kf.mean(2))});
  }
  const double t = seconds_since(start);
  return {worst <= 0.02 * h && t < 30.0,
          fmt("max mean gap %.2e (limit %.1e = 2%% of grid step), %.2f s", worst, 0.02 * h, t)};
}

// States reachable by the filter: a random number of predict/update steps
// from init_filter under random parameters.
Verdict covariance_monotonicity() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> sp(0.01, 2.0), sm(0.1, 5.0), sv(0.5, 20.0), u(-100, 100),
      coin(0, 1);
  std::uniform_int_distribution<int> steps(0, 30);
  int checks = 0, violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const KalmanParams params{sp(rng), sm(rng), sv(rng), 1.0};
    const auto motion = MotionModel::constant_velocity(params);
    const auto meas = MeasurementModel::position(params.sigma_m);
    FilterState s = init_filter({u(rng), u(rng)}, 0, params);
    const int n = steps(rng);
    for (int k = 1; k <= n; ++k) {
      s = predict(s, motion);
      if (coin(rng) < 0.7) s = update(s, {u(rng), u(rng)}, meas, k);
    }
    const FilterState pred = predict(s, motion);
    const FilterState post = update(s, {u(rng), u(rng)}, meas, n + 1);
    ++checks;
    if (!(pred.cov.trace() > s.cov.trace())) ++violations;
    ++checks;
    if (post.cov.trace() > s.cov.trace()) ++violations;
  }
  return {violations == 0, fmt("%d checks over 1000 states, %d violations", checks, violations)};
}

std::unique_ptr<TrackerSource> oracle_factory(const Dataset& ds, std::uint64_t seed, double noise) {
  OracleConfig cfg;
  cfg.noise_std = noise;
  cfg.seed = seed;
  return std::make_unique<OracleTracker>(ds, cfg);
}

Verdict inference_counts() {
  const std::int64_t c3 = inference_count({100, 10, 3});
  const std::int64_t c0 = inference_count({100, 10, 0});
  const std::int64_t nominal = nominal_inference_count({100, 10, 0});

  TrajectorySpec spec;
  spec.frames = 100;
  spec.num_points = 9;
  spec.bounds = {256, 256};
  const SweepInput input{"cv", generate(spec)};
  const TrackerFactory trackers = [](const Dataset& ds, std::uint64_t seed) {
    return oracle_factory(ds, seed, 1.0);
  };
  double worst = 0;
  for (std::int64_t w : {0, 3}) {
    const SweepRow row = run_single(input, trackers, {100, 10, w}, PredictorKind::FullKalman, {}, 9, 0);
    const double expected = 100.0 / static_cast<double>(row.tracker_calls);
    worst = std::max(worst, std::abs(*row.report->speedup / expected - 1.0));
  }
  const bool pass = c3 == 12 && c0 == 10 && nominal == 10 && worst <= 0.01;
  return {pass, fmt("count(W=3)=%lld count(W=0)=%lld ceil(T/N)=%lld, speedup off by %.1e",
                    static_cast<long long>(c3), static_cast<long long>(c0),
                    static_cast<long long>(nominal), worst)};
}

// Mean PCK@5 per predictor over seeded datasets.
std::vector<double> mean_pck5(const std::function<TrajectorySpec(std::uint64_t)>& make_spec,
                              int seeds, const ScheduleConfig& base_config,
                              const std::vector<PredictorKind>& kinds, const KalmanParams& params,
                              double noise) {
  std::vector<double> sum(kinds.size(), 0.0);
  for (int s = 0; s < seeds; ++s) {
    const Dataset ds = generate(make_spec(static_cast<std::uint64_t>(s)));
    ScheduleConfig cfg = base_config;
    cfg.total_frames = ds.frames();
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      OracleConfig oc;
      oc.noise_std = noise;
      oc.seed = static_cast<std::uint64_t>(s);
      OracleTracker oracle(ds, oc);
      const TrackResult r = run_session(oracle, ds, cfg, kinds[k], params);
      sum[k] += evaluate(r, ds).pck5();
    }
  }
  for (double& v : sum) v /= seeds;
  return sum;
}

Verdict ablation_ordering() {
  const auto start = Clock::now();
  const std::vector<PredictorKind> kinds = {
      PredictorKind::FullKalman, PredictorKind::LinearInterpolation,
      PredictorKind::ConstantPosition, PredictorKind::ZeroOrderHold,
      PredictorKind::NoVelocityKalman};
  const KalmanParams params;
  // Large frame: no border reflections, so the motion stays constant-velocity.
  const auto spec = [](std::uint64_t seed) {
    TrajectorySpec s;
    s.kind = TrajectoryKind::ConstantVelocity;
    s.frames = 100;
    s.num_points = 20;
    s.bounds = {4096, 4096};
    s.seed = seed;
    return s;
  };
  const auto m = mean_pck5(spec, 20, {100, 5, 3}, kinds, params, 1.0);
  const double t = seconds_since(start);
  const bool pass = m[0] > m[1] && m[1] > m[2] && m[2] > m[3] && m[0] > m[4] && t < 60.0;
  return {pass, fmt("FK %.4f LI %.4f CP %.4f ZOH %.4f NoVel %.4f, %.1f s", m[0], m[1], m[2], m[3],
                    m[4], t)};
}

Verdict retention_trend() {
  const std::vector<std::int64_t> ns = {2, 3, 5, 10, 15};
  const KalmanParams params;
  std::vector<double> retention(ns.size(), 0.0);
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    TrajectorySpec spec;
    spec.kind = TrajectoryKind::Sinusoidal;
    spec.frames = 100;
    spec.num_points = 20;
    spec.bounds = {256, 256};
    spec.seed = static_cast<std::uint64_t>(s);
    const SweepInput input{"sinusoidal", generate(spec)};
    const TrackerFactory trackers = [](const Dataset& ds, std::uint64_t seed) {
      return oracle_factory(ds, seed, 1.0);
    };
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const SweepRow row = run_single(input, trackers, {100, ns[i], 3}, PredictorKind::FullKalman,
                                      params, 20, static_cast<std::uint64_t>(s));
      retention[i] += *row.report->retention / seeds;
    }
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ns.size(); ++i) decreasing = decreasing && retention[i] < retention[i - 1];
  const double gap = retention.front() - retention.back();
  std::ostringstream d;
  d << "retention";
  for (std::size_t i = 0; i < ns.size(); ++i) d << " N=" << ns[i] << ":" << fmt("%.3f", retention[i]);
  d << fmt(", gap %.1f points", 100 * gap);
  return {decreasing && gap >= 0.10, d.str()};
}

Verdict warmup_trend() {
  const KalmanParams params;
  const auto spec = [](std::uint64_t seed) {
    TrajectorySpec s;
    s.kind = TrajectoryKind::PiecewiseAcceleration;
    s.frames = 100;
    s.num_points = 20;
    s.bounds = {256, 256};
    s.seed = seed;
    return s;
  };
  std::vector<double> pck;
  for (std::int64_t w : {0, 3})
    pck.push_back(mean_pck5(spec, 20, {100, 5, w}, {PredictorKind::FullKalman}, params, 1.0)[0]);
  const double s3 = 100.0 / static_cast<double>(inference_count({100, 5, 3}));
  const double s10 = 100.0 / static_cast<double>(inference_count({100, 5, 10}));
  return {pck[1] >= pck[0] && s3 >= s10,
          fmt("PCK@5 W=0 %.4f W=3 %.4f; speedup W=3 %.2fx W=10 %.2fx", pck[0], pck[1], s3, s10)};
}

Verdict noiseless_exactness() {
  KalmanParams params;
  params.sigma_p = 1e-12;
  params.sigma_m = 1e-6;
  TrajectorySpec spec;
  spec.frames = 100;
  spec.num_points = 20;
  spec.bounds = {100000, 100000};
  spec.seed = 3;
  const Dataset ds = generate(spec);
  double worst = 0;
  for (std::int64_t n = 1; n <= 15; ++n) {
    OracleTracker oracle(ds, {});
    const TrackResult r = run_session(oracle, ds, {100, n, 3}, PredictorKind::FullKalman, params);
    worst = std::max(worst, evaluate(r, ds).epe);
  }
  return {worst < 1e-6, fmt("max EPE over N=1..15: %.2e px", worst)};
}

Verdict per_point_overhead() {
  const KalmanParams params;
  const auto motion = MotionModel::constant_velocity(params);
  const auto meas = MeasurementModel::position(params.sigma_m);
  FilterState s = init_filter({10, 10}, 0, params);
  std::vector<double> us;
  for (int i = 1; i <= 20000; ++i) {
    const auto t0 = Clock::now();
    s = update(predict(s, motion), {10.0 + i, 10.0 + 0.5 * i}, meas, i);
    us.push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
  }
  std::nth_element(us.begin(), us.begin() + us.size() / 2, us.end());
  const double median = us[us.size() / 2];
  return {median < 100.0, fmt("median predict+update %.3f us", median)};
}

Verdict metric_units() {
  int failures = 0;
  auto check = [&](bool ok) { failures += ok ? 0 : 1; };

  Positions same(2, 3, {4, 4});
  const Visibility all(2, 3, 1);
  check(epe(same, same, all) == 0.0);
  check(pck(same, same, 5.0, all) == 1.0);
  check(average_jaccard(same, all, same, all) == 1.0);

  Positions off(1, 1, {3, 4}), origin(1, 1, {0, 0});
  const Visibility one(1, 1, 1);
  check(epe(off, origin, one) == 5.0);
  check(pck(off, origin, 5.0, one) == 1.0);
  check(pck(off, origin, 4.0, one) == 0.0);

  // 3 points x 2 frames, ground truth at the origin everywhere.
  Positions pred(3, 2), gt(3, 2);
  Visibility pv(3, 2), gv(3, 2);
  auto set = [&](std::size_t p, std::size_t f, Point2 x, bool pvis, bool gvis) {
    pred(p, f) = x;
    pv(p, f) = pvis;
    gv(p, f) = gvis;
  };
  set(0, 0, {0.5, 0}, true, true);
  set(0, 1, {3, 0}, true, true);
  set(1, 0, {0, 0}, true, false);
  set(1, 1, {10, 0}, false, true);
  set(2, 0, {0, 6}, true, true);
  set(2, 1, {0, 0}, false, false);
  check(jaccard_at(pred, pv, gt, gv, 1.0) == 1.0 / 7.0);
  check(jaccard_at(pred, pv, gt, gv, 4.0) == 2.0 / 6.0);
  check(jaccard_at(pred, pv, gt, gv, 8.0) == 3.0 / 5.0);
  check(std::abs(average_jaccard(pred, pv, gt, gv) - 191.0 / 525.0) < 1e-15);

  MetricReport method, baseline;
  method.pck[3] = 0.672;
  baseline.pck[3] = 0.944;
  method.simulated_cost_ms = baseline.simulated_cost_ms = 1.0;
  const double r = retention_and_speedup(method, baseline).retention;
  check(std::lround(100 * r) == 71);
  return {failures == 0, fmt("%d failing examples; retention 0.672/0.944 = %.4f", failures, r)};
}

std::string sweep_table(ExecutionPolicy policy) {
  SweepPlan plan;
  plan.ns = {0, 2, 5, 10};
  plan.kinds = {kAllPredictorKinds.begin(), kAllPredictorKinds.end()};
  plan.grid_sizes = {9, 16};
  plan.seeds = {0, 1};
  const DatasetFactory datasets = [](int grid, std::uint64_t seed) {
    TrajectorySpec spec;
    spec.kind = TrajectoryKind::Sinusoidal;
    spec.frames = 60;
    spec.num_points = grid;
    spec.bounds = {256, 256};
    spec.seed = seed;
    return SweepInput{"sinusoidal", generate(spec)};
  };
  const TrackerFactory trackers = [](const Dataset& ds, std::uint64_t seed) {
    return oracle_factory(ds, seed, 1.0);
  };
  std::string out = results_header() + "\n";
  run_sweep(plan, datasets, trackers, [&](const SweepRow& row) { out += format_row(row) + "\n"; },
            policy);
  return out;
}

Verdict determinism() {
  const std::string a = sweep_table(ExecutionPolicy::Parallel);
  const std::string b = sweep_table(ExecutionPolicy::Parallel);
  const std::string c = sweep_table(ExecutionPolicy::Serial);
  const auto rows = std::count(a.begin(), a.end(), '\n') - 1;
  return {a == b && a == c,
          fmt("%ld rows, repeat %s, serial %s", static_cast<long>(rows),
              a == b ? "identical" : "differs", a == c ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"filter matches dense oracle", filter_vs_oracle},
      {"posterior matches grid Bayes filter", bayesian_grid},
      {"covariance trace monotonicity", covariance_monotonicity},
      {"inference count and speedup", inference_counts},
      {"ablation ordering", ablation_ordering},
      {"retention decreases with N", retention_trend},
      {"warmup trend", warmup_trend},
      {"noiseless exactness", noiseless_exactness},
      {"per-point overhead", per_point_overhead},
      {"metric unit examples", metric_units},
      {"sweep determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
