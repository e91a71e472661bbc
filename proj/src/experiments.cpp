#include "sphesn/experiments.hpp"

#include "sphesn/csv.hpp"
#include "sphesn/digest.hpp"
#include "sphesn/linalg.hpp"
#include "sphesn/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <thread>
#include <tuple>

namespace sphesn {

namespace {

// Stream identifiers under the master seed.
constexpr std::uint64_t kReservoirStream = 1;
constexpr std::uint64_t kSignalStream = 2;
constexpr std::uint64_t kLyapunovStream = 3;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename E>
[[noreturn]] void rethrow_as(const E& e, const std::string& tag) {
  throw E(tag + e.what());
}

// Re-raises the current library error with `tag` prepended, keeping its type.
[[noreturn]] void rethrow_tagged(const std::string& tag) {
  try {
    throw;
  } catch (const DegenerateActivation& e) {
    rethrow_as(e, tag);
  } catch (const DimensionMismatch& e) {
    rethrow_as(e, tag);
  } catch (const InvalidArgument& e) {
    rethrow_as(e, tag);
  } catch (const NumericalError& e) {
    rethrow_as(e, tag);
  } catch (const Error& e) {
    rethrow_as(e, tag);
  }
}

void check_lengths(long train, long test, long washout) {
  if (train < 2 || test < 2) throw InvalidArgument("train and test lengths must be at least 2");
  if (washout < 0) throw InvalidArgument("washout must be non-negative");
}

}  // namespace

std::string_view to_string(Benchmark b) {
  switch (b) {
    case Benchmark::white_noise:
      return "white_noise";
    case Benchmark::mso:
      return "mso";
    case Benchmark::lorenz:
      return "lorenz";
    case Benchmark::mackey_glass:
      return "mackey_glass";
    case Benchmark::santa_fe:
      return "santa_fe";
  }
  return "unknown";
}

Benchmark parse_benchmark(std::string_view name) {
  for (Benchmark b : {Benchmark::white_noise, Benchmark::mso, Benchmark::lorenz, Benchmark::mackey_glass,
                      Benchmark::santa_fe})
    if (to_string(b) == name) return b;
  throw InvalidArgument("unknown benchmark '" + std::string(name) + "'");
}

ReservoirConfig memory_task_config(Activation family, int n_neurons) {
  ReservoirConfig c;
  c.n_neurons = n_neurons;
  c.activation = family;
  if (family == Activation::spherical) {
    c.spectral_radius = 15.0;
    c.input_scaling = 0.01;
  } else {
    c.spectral_radius = 0.95;
    c.input_scaling = 1.0;
  }
  return c;
}

DelayMemoryOptions DelayMemoryOptions::paper_scale() {
  DelayMemoryOptions o;
  o.train_len = 5000;
  o.test_len = 2000;
  o.n_runs = 20;
  return o;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("mean_std: no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto work = [&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
          failed = true;
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string series_digest(const TimeSeries& series) {
  return sha256_hex(series.values.data(), static_cast<std::size_t>(series.values.size()) * sizeof(double));
}

TimeSeries benchmark_series(Benchmark benchmark, Eigen::Index length, std::uint64_t seed,
                            const SignalOptions& options) {
  TimeSeries raw;
  switch (benchmark) {
    case Benchmark::white_noise:
      raw = white_noise(length, seed);
      break;
    case Benchmark::mso:
      raw = mso(length);
      break;
    case Benchmark::lorenz:
      raw = lorenz_x(length, options.lorenz);
      break;
    case Benchmark::mackey_glass:
      raw = mackey_glass(length, options.mackey_glass);
      break;
    case Benchmark::santa_fe: {
      if (options.santa_fe_path.empty()) throw InvalidArgument("santa_fe benchmark needs a data file");
      raw = load_santa_fe(options.santa_fe_path);
      if (raw.length() < length)
        throw InvalidArgument("santa_fe series has " + std::to_string(raw.length()) + " samples, need " +
                              std::to_string(length));
      raw.values.conservativeResize(length, Eigen::NoChange);
      break;
    }
  }
  return normalize_unit_variance(raw, options.center);
}

DelayRun delay_memory_run(Benchmark benchmark, const ReservoirConfig& config, const DelayMemoryOptions& options,
                          int run) {
  check_lengths(options.train_len, options.test_len, options.washout);
  if (options.tau_max < 0) throw InvalidArgument("tau_max must be non-negative");

  ReservoirConfig cfg = config;
  cfg.seed = derive_seed(options.master_seed, {kReservoirStream, static_cast<std::uint64_t>(run)});
  const Reservoir reservoir = build_reservoir(cfg);

  // Layout: [tau_max | washout | train | test]. The leading tau_max steps
  // make u_(k - tau) available for every trained step.
  const Eigen::Index skip = options.tau_max + options.washout;
  const Eigen::Index length = skip + options.train_len + options.test_len;
  const TimeSeries series = benchmark_series(
      benchmark, length, derive_seed(options.master_seed, {kSignalStream, static_cast<std::uint64_t>(run)}),
      options.signal);
  if (series.channels() != cfg.n_inputs)
    throw DimensionMismatch("benchmark series has " + std::to_string(series.channels()) + " channels, reservoir " +
                            std::to_string(cfg.n_inputs) + " inputs");

  const Trajectory traj = drive(reservoir, series.values, default_initial_state(cfg), skip);
  const auto train_states = traj.states.middleRows(skip, options.train_len);
  const auto test_states = traj.states.middleRows(skip + options.train_len, options.test_len);
  const RidgeSolver solver(train_states, options.ridge_lambda);

  DelayRun out;
  out.dataset_digest = series_digest(series);
  for (int tau = 0; tau <= options.tau_max; ++tau) {
    const Matrix train_y = series.values.middleRows(skip - tau, options.train_len);
    const Matrix test_y = series.values.middleRows(skip + options.train_len - tau, options.test_len);
    // One target column at a time, so each delay is solved exactly as a
    // standalone fit would be.
    const ReadoutWeights w = solver.solve(train_y);
    out.train_acc.push_back(evaluate(predict(w, train_states), train_y).accuracy);
    out.test_acc.push_back(evaluate(predict(w, test_states), test_y).accuracy);
  }
  return out;
}

DelayMemoryResult delay_memory_experiment(Benchmark benchmark, const ReservoirConfig& config,
                                          const DelayMemoryOptions& options) {
  config.validate();
  if (options.n_runs < 1) throw InvalidArgument("n_runs must be at least 1");
  std::vector<DelayRun> runs(static_cast<std::size_t>(options.n_runs));
  parallel_for(runs.size(), options.threads, [&](std::size_t r) {
    try {
      runs[r] = delay_memory_run(benchmark, config, options, static_cast<int>(r));
    } catch (const Error&) {
      rethrow_tagged("run " + std::to_string(r) + ": ");
    }
  });

  DelayMemoryResult result;
  result.benchmark = benchmark;
  result.family = config.activation;
  result.n_runs = options.n_runs;
  result.config = config;
  for (int r = 0; r < options.n_runs; ++r) {
    result.reservoir_seeds.push_back(
        derive_seed(options.master_seed, {kReservoirStream, static_cast<std::uint64_t>(r)}));
    result.dataset_digests.push_back(runs[static_cast<std::size_t>(r)].dataset_digest);
  }
  for (int tau = 0; tau <= options.tau_max; ++tau) {
    std::vector<double> train, test;
    for (const auto& run : runs) {
      train.push_back(run.train_acc[static_cast<std::size_t>(tau)]);
      test.push_back(run.test_acc[static_cast<std::size_t>(tau)]);
    }
    const auto [trm, trs] = mean_std(train);
    const auto [tem, tes] = mean_std(test);
    result.taus.push_back(tau);
    result.train_acc_mean.push_back(trm);
    result.train_acc_std.push_back(trs);
    result.test_acc_mean.push_back(tem);
    result.test_acc_std.push_back(tes);
  }
  return result;
}

GridRow select_best_hyperparams(const std::vector<GridRow>& grid_results) {
  if (grid_results.empty()) throw InvalidArgument("select_best_hyperparams: empty table");
  const GridRow* best = nullptr;
  for (const auto& row : grid_results) {
    if (std::isnan(row.train_nrmse)) continue;
    if (!best || std::tie(row.train_nrmse, row.sr, row.scaling) < std::tie(best->train_nrmse, best->sr, best->scaling))
      best = &row;
  }
  if (!best) throw NumericalError("select_best_hyperparams: every row has a NaN training error");
  return *best;
}

void SweepPlan::validate() const {
  if (sr_values.empty() || scaling_values.empty()) throw InvalidArgument("sweep plan: empty grid");
  for (double v : sr_values)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("sweep plan: spectral radii must be positive");
  for (double v : scaling_values)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("sweep plan: input scalings must be positive");
  if (n_seeds < 1) throw InvalidArgument("sweep plan: n_seeds must be at least 1");
  if (n_neurons < 1) throw InvalidArgument("sweep plan: n_neurons must be at least 1");
  check_lengths(train_len, test_len, washout);
}

std::pair<double, double> sr_search_range(Activation family) {
  switch (family) {
    case Activation::tanh:
      return {0.2, 3.0};
    case Activation::linear:
      return {0.2, 1.5};
    case Activation::spherical:
      return {0.2, 10.0};
  }
  throw InvalidArgument("sr_search_range: unknown family");
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw InvalidArgument("linspace: need at least one point");
  if (points == 1) return {lo};
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo + (hi - lo) * i / (points - 1));
  out.back() = hi;
  return out;
}

SweepPlan default_sweep_plan(Activation family, int points) {
  SweepPlan plan;
  const auto [lo, hi] = sr_search_range(family);
  plan.sr_values = linspace(lo, hi, points);
  plan.scaling_values = linspace(0.01, 2.0, points);
  return plan;
}

namespace {

struct TaskData {
  Matrix raw;     // u on [-1, 1], T x 1
  Matrix scaled;  // u / std(u), what the reservoir sees
};

TaskData tradeoff_inputs(Eigen::Index length, std::uint64_t seed) {
  TaskData d;
  const TimeSeries u = white_noise(length, seed);
  d.raw = u.values;
  d.scaled = normalize_unit_variance(u).values;
  return d;
}

Matrix sine_target(const Matrix& raw, double nu, Eigen::Index first, Eigen::Index rows) {
  return raw.middleRows(first, rows).array().unaryExpr([nu](double v) { return std::sin(nu * v); }).matrix();
}

}  // namespace

TradeoffResult tradeoff_grid_experiment(Activation family, const std::vector<double>& nu_grid,
                                        const std::vector<int>& tau_grid, const SweepPlan& plan) {
  plan.validate();
  if (nu_grid.empty() || tau_grid.empty()) throw InvalidArgument("tradeoff: empty nu or tau grid");
  for (double nu : nu_grid)
    if (!std::isfinite(nu) || nu < 0.0) throw InvalidArgument("tradeoff: nu must be finite and non-negative");
  for (int tau : tau_grid)
    if (tau < 0) throw InvalidArgument("tradeoff: tau must be non-negative");

  const int tau_max = *std::max_element(tau_grid.begin(), tau_grid.end());
  const Eigen::Index skip = tau_max + plan.washout;
  const Eigen::Index length = skip + plan.train_len + plan.test_len;
  const auto n_nu = static_cast<Eigen::Index>(nu_grid.size());
  const auto n_tau = static_cast<Eigen::Index>(tau_grid.size());
  const std::size_t n_sr = plan.sr_values.size();
  const std::size_t n_sc = plan.scaling_values.size();
  const std::size_t n_cfg = n_sr * n_sc;
  const auto seeds = static_cast<std::size_t>(plan.n_seeds);

  // Unit reservoirs (rho = 1, scaling 1) per seed; each grid point rescales them.
  std::vector<Reservoir> base;
  std::vector<TaskData> inputs;
  for (std::size_t s = 0; s < seeds; ++s) {
    ReservoirConfig c;
    c.n_neurons = plan.n_neurons;
    c.activation = family;
    c.seed = derive_seed(plan.master_seed, {kReservoirStream, s});
    base.push_back(build_reservoir(c));
    inputs.push_back(tradeoff_inputs(length, derive_seed(plan.master_seed, {kSignalStream, s})));
  }

  // train/test NRMSE per (config, seed, cell), cell = nu_index * n_tau + tau_index.
  const auto cells = static_cast<std::size_t>(n_nu * n_tau);
  std::vector<double> train_err(n_cfg * seeds * cells, kNaN), test_err(n_cfg * seeds * cells, kNaN);
  auto slot = [&](std::size_t cfg, std::size_t s, std::size_t cell) { return (cfg * seeds + s) * cells + cell; };

  parallel_for(n_cfg * seeds, plan.threads, [&](std::size_t job) {
    const std::size_t cfg = job / seeds;
    const std::size_t s = job % seeds;
    const double sr = plan.sr_values[cfg / n_sc];
    const double scaling = plan.scaling_values[cfg % n_sc];
    ReservoirConfig c = base[s].config();
    c.spectral_radius = sr;
    c.input_scaling = scaling;
    const Reservoir reservoir(base[s].w() * sr, base[s].w_in() * scaling, c);
    Trajectory traj;
    try {
      traj = drive(reservoir, inputs[s].scaled, default_initial_state(c), skip);
    } catch (const Error&) {
      return;  // degenerate run: leave its cells NaN
    }
    const auto train_states = traj.states.middleRows(skip, plan.train_len);
    const auto test_states = traj.states.middleRows(skip + plan.train_len, plan.test_len);
    if (!traj.states.allFinite()) return;
    std::optional<RidgeSolver> solver;
    try {
      solver.emplace(train_states, plan.ridge_lambda);
    } catch (const Error&) {
      return;
    }
    for (Eigen::Index i = 0; i < n_nu; ++i) {
      for (Eigen::Index j = 0; j < n_tau; ++j) {
        const int tau = tau_grid[static_cast<std::size_t>(j)];
        const double nu = nu_grid[static_cast<std::size_t>(i)];
        const Matrix train_y = sine_target(inputs[s].raw, nu, skip - tau, plan.train_len);
        const Matrix test_y = sine_target(inputs[s].raw, nu, skip + plan.train_len - tau, plan.test_len);
        const std::size_t cell = static_cast<std::size_t>(i * n_tau + j);
        try {
          const ReadoutWeights w = solver->solve(train_y);
          train_err[slot(cfg, s, cell)] = nrmse(predict(w, train_states), train_y);
          test_err[slot(cfg, s, cell)] = nrmse(predict(w, test_states), test_y);
        } catch (const InvalidArgument&) {
          // constant target (nu = 0): no meaningful error, cell stays NaN
        }
      }
    }
  });

  TradeoffResult result;
  result.family = family;
  result.nu_grid = nu_grid;
  result.tau_grid = tau_grid;
  result.test_nrmse = Matrix::Constant(n_nu, n_tau, kNaN);
  result.train_nrmse = Matrix::Constant(n_nu, n_tau, kNaN);
  result.best_sr = Matrix::Constant(n_nu, n_tau, kNaN);
  result.best_input_scaling = Matrix::Constant(n_nu, n_tau, kNaN);
  result.contractivity_margin = Matrix::Constant(n_nu, n_tau, kNaN);
  result.flagged.assign(nu_grid.size(), std::vector<bool>(tau_grid.size(), false));

  auto mean_over_seeds = [&](const std::vector<double>& err, std::size_t cfg, std::size_t cell) {
    double sum = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) sum += err[slot(cfg, s, cell)];
    return sum / static_cast<double>(seeds);
  };

  std::map<std::size_t, double> margins;
  for (Eigen::Index i = 0; i < n_nu; ++i) {
    for (Eigen::Index j = 0; j < n_tau; ++j) {
      const std::size_t cell = static_cast<std::size_t>(i * n_tau + j);
      std::vector<GridRow> table;
      for (std::size_t cfg = 0; cfg < n_cfg; ++cfg)
        table.push_back({plan.sr_values[cfg / n_sc], plan.scaling_values[cfg % n_sc], mean_over_seeds(train_err, cfg, cell)});
      if (std::all_of(table.begin(), table.end(), [](const GridRow& r) { return std::isnan(r.train_nrmse); })) {
        result.flagged[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        continue;
      }
      const GridRow best = select_best_hyperparams(table);
      std::size_t chosen = 0;
      for (std::size_t cfg = 0; cfg < n_cfg; ++cfg)
        if (table[cfg].sr == best.sr && table[cfg].scaling == best.scaling) {
          chosen = cfg;
          break;
        }
      result.train_nrmse(i, j) = best.train_nrmse;
      result.test_nrmse(i, j) = mean_over_seeds(test_err, chosen, cell);
      result.best_sr(i, j) = best.sr;
      result.best_input_scaling(i, j) = best.scaling;
      if (!margins.count(chosen)) {
        ReservoirConfig c = base[0].config();
        c.spectral_radius = best.sr;
        c.input_scaling = best.scaling;
        const Reservoir r(base[0].w() * best.sr, base[0].w_in() * best.scaling, c);
        margins[chosen] = contractivity_margin(r, inputs[0].scaled.cwiseAbs().maxCoeff());
      }
      result.contractivity_margin(i, j) = margins[chosen];
    }
  }
  return result;
}

TaskScore evaluate_tradeoff_task(const ReservoirConfig& config, double nu, int tau, const SweepPlan& plan) {
  config.validate();
  check_lengths(plan.train_len, plan.test_len, plan.washout);
  if (tau < 0) throw InvalidArgument("evaluate_tradeoff_task: tau must be non-negative");
  if (plan.n_seeds < 1) throw InvalidArgument("evaluate_tradeoff_task: n_seeds must be at least 1");
  const Eigen::Index skip = tau + plan.washout;
  const Eigen::Index length = skip + plan.train_len + plan.test_len;

  TaskScore score;
  std::vector<double> nrmses(static_cast<std::size_t>(plan.n_seeds));
  parallel_for(nrmses.size(), plan.threads, [&](std::size_t s) {
    ReservoirConfig c = config;
    c.seed = derive_seed(plan.master_seed, {kReservoirStream, s});
    const Reservoir reservoir = build_reservoir(c);
    const TaskData data = tradeoff_inputs(length, derive_seed(plan.master_seed, {kSignalStream, s}));
    const Trajectory traj = drive(reservoir, data.scaled, default_initial_state(c), skip);
    const auto train_states = traj.states.middleRows(skip, plan.train_len);
    const auto test_states = traj.states.middleRows(skip + plan.train_len, plan.test_len);
    const ReadoutWeights w =
        fit_ridge(train_states, sine_target(data.raw, nu, skip - tau, plan.train_len), plan.ridge_lambda);
    nrmses[s] = nrmse(predict(w, test_states), sine_target(data.raw, nu, skip + plan.train_len - tau, plan.test_len));
  });
  for (double e : nrmses) score.test_acc.push_back(std::isnan(e) ? 0.0 : accuracy_gamma(e));
  std::tie(score.test_acc_mean, score.test_acc_std) = mean_std(score.test_acc);
  score.test_nrmse_mean = mean_std(nrmses).first;
  return score;
}

std::vector<LyapunovReport> lle_sweep_experiment(const std::vector<double>& sr_values,
                                                 const LleSweepOptions& options) {
  if (sr_values.empty()) throw InvalidArgument("lle sweep: no spectral radii");
  if (options.n_seeds < 1) throw InvalidArgument("lle sweep: n_seeds must be at least 1");
  const auto seeds = static_cast<std::size_t>(options.n_seeds);
  std::vector<LyapunovReport> reports(sr_values.size() * seeds);
  parallel_for(reports.size(), options.threads, [&](std::size_t job) {
    const std::size_t i = job / seeds;
    const std::size_t s = job % seeds;
    ReservoirConfig c;
    c.n_neurons = options.n_neurons;
    c.activation = options.family;
    c.spectral_radius = sr_values[i];
    c.seed = derive_seed(options.master_seed, {kLyapunovStream, i, s});
    try {
      const Reservoir reservoir = build_reservoir(c);
      if (options.with_spectrum) {
        reports[job] = lyapunov_report(reservoir, options.lyapunov);
      } else {
        LyapunovReport r;
        r.family = c.activation;
        r.spectral_radius = c.spectral_radius;
        r.max_lle = max_lle_paper(reservoir, options.lyapunov);
        r.n_steps = options.lyapunov.n_steps;
        r.n_neurons = c.n_neurons;
        r.seed = c.seed;
        reports[job] = r;
      }
    } catch (const Error&) {
      rethrow_tagged("sr=" + csv::format(sr_values[i]) + ", seed=" + std::to_string(s) + ": ");
    }
  });
  return reports;
}

std::vector<LleSummary> summarize_lle(const std::vector<LyapunovReport>& reports) {
  std::vector<LleSummary> out;
  std::vector<std::vector<double>> paper, qr;
  for (const auto& r : reports) {
    auto it = std::find_if(out.begin(), out.end(), [&](const LleSummary& s) { return s.sr == r.spectral_radius; });
    std::size_t k = static_cast<std::size_t>(it - out.begin());
    if (it == out.end()) {
      out.push_back({});
      out.back().sr = r.spectral_radius;
      paper.emplace_back();
      qr.emplace_back();
    }
    paper[k].push_back(r.max_lle);
    if (r.spectrum.size() > 0) qr[k].push_back(r.spectrum(0));
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].n = static_cast<int>(paper[k].size());
    std::tie(out[k].paper_mean, out[k].paper_std) = mean_std(paper[k]);
    if (!qr[k].empty())
      std::tie(out[k].qr_mean, out[k].qr_std) = mean_std(qr[k]);
    else
      out[k].qr_mean = out[k].qr_std = kNaN;
  }
  return out;
}

void write_delay_memory_csv(std::ostream& out, const std::vector<DelayMemoryResult>& results) {
  csv::write_row(out, "benchmark", "family", "tau", "split", "acc_mean", "acc_std", "n_runs");
  for (const auto& r : results) {
    for (std::size_t k = 0; k < r.taus.size(); ++k) {
      csv::write_row(out, to_string(r.benchmark), to_string(r.family), r.taus[k], "train", r.train_acc_mean[k],
                     r.train_acc_std[k], r.n_runs);
      csv::write_row(out, to_string(r.benchmark), to_string(r.family), r.taus[k], "test", r.test_acc_mean[k],
                     r.test_acc_std[k], r.n_runs);
    }
  }
}

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffResult>& results) {
  csv::write_row(out, "family", "nu", "tau", "test_nrmse", "best_sr", "best_scaling");
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.nu_grid.size(); ++i)
      for (std::size_t j = 0; j < r.tau_grid.size(); ++j) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        csv::write_row(out, to_string(r.family), r.nu_grid[i], r.tau_grid[j], r.test_nrmse(a, b), r.best_sr(a, b),
                       r.best_input_scaling(a, b));
      }
}

void write_lle_csv(std::ostream& out, const std::vector<LyapunovReport>& reports) {
  csv::write_row(out, "family", "sr", "seed", "max_lle", "method");
  for (const auto& r : reports) {
    csv::write_row(out, to_string(r.family), r.spectral_radius, r.seed, r.max_lle, "jacobian_radius");
    if (r.spectrum.size() > 0) csv::write_row(out, to_string(r.family), r.spectral_radius, r.seed, r.spectrum(0), "qr");
  }
}

}  // namespace sphesn
