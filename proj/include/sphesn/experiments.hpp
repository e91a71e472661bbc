#pragma once

#include "sphesn/dynamics.hpp"
#include "sphesn/readout.hpp"
#include "sphesn/reservoir.hpp"
#include "sphesn/signals.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sphesn {

enum class Benchmark { white_noise, mso, lorenz, mackey_glass, santa_fe };

std::string_view to_string(Benchmark b);
Benchmark parse_benchmark(std::string_view name);

/// Generator settings for the benchmarks that need them.
struct SignalOptions {
  LorenzOptions lorenz;
  MackeyGlassOptions mackey_glass;
  std::filesystem::path santa_fe_path;
  bool center = false;
};

/// Fixed per-family hyper-parameters of the delay-memory protocol: spherical
/// reservoirs use rho = 15 with input scaling 0.01, linear and tanh
/// reservoirs rho = 0.95 with input scaling 1.
ReservoirConfig memory_task_config(Activation family, int n_neurons);

struct DelayMemoryOptions {
  long train_len = 2000;
  long test_len = 800;
  long washout = 100;
  int tau_max = 100;
  int n_runs = 5;
  std::uint64_t master_seed = 1;
  double ridge_lambda = kDefaultRidgeLambda;
  int threads = 1;
  SignalOptions signal;

  static DelayMemoryOptions desk_scale() { return {}; }
  static DelayMemoryOptions paper_scale();
};

struct DelayMemoryResult {
  Benchmark benchmark = Benchmark::white_noise;
  Activation family = Activation::spherical;
  std::vector<int> taus;
  std::vector<double> train_acc_mean, train_acc_std, test_acc_mean, test_acc_std;
  int n_runs = 0;
  ReservoirConfig config;
  std::vector<std::uint64_t> reservoir_seeds;
  std::vector<std::string> dataset_digests;
};

/// Input series for one run of the delay-memory protocol, already normalized.
TimeSeries benchmark_series(Benchmark benchmark, Eigen::Index length, std::uint64_t seed, const SignalOptions& options);

/// For every tau in 0..tau_max trains a readout on y_k = u_(k-tau) and scores
/// train and test accuracy, averaged over `n_runs` reservoir seeds. Each run
/// drives its reservoir once; all delays share those states. The `seed` field
/// of `config` is ignored in favour of seeds derived from the master seed.
DelayMemoryResult delay_memory_experiment(Benchmark benchmark, const ReservoirConfig& config,
                                          const DelayMemoryOptions& options);

/// Per-run train/test accuracy curves for one run; the building block of
/// delay_memory_experiment, exposed for the shared-state invariant tests.
struct DelayRun {
  std::vector<double> train_acc, test_acc;
  std::string dataset_digest;
};
DelayRun delay_memory_run(Benchmark benchmark, const ReservoirConfig& config, const DelayMemoryOptions& options,
                          int run);

struct GridRow {
  double sr = 0.0;
  double scaling = 0.0;
  double train_nrmse = 0.0;
};

/// argmin of train_nrmse ignoring NaN rows; ties go to the smaller spectral
/// radius, then the smaller scaling. Throws on an empty (or all-NaN) table.
GridRow select_best_hyperparams(const std::vector<GridRow>& grid_results);

struct SweepPlan {
  std::vector<double> sr_values;
  std::vector<double> scaling_values;
  int n_seeds = 1;
  long train_len = 500;
  long test_len = 200;
  long washout = 100;
  int n_neurons = 200;
  std::uint64_t master_seed = 1;
  double ridge_lambda = kDefaultRidgeLambda;
  int threads = 1;

  void validate() const;
};

/// Search range of the spectral radius for each family: [0.2, 3] tanh,
/// [0.2, 1.5] linear, [0.2, 10] spherical.
std::pair<double, double> sr_search_range(Activation family);

/// `points` equally spaced values in [lo, hi].
std::vector<double> linspace(double lo, double hi, int points);

/// Plan with `points` values of SR over the family's range and of input
/// scaling over [0.01, 2].
SweepPlan default_sweep_plan(Activation family, int points = 20);

struct TradeoffResult {
  Activation family = Activation::spherical;
  std::vector<double> nu_grid;
  std::vector<int> tau_grid;
  Matrix test_nrmse;            ///< |nu| x |tau|
  Matrix train_nrmse;           ///< of the selected configuration
  Matrix best_sr;
  Matrix best_input_scaling;
  Matrix contractivity_margin;  ///< of the selected configuration (first seed)
  std::vector<std::vector<bool>> flagged;  ///< cells where every configuration failed
};

/// Target y_k = sin(nu * u_(k-tau)) with u uniform on [-1, 1]; the network
/// sees u normalized to unit variance. For each cell the configuration with
/// the lowest mean training NRMSE over seeds is kept and its mean test NRMSE
/// reported.
TradeoffResult tradeoff_grid_experiment(Activation family, const std::vector<double>& nu_grid,
                                        const std::vector<int>& tau_grid, const SweepPlan& plan);

struct TaskScore {
  double test_acc_mean = 0.0;
  double test_acc_std = 0.0;
  double test_nrmse_mean = 0.0;
  std::vector<double> test_acc;
};

/// The same task at fixed hyper-parameters, over `plan.n_seeds` runs. Only the
/// lengths, seeds and ridge coefficient of `plan` are used.
TaskScore evaluate_tradeoff_task(const ReservoirConfig& config, double nu, int tau, const SweepPlan& plan);

struct LleSweepOptions {
  LyapunovOptions lyapunov;
  int n_neurons = 100;
  int n_seeds = 10;
  Activation family = Activation::spherical;
  std::uint64_t master_seed = 1;
  int threads = 1;
  bool with_spectrum = true;
};

/// One report per (SR, seed); the QR spectrum is skipped when
/// `with_spectrum` is false.
std::vector<LyapunovReport> lle_sweep_experiment(const std::vector<double>& sr_values, const LleSweepOptions& options);

struct LleSummary {
  double sr = 0.0;
  double paper_mean = 0.0, paper_std = 0.0;
  double qr_mean = 0.0, qr_std = 0.0;
  int n = 0;
};

std::vector<LleSummary> summarize_lle(const std::vector<LyapunovReport>& reports);

/// Sample mean and standard deviation (n - 1 denominator; 0 for one value).
std::pair<double, double> mean_std(const std::vector<double>& values);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be
/// written to per-index slots; the first exception by index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Hex SHA-256 of the raw sample bytes of a series.
std::string series_digest(const TimeSeries& series);

void write_delay_memory_csv(std::ostream& out, const std::vector<DelayMemoryResult>& results);
void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffResult>& results);
void write_lle_csv(std::ostream& out, const std::vector<LyapunovReport>& reports);

}  // namespace sphesn
