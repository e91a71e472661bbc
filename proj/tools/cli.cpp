#include "cli.hpp"

#include "sphesn/csv.hpp"
#include "sphesn/digest.hpp"
#include "sphesn/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace sphesn::cli {

using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kFamilies{"spherical", "tanh", "linear"};
const std::vector<std::string> kSignals{"white_noise", "mso", "lorenz", "mackey_glass", "santa_fe"};

std::vector<Activation> parse_families(const std::string& name) {
  if (name == "all") return {Activation::spherical, Activation::linear, Activation::tanh};
  return {parse_activation(name)};
}

// Flags every subcommand accepts.
struct Common {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir;
  bool desk = false;
  bool paper = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  app->add_option("--output-dir", c.output_dir, "Output directory (default: $ESN_OUTPUT_DIR, else ./results)");
  auto* desk = app->add_flag("--desk-scale", c.desk, "Desk-scale preset (default)");
  auto* paper = app->add_flag("--paper-scale", c.paper, "Paper-scale preset");
  desk->excludes(paper);
}

void add_signal_flags(CLI::App* app, SignalFlags& s) {
  app->add_option("--santa-fe", s.santa_fe, "Santa Fe laser data file, one sample per line");
  app->add_option("--mg-exponent", s.mg_exponent, "Mackey-Glass denominator exponent")
      ->check(CLI::Range(0.0, 100.0))
      ->capture_default_str();
  app->add_option("--mg-dt", s.mg_dt, "Mackey-Glass integration step")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--mg-sample-every", s.mg_sample_every, "Mackey-Glass steps per sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--lorenz-dt", s.lorenz_dt, "Lorenz integration step")->check(CLI::Range(1e-6, 0.02))->capture_default_str();
  app->add_option("--lorenz-subsample", s.lorenz_subsample, "Lorenz steps per sample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

bool given(const CLI::Option* o) { return o->count() > 0; }

SignalOptions signal_options(const SignalFlags& f) {
  SignalOptions o;
  o.santa_fe_path = f.santa_fe;
  o.mackey_glass.exponent = f.mg_exponent;
  o.mackey_glass.dt = f.mg_dt;
  o.mackey_glass.sample_every = f.mg_sample_every;
  o.lorenz.dt = f.lorenz_dt;
  o.lorenz.subsample = f.lorenz_subsample;
  return o;
}

ordered_json signal_json(const SignalFlags& f) {
  return {{"santa_fe", f.santa_fe.string()},     {"mg_exponent", f.mg_exponent},
          {"mg_dt", f.mg_dt},                    {"mg_sample_every", f.mg_sample_every},
          {"lorenz_dt", f.lorenz_dt},            {"lorenz_subsample", f.lorenz_subsample}};
}

ordered_json config_json(const ReservoirConfig& c) {
  return {{"n_neurons", c.n_neurons},
          {"n_inputs", c.n_inputs},
          {"spectral_radius", c.spectral_radius},
          {"input_scaling", c.input_scaling},
          {"activation", std::string(to_string(c.activation))},
          {"sphere_radius", c.sphere_radius},
          {"density", c.density},
          {"seed", c.seed}};
}

// Hex strings keep 64-bit seeds exact for JSON readers that use doubles.
std::string seed_hex(std::uint64_t s) {
  std::ostringstream out;
  out << std::hex << s;
  return out.str();
}

std::vector<std::string> family_names(const std::vector<Activation>& families) {
  std::vector<std::string> out;
  for (auto f : families) out.emplace_back(to_string(f));
  return out;
}

class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, std::ostream& log) : dir_(std::move(dir)), log_(log) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& contents) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << contents;
    out.close();
    if (!out) throw Error("write to " + path.string() + " failed");
    files_.push_back({{"file", name},
                      {"sha256", sha256_hex(contents)},
                      {"rows", std::count(contents.begin(), contents.end(), '\n')}});
    log_ << "wrote " << path.string() << '\n';
  }

  void manifest(const std::string& name, ordered_json body) {
    body["outputs"] = files_;
    write(name, body.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::ostream& log_;
  ordered_json files_ = ordered_json::array();
};

ordered_json manifest_head(const CommandSpec& spec) {
  ordered_json m;
  m["tool"] = "sphesn";
  m["format_version"] = 1;
  m["subcommand"] = spec.subcommand;
  m["argv"] = spec.argv;
  m["scale"] = spec.scale == Scale::paper ? "paper" : "desk";
  m["seed"] = spec.seed;
  m["threads"] = spec.threads;
  return m;
}

template <typename Fn>
std::string to_csv(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

TimeSeries generate_signal(const std::string& name, long length, std::uint64_t seed, const SignalFlags& flags) {
  const SignalOptions o = signal_options(flags);
  if (name == "white_noise") return white_noise(length, seed);
  if (name == "mso") return mso(length);
  if (name == "lorenz") return lorenz_x(length, o.lorenz);
  if (name == "mackey_glass") return mackey_glass(length, o.mackey_glass);
  if (name == "santa_fe") {
    if (o.santa_fe_path.empty()) throw InvalidArgument("--signal santa_fe needs --santa-fe <file>");
    TimeSeries s = load_santa_fe(o.santa_fe_path);
    if (s.length() < length)
      throw InvalidArgument("santa_fe file has " + std::to_string(s.length()) + " samples, fewer than --length");
    s.values.conservativeResize(length, Eigen::NoChange);
    return s;
  }
  throw InvalidArgument("unknown signal '" + name + "'");
}

int run_generate(const CommandSpec& spec, std::ostream& log) {
  const auto& g = spec.generate;
  TimeSeries series = generate_signal(g.signal, g.length, derive_seed(spec.seed, {2, 0}), spec.signal);
  if (g.normalize) series = normalize_unit_variance(series);
  OutputWriter out(spec.output_dir, log);
  out.write(g.signal + ".csv", to_csv([&](std::ostream& s) { write_series_csv(s, series); }));
  auto m = manifest_head(spec);
  m["config"] = {{"signal", g.signal}, {"length", g.length}, {"normalize", g.normalize}, {"signal_options", signal_json(spec.signal)}};
  m["datasets"] = ordered_json::array({{{"source", series.source}, {"sha256", series_digest(series)}}});
  out.manifest(g.signal + ".manifest.json", std::move(m));
  return 0;
}

int run_simulate(const CommandSpec& spec, std::ostream& log) {
  const auto& f = spec.simulate;
  std::optional<Reservoir> reservoir;
  if (!f.reservoir.empty()) {
    reservoir = load_reservoir(f.reservoir);
  } else {
    ReservoirConfig c = memory_task_config(f.family, f.n);
    if (f.sr) c.spectral_radius = *f.sr;
    if (f.input_scaling) c.input_scaling = *f.input_scaling;
    c.seed = derive_seed(spec.seed, {1, 0});
    reservoir = build_reservoir(c);
  }
  const ReservoirConfig& c = reservoir->config();
  const Benchmark bench = parse_benchmark(f.benchmark);
  const TimeSeries series =
      benchmark_series(bench, f.length, derive_seed(spec.seed, {2, 0}), signal_options(spec.signal));
  const Trajectory traj = drive(*reservoir, series.values, default_initial_state(c), f.washout);

  OutputWriter out(spec.output_dir, log);
  out.write("states.csv", to_csv([&](std::ostream& s) {
              s << "step,input,norm_factor";
              for (Eigen::Index i = 0; i < traj.states.cols(); ++i) s << ",x_" << csv::format(i);
              s << '\n';
              for (Eigen::Index k = 0; k < traj.length(); ++k) {
                s << csv::format(k + 1) << ',' << csv::format(series.values(k, 0)) << ','
                  << csv::format(traj.norm_factors(k));
                for (Eigen::Index i = 0; i < traj.states.cols(); ++i) s << ',' << csv::format(traj.states(k, i));
                s << '\n';
              }
            }));
  if (f.save_reservoir) out.write("reservoir.json", reservoir_to_json(*reservoir));

  auto m = manifest_head(spec);
  m["config"] = {{"reservoir", config_json(c)},
                 {"reservoir_file", f.reservoir.string()},
                 {"benchmark", f.benchmark},
                 {"length", f.length},
                 {"washout", f.washout},
                 {"signal_options", signal_json(spec.signal)}};
  m["datasets"] = ordered_json::array({{{"source", series.source}, {"sha256", series_digest(series)}}});
  ordered_json diag;
  diag["contractivity_margin"] = contractivity_margin(*reservoir, series.values.rowwise().norm().maxCoeff());
  if (f.washout < traj.length()) {
    const DeltaEstimate d = estimate_delta(traj, c.spectral_radius);
    diag["delta_mean"] = d.mean;
    diag["delta_std"] = d.stddev;
  }
  m["diagnostics"] = diag;
  out.manifest("states.manifest.json", std::move(m));
  return 0;
}

int run_lyapunov(const CommandSpec& spec, std::ostream& log) {
  const auto& f = spec.lyapunov;
  LleSweepOptions o;
  o.lyapunov.n_steps = f.steps;
  o.lyapunov.transient = f.transient;
  o.lyapunov.radius_form = f.jacobian;
  o.lyapunov.radius_stride = f.stride;
  o.lyapunov.qr_exponents = f.qr_exponents;
  o.n_neurons = f.n;
  o.n_seeds = f.seeds;
  o.family = f.family;
  o.master_seed = spec.seed;
  o.threads = spec.threads;
  o.with_spectrum = f.spectrum;
  const auto reports = lle_sweep_experiment(f.sr, o);

  OutputWriter out(spec.output_dir, log);
  out.write("lyapunov.csv", to_csv([&](std::ostream& s) { write_lle_csv(s, reports); }));
  if (f.spectrum) out.write("lyapunov_spectrum.csv", to_csv([&](std::ostream& s) { write_lyapunov_csv(s, reports); }));

  auto m = manifest_head(spec);
  m["config"] = {{"family", std::string(to_string(f.family))},
                 {"sr", f.sr},
                 {"n_neurons", f.n},
                 {"steps", f.steps},
                 {"transient", f.transient},
                 {"seeds", f.seeds},
                 {"jacobian", f.jacobian == JacobianForm::exact ? "exact" : "elementwise"},
                 {"stride", f.stride},
                 {"qr_exponents", f.qr_exponents},
                 {"spectrum", f.spectrum}};
  ordered_json cells = ordered_json::array();
  for (const auto& r : reports) cells.push_back({{"sr", r.spectral_radius}, {"reservoir_seed", seed_hex(r.seed)}});
  m["reservoirs"] = cells;
  ordered_json summary = ordered_json::array();
  for (const auto& s : summarize_lle(reports)) {
    ordered_json row = {{"sr", s.sr}, {"n", s.n}, {"jacobian_radius_mean", s.paper_mean}, {"jacobian_radius_std", s.paper_std}};
    if (f.spectrum) {
      row["qr_mean"] = s.qr_mean;
      row["qr_std"] = s.qr_std;
    }
    summary.push_back(row);
    log << "sr " << csv::format(s.sr) << ": mean max LLE " << csv::format(s.paper_mean);
    if (f.spectrum) log << " (qr " << csv::format(s.qr_mean) << ")";
    log << '\n';
  }
  m["summary"] = summary;
  out.manifest("lyapunov.manifest.json", std::move(m));
  return 0;
}

ReservoirConfig memory_config(const MemoryFlags& f, Activation family) {
  ReservoirConfig c = memory_task_config(family, f.n);
  if (f.sr) c.spectral_radius = *f.sr;
  if (f.input_scaling) c.input_scaling = *f.input_scaling;
  return c;
}

int run_memory(const CommandSpec& spec, std::ostream& log) {
  const auto& f = spec.memory;
  const Benchmark bench = parse_benchmark(f.benchmark);
  DelayMemoryOptions o;
  o.train_len = f.train;
  o.test_len = f.test;
  o.washout = f.washout;
  o.tau_max = f.tau_max;
  o.n_runs = f.runs;
  o.master_seed = spec.seed;
  o.ridge_lambda = f.lambda;
  o.threads = spec.threads;
  o.signal = signal_options(spec.signal);

  std::vector<DelayMemoryResult> results;
  for (Activation family : f.families) {
    results.push_back(delay_memory_experiment(bench, memory_config(f, family), o));
    log << to_string(family) << ": test accuracy at tau 0 " << csv::format(results.back().test_acc_mean.front())
        << ", at tau " << f.tau_max << ' ' << csv::format(results.back().test_acc_mean.back()) << '\n';
  }

  // Closed-form curves. Spherical alpha = rho / delta with delta measured on a
  // white-noise drive of the first run's reservoir.
  std::vector<MemoryCurve> curves;
  ordered_json theory = ordered_json::array();
  for (Activation family : f.families) {
    ReservoirConfig c = memory_config(f, family);
    MemoryParams p;
    ordered_json entry = {{"family", std::string(to_string(family))}};
    if (family == Activation::spherical) {
      c.seed = derive_seed(spec.seed, {1, 0});
      const Reservoir r = build_reservoir(c);
      const TimeSeries u = normalize_unit_variance(white_noise(f.washout + f.train, derive_seed(spec.seed, {2, 0})));
      const DeltaEstimate d = estimate_delta(drive(r, u.values, default_initial_state(c), f.washout), c.spectral_radius);
      entry["delta_mean"] = d.mean;
      entry["delta_std"] = d.stddev;
      if (!(d.mean > 0.0)) {
        entry["skipped"] = "non-positive delta";
        theory.push_back(entry);
        continue;
      }
      p.alpha = c.spectral_radius / d.mean;
      p.rho = c.spectral_radius;
      entry["alpha"] = p.alpha;
    } else {
      if (c.spectral_radius > 1.0) {
        entry["skipped"] = "spectral radius above 1";
        theory.push_back(entry);
        continue;
      }
      p.rho = c.spectral_radius;
      p.input_magnitude = 1.0;
      entry["rho"] = p.rho;
    }
    curves.push_back(make_memory_curve(family, p, f.tau_max));
    theory.push_back(entry);
  }

  OutputWriter out(spec.output_dir, log);
  const std::string stem = "memory_" + f.benchmark;
  out.write(stem + ".csv", to_csv([&](std::ostream& s) { write_delay_memory_csv(s, results); }));
  out.write(stem + "_theory.csv", to_csv([&](std::ostream& s) { write_memory_curve_csv(s, curves); }));

  auto m = manifest_head(spec);
  m["config"] = {{"benchmark", f.benchmark},
                 {"families", family_names(f.families)},
                 {"tau_max", f.tau_max},
                 {"runs", f.runs},
                 {"train", f.train},
                 {"test", f.test},
                 {"washout", f.washout},
                 {"lambda", f.lambda},
                 {"signal_options", signal_json(spec.signal)}};
  ordered_json runs = ordered_json::array();
  for (const auto& r : results) {
    ordered_json seeds = ordered_json::array();
    for (auto s : r.reservoir_seeds) seeds.push_back(seed_hex(s));
    runs.push_back({{"family", std::string(to_string(r.family))},
                    {"reservoir", config_json(r.config)},
                    {"reservoir_seeds", seeds},
                    {"dataset_sha256", r.dataset_digests}});
  }
  m["runs"] = runs;
  m["theory"] = theory;
  out.manifest(stem + ".manifest.json", std::move(m));
  return 0;
}

int run_tradeoff(const CommandSpec& spec, std::ostream& log) {
  const auto& f = spec.tradeoff;
  std::vector<TradeoffResult> results;
  ordered_json plans = ordered_json::array();
  for (Activation family : f.families) {
    const auto [lo, hi] = sr_search_range(family);
    SweepPlan plan;
    plan.sr_values = linspace(f.sr_min.value_or(lo), f.sr_max.value_or(hi), f.grid_points);
    plan.scaling_values = linspace(f.scaling_min, f.scaling_max, f.grid_points);
    plan.n_seeds = f.seeds;
    plan.train_len = f.train;
    plan.test_len = f.test;
    plan.washout = f.washout;
    plan.n_neurons = f.n;
    plan.master_seed = spec.seed;
    plan.ridge_lambda = f.lambda;
    plan.threads = spec.threads;
    results.push_back(tradeoff_grid_experiment(family, f.nu, f.tau, plan));
    log << to_string(family) << ": grid done\n";

    const auto& r = results.back();
    ordered_json cells = ordered_json::array();
    for (std::size_t i = 0; i < f.nu.size(); ++i)
      for (std::size_t j = 0; j < f.tau.size(); ++j) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        cells.push_back({{"nu", f.nu[i]},
                         {"tau", f.tau[j]},
                         {"flagged", static_cast<bool>(r.flagged[i][j])},
                         {"train_nrmse", r.train_nrmse(a, b)},
                         {"contractivity_margin", r.contractivity_margin(a, b)}});
      }
    ordered_json seeds = ordered_json::array();
    for (int s = 0; s < f.seeds; ++s) seeds.push_back(seed_hex(derive_seed(spec.seed, {1, static_cast<std::uint64_t>(s)})));
    plans.push_back({{"family", std::string(to_string(family))},
                     {"sr_values", plan.sr_values},
                     {"scaling_values", plan.scaling_values},
                     {"reservoir_seeds", seeds},
                     {"cells", cells}});
  }

  OutputWriter out(spec.output_dir, log);
  out.write("tradeoff.csv", to_csv([&](std::ostream& s) { write_tradeoff_csv(s, results); }));
  auto m = manifest_head(spec);
  m["config"] = {{"families", family_names(f.families)},
                 {"nu", f.nu},
                 {"tau", f.tau},
                 {"grid_points", f.grid_points},
                 {"seeds", f.seeds},
                 {"train", f.train},
                 {"test", f.test},
                 {"washout", f.washout},
                 {"n_neurons", f.n},
                 {"lambda", f.lambda}};
  m["plans"] = plans;
  out.manifest("tradeoff.manifest.json", std::move(m));
  return 0;
}

}  // namespace

CommandSpec parse_and_validate(const std::vector<std::string>& argv, std::string* help) {
  if (argv.empty()) throw UsageError("missing subcommand (generate, simulate, lyapunov, memory, tradeoff)");

  CommandSpec spec;
  spec.argv = argv;
  Common common;

  CLI::App app{"Spherical echo state network experiments", "sphesn"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a benchmark signal as CSV");
  add_common(gen, common);
  add_signal_flags(gen, spec.signal);
  gen->add_option("--signal", spec.generate.signal, "Signal name")->check(CLI::IsMember(kSignals))->capture_default_str();
  gen->add_option("--length", spec.generate.length, "Number of samples")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_flag("--normalize", spec.generate.normalize, "Scale to unit sample variance");

  // simulate
  auto& sim_f = spec.simulate;
  std::string sim_family = "spherical";
  auto* sim = app.add_subcommand("simulate", "Drive one reservoir and write its states");
  add_common(sim, common);
  add_signal_flags(sim, spec.signal);
  sim->add_option("--family", sim_family, "Activation family")->check(CLI::IsMember(kFamilies))->capture_default_str();
  sim->add_option("--benchmark", sim_f.benchmark, "Input signal")->check(CLI::IsMember(kSignals))->capture_default_str();
  auto* sim_n = sim->add_option("--n", sim_f.n, "Reservoir size")->check(CLI::Range(1, 100000))->capture_default_str();
  sim->add_option("--sr", sim_f.sr, "Spectral radius (default: family memory-task value)")->check(CLI::PositiveNumber);
  sim->add_option("--input-scaling", sim_f.input_scaling, "Input scaling")->check(CLI::PositiveNumber);
  sim->add_option("--length", sim_f.length, "Input length")->check(CLI::Range(2L, 100000000L))->capture_default_str();
  sim->add_option("--washout", sim_f.washout, "Steps excluded from diagnostics")->check(CLI::NonNegativeNumber)->capture_default_str();
  auto* sim_res = sim->add_option("--reservoir", sim_f.reservoir, "Load the reservoir from a JSON file")->check(CLI::ExistingFile);
  sim->add_flag("--save-reservoir", sim_f.save_reservoir, "Also write reservoir.json");
  sim_res->excludes(sim_n);

  // lyapunov
  auto& ly = spec.lyapunov;
  std::string ly_family = "spherical", ly_jacobian = "elementwise";
  auto* lya = app.add_subcommand("lyapunov", "Maximum Lyapunov exponent sweep over spectral radii");
  add_common(lya, common);
  lya->add_option("--family", ly_family, "Activation family")->check(CLI::IsMember(kFamilies))->capture_default_str();
  lya->add_option("--sr", ly.sr, "Spectral radii (comma separated)")->delimiter(',')->check(CLI::PositiveNumber);
  auto* ly_n = lya->add_option("--n", ly.n, "Reservoir size")->check(CLI::Range(1, 100000))->capture_default_str();
  lya->add_option("--steps", ly.steps, "Autonomous steps")->check(CLI::Range(1000L, 100000000L))->capture_default_str();
  lya->add_option("--transient", ly.transient, "Discarded leading steps")->check(CLI::NonNegativeNumber)->capture_default_str();
  lya->add_option("--seeds", ly.seeds, "Reservoirs per spectral radius")->check(CLI::Range(1, 100000))->capture_default_str();
  lya->add_option("--jacobian", ly_jacobian, "Jacobian for the spectral-radius estimator")
      ->check(CLI::IsMember({"elementwise", "exact"}))
      ->capture_default_str();
  lya->add_option("--stride", ly.stride, "Evaluate the local spectral radius every k-th step")
      ->check(CLI::Range(1L, 1000000L))
      ->capture_default_str();
  auto* ly_qr = lya->add_option("--qr-exponents", ly.qr_exponents, "Leading exponents tracked by QR (0 = all)")
                    ->check(CLI::NonNegativeNumber)
                    ->capture_default_str();
  bool no_spectrum = false;
  lya->add_flag("--no-spectrum", no_spectrum, "Skip the QR method");

  // memory
  auto& me = spec.memory;
  std::string me_family = "all";
  auto* mem = app.add_subcommand("memory", "Delay-memory curves for tau = 0..tau-max");
  add_common(mem, common);
  add_signal_flags(mem, spec.signal);
  mem->add_option("--benchmark", me.benchmark, "Input signal")->check(CLI::IsMember(kSignals))->capture_default_str();
  mem->add_option("--family", me_family, "Activation family or 'all'")
      ->check(CLI::IsMember({"all", "spherical", "tanh", "linear"}))
      ->capture_default_str();
  mem->add_option("--tau-max", me.tau_max, "Largest delay")->check(CLI::Range(0, 100000))->capture_default_str();
  auto* me_runs = mem->add_option("--runs", me.runs, "Reservoir seeds")->check(CLI::Range(1, 100000))->capture_default_str();
  auto* me_train = mem->add_option("--train", me.train, "Training length")->check(CLI::Range(2L, 100000000L))->capture_default_str();
  auto* me_test = mem->add_option("--test", me.test, "Test length")->check(CLI::Range(2L, 100000000L))->capture_default_str();
  mem->add_option("--washout", me.washout, "Washout length")->check(CLI::NonNegativeNumber)->capture_default_str();
  auto* me_n = mem->add_option("--n", me.n, "Reservoir size")->check(CLI::Range(1, 100000))->capture_default_str();
  mem->add_option("--sr", me.sr, "Override the family spectral radius")->check(CLI::PositiveNumber);
  mem->add_option("--input-scaling", me.input_scaling, "Override the family input scaling")->check(CLI::PositiveNumber);
  mem->add_option("--lambda", me.lambda, "Ridge coefficient")->check(CLI::NonNegativeNumber)->capture_default_str();

  // tradeoff
  auto& tr = spec.tradeoff;
  std::string tr_family = "all";
  auto* tra = app.add_subcommand("tradeoff", "Memory/non-linearity grid y = sin(nu u[k - tau])");
  add_common(tra, common);
  tra->add_option("--family", tr_family, "Activation family or 'all'")
      ->check(CLI::IsMember({"all", "spherical", "tanh", "linear"}))
      ->capture_default_str();
  tra->add_option("--sr-min", tr.sr_min, "Smallest spectral radius (default: family range)")->check(CLI::PositiveNumber);
  tra->add_option("--sr-max", tr.sr_max, "Largest spectral radius (default: family range)")->check(CLI::PositiveNumber);
  tra->add_option("--scaling-min", tr.scaling_min, "Smallest input scaling")->check(CLI::PositiveNumber)->capture_default_str();
  tra->add_option("--scaling-max", tr.scaling_max, "Largest input scaling")->check(CLI::PositiveNumber)->capture_default_str();
  auto* tr_points = tra->add_option("--grid-points", tr.grid_points, "Values per hyper-parameter axis")
                        ->check(CLI::Range(1, 1000))
                        ->capture_default_str();
  tra->add_option("--nu", tr.nu, "Non-linearity values (comma separated)")->delimiter(',')->check(CLI::NonNegativeNumber);
  tra->add_option("--tau", tr.tau, "Delays (comma separated)")->delimiter(',')->check(CLI::Range(0, 100000));
  auto* tr_seeds = tra->add_option("--seeds", tr.seeds, "Reservoir seeds")->check(CLI::Range(1, 100000))->capture_default_str();
  tra->add_option("--train", tr.train, "Training length")->check(CLI::Range(2L, 100000000L))->capture_default_str();
  tra->add_option("--test", tr.test, "Test length")->check(CLI::Range(2L, 100000000L))->capture_default_str();
  tra->add_option("--washout", tr.washout, "Washout length")->check(CLI::NonNegativeNumber)->capture_default_str();
  auto* tr_n = tra->add_option("--n", tr.n, "Reservoir size")->check(CLI::Range(1, 100000))->capture_default_str();
  tra->add_option("--lambda", tr.lambda, "Ridge coefficient")->check(CLI::NonNegativeNumber)->capture_default_str();

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    if (help) {
      const CLI::App* active = &app;
      for (const auto* sub : app.get_subcommands()) active = sub;
      *help = active->help();
    }
    spec.subcommand.clear();
    return spec;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  spec.subcommand = app.get_subcommands().front()->get_name();
  spec.seed = common.seed;
  spec.threads = common.threads;
  spec.scale = common.paper ? Scale::paper : Scale::desk;
  if (!common.output_dir.empty()) {
    spec.output_dir = common.output_dir;
  } else if (const char* env = std::getenv("ESN_OUTPUT_DIR"); env && *env) {
    spec.output_dir = env;
  } else {
    spec.output_dir = "results";
  }
  const bool paper = spec.scale == Scale::paper;

  try {
    if (spec.subcommand == "simulate") {
      sim_f.family = parse_activation(sim_family);
    } else if (spec.subcommand == "lyapunov") {
      ly.family = parse_activation(ly_family);
      ly.jacobian = ly_jacobian == "exact" ? JacobianForm::exact : JacobianForm::elementwise;
      ly.spectrum = !no_spectrum;
      if (paper && !given(ly_n)) ly.n = 500;
      // QR over all 500 exponents is far beyond the desk budget; track the leading one.
      if (paper && !given(ly_qr)) ly.qr_exponents = 1;
      if (ly.transient >= ly.steps) throw UsageError("--transient must be smaller than --steps");
      if (ly.spectrum && ly.n > 500) throw UsageError("--n above 500 needs --no-spectrum");
      if (ly.sr.empty()) throw UsageError("--sr needs at least one value");
    } else if (spec.subcommand == "memory") {
      me.families = parse_families(me_family);
      if (paper) {
        if (!given(me_n)) me.n = 1000;
        if (!given(me_train)) me.train = 5000;
        if (!given(me_test)) me.test = 2000;
        if (!given(me_runs)) me.runs = 20;
      }
    } else if (spec.subcommand == "tradeoff") {
      tr.families = parse_families(tr_family);
      if (paper) {
        if (!given(tr_points)) tr.grid_points = 20;
        if (!given(tr_seeds)) tr.seeds = 5;
        if (!given(tr_n)) tr.n = 200;
      }
      for (Activation family : tr.families) {
        const auto [lo, hi] = sr_search_range(family);
        const double sr_min = tr.sr_min.value_or(lo);
        const double sr_max = tr.sr_max.value_or(hi);
        if (sr_max < sr_min)
          throw UsageError("--sr-max " + csv::format(sr_max) + " is below --sr-min " + csv::format(sr_min) + " for " +
                           std::string(to_string(family)));
      }
      if (tr.scaling_max < tr.scaling_min) throw UsageError("--scaling-max is below --scaling-min");
      if (tr.nu.empty() || tr.tau.empty()) throw UsageError("--nu and --tau need at least one value");
    }
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

int execute(const CommandSpec& spec, std::ostream& log) {
  if (spec.subcommand == "generate") return run_generate(spec, log);
  if (spec.subcommand == "simulate") return run_simulate(spec, log);
  if (spec.subcommand == "lyapunov") return run_lyapunov(spec, log);
  if (spec.subcommand == "memory") return run_memory(spec, log);
  if (spec.subcommand == "tradeoff") return run_tradeoff(spec, log);
  throw UsageError("unknown subcommand '" + spec.subcommand + "'");
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CommandSpec spec;
  try {
    std::string help;
    spec = parse_and_validate(argv, &help);
    if (spec.subcommand.empty()) {
      out << help;
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun 'sphesn --help' for the list of subcommands and flags\n";
    return 2;
  }
  try {
    return execute(spec, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sphesn::cli
