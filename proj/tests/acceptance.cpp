// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.
#include "sphesn/dynamics.hpp"
#include "sphesn/experiments.hpp"
#include "sphesn/random.hpp"
#include "sphesn/readout.hpp"
#include "sphesn/reservoir.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef SPHESN_CLI_PATH
#error "SPHESN_CLI_PATH must name the command-line binary"
#endif

using namespace sphesn;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector gaussian(Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
  return v;
}

ReservoirConfig config_of(Activation family, int n, double sr, std::uint64_t seed) {
  ReservoirConfig c;
  c.activation = family;
  c.n_neurons = n;
  c.spectral_radius = sr;
  c.seed = seed;
  return c;
}

Verdict edge_of_criticality() {
  const auto t0 = std::chrono::steady_clock::now();
  LleSweepOptions o;
  o.n_neurons = 100;
  o.n_seeds = 10;
  o.lyapunov.n_steps = 5000;
  o.lyapunov.qr_exponents = 1;
  const std::vector<double> srs{0.2, 1.0, 5.0, 15.0, 50.0};
  const auto summary = summarize_lle(lle_sweep_experiment(srs, o));
  const double elapsed = seconds_since(t0);
  bool ok = true;
  std::string detail;
  for (const auto& s : summary) {
    ok = ok && std::abs(s.paper_mean) <= 0.02 && std::abs(s.qr_mean) <= 0.02;
    detail += "sr=" + fmt(s.sr) + " eq10=" + fmt(s.paper_mean, 3) + " qr=" + fmt(s.qr_mean, 3) + "; ";
  }
  detail += "runtime " + fmt(elapsed, 4) + " s (limit 120 s)";
  return {ok && elapsed <= 120.0, detail};
}

Verdict linear_control() {
  const Reservoir r = build_reservoir(config_of(Activation::linear, 100, 2.0, 1));
  const double lle = max_lle_paper(r);
  const double err = std::abs(lle - std::log(2.0));
  return {err <= 1e-6, "Lambda=" + fmt(lle, 12) + " |err|=" + fmt(err, 3)};
}

Verdict contractivity() {
  Rng rng(2024);
  double worst = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.bits() % 100);
    const double radius = rng.uniform(0.1, 5.0);
    Vector x = gaussian(rng, n), y = gaussian(rng, n);
    x *= radius * rng.uniform(1.0, 10.0) / x.norm();
    y *= radius * rng.uniform(1.0, 10.0) / y.norm();
    const double lhs = (activate(Activation::spherical, x, radius) - activate(Activation::spherical, y, radius)).norm();
    worst = std::max(worst, lhs - (x - y).norm());
  }
  return {worst <= 1e-12, "max(||phi(x)-phi(y)|| - ||x-y||) over 1000 pairs = " + fmt(worst, 3)};
}

Verdict closed_forms() {
  Rng rng(7);
  // Autonomous power form, n = 50, N = 100.
  const Reservoir r = build_reservoir(config_of(Activation::spherical, 100, 5.0, 11));
  const Vector x0 = gaussian(rng, 100).normalized();
  Vector iterated = x0;
  for (int k = 0; k < 50; ++k) iterated = activate(Activation::spherical, Vector(r.w() * iterated));
  const double power_err = (autonomous_power_form(r.w(), x0, 50) - iterated).cwiseAbs().maxCoeff();

  // Input-driven decomposition, T = 100, N = 50.
  ReservoirConfig c = config_of(Activation::spherical, 50, 3.0, 12);
  c.input_scaling = 0.5;
  const Reservoir rd = build_reservoir(c);
  Matrix inputs(100, 1);
  for (Eigen::Index k = 0; k < 100; ++k) inputs(k, 0) = rng.uniform(-1.0, 1.0);
  const Vector s0 = default_initial_state(c);
  const Trajectory t = drive(rd, inputs, s0);
  const double decomp_err = (state_decomposition(rd, inputs, s0) - t.states.row(99).transpose()).cwiseAbs().maxCoeff();

  // Autonomous dynamics under W and 7W.
  const Reservoir r1 = build_reservoir(config_of(Activation::spherical, 100, 1.0, 13));
  ReservoirConfig c7 = r1.config();
  c7.spectral_radius = 7.0;
  const Reservoir r7(7.0 * r1.w(), r1.w_in(), c7);
  const Matrix zeros = Matrix::Zero(200, 1);
  const Vector e1 = default_initial_state(r1.config());
  const double scale_err = (drive(r1, zeros, e1).states - drive(r7, zeros, e1).states).cwiseAbs().maxCoeff();

  return {power_err <= 1e-9 && decomp_err <= 1e-8 && scale_err <= 1e-12,
          "power form " + fmt(power_err, 3) + " (<=1e-9), decomposition " + fmt(decomp_err, 3) +
              " (<=1e-8), W vs 7W " + fmt(scale_err, 3) + " (<=1e-12)"};
}

Verdict jacobian_check() {
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.bits() % 49);
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) w(i, j) = rng.normal() / std::sqrt(static_cast<double>(n));
    const Vector x = gaussian(rng, n);
    const Vector u = gaussian(rng, n, 0.1);
    const double radius = rng.uniform(0.5, 2.0);
    auto map = [&](const Vector& v) { return activate(Activation::spherical, Vector(w * v + u), radius); };
    const double h = 1e-5;
    Matrix fd(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
      Vector xp = x, xm = x;
      xp(col) += h;
      xm(col) -= h;
      fd.col(col) = (map(xp) - map(xm)) / (2.0 * h);
    }
    worst = std::max(worst, (jacobian_spherical(w, Vector(w * x + u), radius) - fd).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, "max |J - J_fd| over 100 instances = " + fmt(worst, 3)};
}

Verdict memory_formulas() {
  Rng rng(12);
  bool monotone = true, loss_ok = true, gap_ok = true;
  double worst_limit = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const MemoryParams p{rng.uniform(1e-2, 1e2), rng.uniform(1e-2, 1.0), rng.uniform(0.0, 2.0)};
    for (Activation f : {Activation::spherical, Activation::linear, Activation::tanh}) {
      const MemoryCurve curve = make_memory_curve(f, p, 80);
      for (std::size_t i = 1; i < curve.values.size(); ++i) monotone = monotone && curve.values[i] <= curve.values[i - 1];
      const long k = static_cast<long>(rng.bits() % 20);
      const long n = k + 1 + static_cast<long>(rng.bits() % 20);
      const long m = n + 1 + static_cast<long>(rng.bits() % 20);
      loss_ok = loss_ok && memory_loss(f, p, k, m, n) <= 0.0;
      const long a = 1 + static_cast<long>(rng.bits() % 10), d = 1 + static_cast<long>(rng.bits() % 10);
      gap_ok = gap_ok && input_ordering_gap(f, p, a, d) >= 0.0;
    }
    const long a = 1 + static_cast<long>(rng.bits() % 10);
    const double limit = std::pow(p.alpha / (p.alpha + 1.0), static_cast<double>(a));
    const double far = input_ordering_gap(Activation::spherical, p, a, 1000000);
    worst_limit = std::max(worst_limit, std::abs(far - limit));
  }
  std::vector<double> losses;
  for (double eps : {1e-1, 1e-2, 1e-4, 1e-6, 1e-9})
    losses.push_back(std::abs(memory_loss(Activation::linear, {1.0, 1.0 - eps}, 0, 30, 10)));
  bool vanishing = losses.back() <= 1e-7;
  for (std::size_t i = 1; i < losses.size(); ++i) vanishing = vanishing && losses[i] < losses[i - 1];
  const bool ok = monotone && loss_ok && gap_ok && worst_limit <= 1e-12 && vanishing;
  return {ok, std::string("monotone=") + (monotone ? "yes" : "no") + " loss<=0=" + (loss_ok ? "yes" : "no") +
                  " gap>=0=" + (gap_ok ? "yes" : "no") + " delta-limit err=" + fmt(worst_limit, 3) +
                  " linear loss at rho=1-1e-9: " + fmt(losses.back(), 3)};
}

Verdict white_noise_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  const DelayMemoryOptions o = DelayMemoryOptions::desk_scale();
  auto gamma = [&](Activation f, int tau) {
    const auto r = delay_memory_experiment(Benchmark::white_noise, memory_task_config(f, 200), o);
    return r.test_acc_mean.at(static_cast<std::size_t>(tau));
  };
  const double sph = gamma(Activation::spherical, 60);
  const double lin = gamma(Activation::linear, 60);
  const double tnh = gamma(Activation::tanh, 50);
  const double elapsed = seconds_since(t0);
  const bool ok = sph >= 0.6 && lin >= 0.6 && tnh <= 0.1 && std::abs(sph - lin) <= 0.15 && elapsed <= 300.0;
  return {ok, "gamma spherical(60)=" + fmt(sph, 3) + " linear(60)=" + fmt(lin, 3) + " tanh(50)=" + fmt(tnh, 3) +
                  " |diff|=" + fmt(std::abs(sph - lin), 3) + "; runtime " + fmt(elapsed, 4) + " s (limit 300 s)"};
}

Verdict mso_maximum() {
  const DelayMemoryOptions o = DelayMemoryOptions::desk_scale();
  bool ok = true;
  std::string detail;
  for (Activation f : {Activation::tanh, Activation::spherical}) {
    const auto r = delay_memory_experiment(Benchmark::mso, memory_task_config(f, 200), o);
    const auto& g = r.test_acc_mean;
    const auto first = g.begin() + 40, last = g.begin() + 81;
    const auto peak = std::max_element(first, last);
    const int tau = static_cast<int>(peak - g.begin());
    const bool local = tau >= 50 && tau <= 70 && *peak > g[40] && *peak > g[80];
    ok = ok && local;
    detail += std::string(to_string(f)) + ": argmax over [40,80] at tau=" + std::to_string(tau) + " gamma=" +
              fmt(*peak, 3) + " (ends " + fmt(g[40], 3) + ", " + fmt(g[80], 3) + "); ";
  }
  return {ok, detail};
}

Verdict tradeoff_spot_check() {
  SweepPlan plan;
  plan.n_neurons = 200;
  plan.train_len = 500;
  plan.test_len = 200;
  plan.n_seeds = 5;
  double g[3];
  const Activation families[3] = {Activation::spherical, Activation::linear, Activation::tanh};
  for (int i = 0; i < 3; ++i)
    g[i] = evaluate_tradeoff_task(memory_task_config(families[i], 200), 2.5, 10, plan).test_acc_mean;
  const bool ok = g[0] > g[1] && g[1] > g[2] && g[2] <= 0.3 && g[0] >= 0.45;
  return {ok, "gamma at (nu=2.5, tau=10): spherical " + fmt(g[0], 3) + ", linear " + fmt(g[1], 3) + ", tanh " +
                  fmt(g[2], 3)};
}

Verdict accuracy_identities() {
  Rng rng(9);
  Matrix y(500, 1);
  for (Eigen::Index i = 0; i < 500; ++i) y(i, 0) = rng.normal();
  const double perfect = evaluate(y, y).accuracy;
  const double mean_pred = evaluate(Matrix::Constant(500, 1, y.mean()), y).accuracy;
  return {perfect == 1.0 && std::abs(mean_pred) <= 1e-12,
          "perfect gamma=" + fmt(perfect, 17) + " mean-predictor gamma=" + fmt(mean_pred, 3)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict cli_determinism() {
  const std::vector<std::string> commands{
      "generate --signal lorenz --length 500",
      "generate --signal mackey_glass --length 500",
      "simulate --family spherical --benchmark mso --n 20 --length 300",
      "lyapunov --family spherical --sr 1,15 --n 30 --steps 1500 --seeds 2",
      "memory --benchmark mso --n 40 --train 400 --test 200 --tau-max 20 --runs 2 --threads 2",
      "tradeoff --family tanh --n 30 --grid-points 2 --nu 1,2 --tau 0,2 --seeds 1 --train 200 --test 100",
  };
  const fs::path root = fs::temp_directory_path() / "sphesn_acceptance_cli";
  fs::remove_all(root);
  int files = 0;
  std::string mismatch;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    fs::path dirs[2];
    for (int rep = 0; rep < 2; ++rep) {
      dirs[rep] = root / (std::to_string(i) + "_" + std::to_string(rep));
      const std::string cmd = std::string("\"") + SPHESN_CLI_PATH + "\" " + commands[i] + " --seed 5 --output-dir \"" +
                              dirs[rep].string() + "\" > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + commands[i]};
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      if (slurp(entry.path()) != slurp(dirs[1] / entry.path().filename()))
        mismatch += commands[i] + " -> " + entry.path().filename().string() + "; ";
    }
  }
  fs::remove_all(root);
  if (!mismatch.empty()) return {false, "differing CSVs: " + mismatch};
  return {files > 0, std::to_string(commands.size()) + " commands, " + std::to_string(files) +
                         " CSV files byte-identical across repeated runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"edge-of-criticality", edge_of_criticality},
      {"linear-control", linear_control},
      {"contractivity", contractivity},
      {"closed-form-equivalences", closed_forms},
      {"jacobian-gradient-check", jacobian_check},
      {"memory-formulas", memory_formulas},
      {"white-noise-memory-ordering", white_noise_ordering},
      {"mso-local-maximum", mso_maximum},
      {"tradeoff-spot-check", tradeoff_spot_check},
      {"nrmse-gamma-identities", accuracy_identities},
      {"cli-determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
