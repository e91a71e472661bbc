#include "sphesn/experiments.hpp"
#include "sphesn/random.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace sphesn;

namespace {

DelayMemoryOptions small_memory_options() {
  DelayMemoryOptions o;
  o.train_len = 300;
  o.test_len = 150;
  o.washout = 50;
  o.tau_max = 6;
  o.n_runs = 3;
  o.master_seed = 17;
  return o;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("select_best_hyperparams") {
    CHECK(select_best_hyperparams({{2.0, 0.5, 0.3}}).sr == 2.0);
    const GridRow tie = select_best_hyperparams({{1.0, 0.1, 0.2}, {0.5, 0.9, 0.2}});
    CHECK(tie.sr == 0.5);
    const GridRow tie2 = select_best_hyperparams({{0.5, 0.9, 0.2}, {0.5, 0.1, 0.2}});
    CHECK(tie2.scaling == 0.1);
    CHECK_THROWS_AS(select_best_hyperparams({}), InvalidArgument);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(select_best_hyperparams({{1.0, 1.0, nan}}), NumericalError);
    CHECK(select_best_hyperparams({{1.0, 1.0, nan}, {3.0, 1.0, 5.0}}).sr == 3.0);
  }

  TEST_CASE("select_best_hyperparams agrees with an exhaustive scan") {
    Rng rng(5);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<GridRow> table;
      const int rows = 1 + static_cast<int>(rng.bits() % 40);
      for (int i = 0; i < rows; ++i) {
        // Coarse values so ties happen often.
        const double err = rng.canonical() < 0.1 ? nan : std::floor(rng.uniform(0.0, 5.0)) / 4.0;
        table.push_back({std::floor(rng.uniform(1.0, 5.0)) / 2.0, std::floor(rng.uniform(1.0, 5.0)) / 2.0, err});
      }
      // Oracle: smallest error, then smallest SR, then smallest scaling.
      int best = -1;
      for (int i = 0; i < rows; ++i) {
        const auto& r = table[static_cast<std::size_t>(i)];
        if (std::isnan(r.train_nrmse)) continue;
        if (best < 0) {
          best = i;
          continue;
        }
        const auto& b = table[static_cast<std::size_t>(best)];
        const bool better = r.train_nrmse < b.train_nrmse ||
                            (r.train_nrmse == b.train_nrmse &&
                             (r.sr < b.sr || (r.sr == b.sr && r.scaling < b.scaling)));
        if (better) best = i;
      }
      if (best < 0) {
        CHECK_THROWS(select_best_hyperparams(table));
        continue;
      }
      const GridRow got = select_best_hyperparams(table);
      const auto& want = table[static_cast<std::size_t>(best)];
      CHECK(got.sr == want.sr);
      CHECK(got.scaling == want.scaling);
      CHECK(got.train_nrmse == want.train_nrmse);
    }
  }

  TEST_CASE("grids and presets") {
    const auto g = linspace(0.2, 10.0, 20);
    CHECK(g.size() == 20);
    CHECK(g.front() == 0.2);
    CHECK(g.back() == 10.0);
    CHECK(linspace(1.0, 2.0, 1) == std::vector<double>{1.0});
    CHECK(sr_search_range(Activation::tanh) == std::pair{0.2, 3.0});
    CHECK(sr_search_range(Activation::linear) == std::pair{0.2, 1.5});
    CHECK(sr_search_range(Activation::spherical) == std::pair{0.2, 10.0});
    const SweepPlan p = default_sweep_plan(Activation::linear);
    CHECK(p.sr_values.size() == 20);
    CHECK(p.scaling_values.front() == 0.01);
    CHECK(p.scaling_values.back() == 2.0);
    CHECK(memory_task_config(Activation::spherical, 200).spectral_radius == 15.0);
    CHECK(memory_task_config(Activation::spherical, 200).input_scaling == 0.01);
    CHECK(memory_task_config(Activation::tanh, 200).spectral_radius == 0.95);
    const auto paper = DelayMemoryOptions::paper_scale();
    CHECK(paper.train_len == 5000);
    CHECK(paper.test_len == 2000);
    CHECK(paper.n_runs == 20);
    SweepPlan empty;
    CHECK_THROWS_AS(empty.validate(), InvalidArgument);
  }

  TEST_CASE("mean_std") {
    const auto [m, s] = mean_std({1.0, 2.0, 3.0, 4.0});
    CHECK(m == 2.5);
    CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
    CHECK(mean_std({7.0}).second == 0.0);
    CHECK_THROWS_AS(mean_std({}), InvalidArgument);
  }

  TEST_CASE("parallel_for") {
    for (int threads : {1, 3}) {
      std::vector<int> seen(50, 0);
      parallel_for(seen.size(), threads, [&](std::size_t i) { seen[i] += 1; });
      for (int v : seen) CHECK(v == 1);
    }
    CHECK_THROWS_WITH(parallel_for(10, 2,
                                   [](std::size_t i) {
                                     if (i >= 4) throw std::runtime_error("boom " + std::to_string(i));
                                   }),
                      doctest::Contains("boom"));
  }

  TEST_CASE("shared drive equals a fresh drive per delay") {
    const DelayMemoryOptions o = small_memory_options();
    for (Activation family : {Activation::spherical, Activation::tanh}) {
      const ReservoirConfig config = memory_task_config(family, 30);
      const DelayRun shared = delay_memory_run(Benchmark::white_noise, config, o, 1);
      for (int tau = 0; tau <= o.tau_max; ++tau) {
        ReservoirConfig c = config;
        c.seed = derive_seed(o.master_seed, {1, 1});
        const Reservoir r = build_reservoir(c);
        const Eigen::Index skip = o.tau_max + o.washout;
        const TimeSeries u = benchmark_series(Benchmark::white_noise, skip + o.train_len + o.test_len,
                                              derive_seed(o.master_seed, {2, 1}), {});
        const Trajectory t = drive(r, u.values, default_initial_state(c), skip);
        const Matrix xtr = t.states.middleRows(skip, o.train_len);
        const Matrix xte = t.states.middleRows(skip + o.train_len, o.test_len);
        const Matrix ytr = u.values.middleRows(skip - tau, o.train_len);
        const Matrix yte = u.values.middleRows(skip + o.train_len - tau, o.test_len);
        const ReadoutWeights w = fit_ridge(xtr, ytr, o.ridge_lambda);
        CHECK(shared.train_acc[static_cast<std::size_t>(tau)] == evaluate(predict(w, xtr), ytr).accuracy);
        CHECK(shared.test_acc[static_cast<std::size_t>(tau)] == evaluate(predict(w, xte), yte).accuracy);
      }
    }
  }

  TEST_CASE("delay memory aggregates are reproducible") {
    DelayMemoryOptions o = small_memory_options();
    const ReservoirConfig config = memory_task_config(Activation::linear, 25);
    const DelayMemoryResult a = delay_memory_experiment(Benchmark::mso, config, o);
    o.threads = 3;
    const DelayMemoryResult b = delay_memory_experiment(Benchmark::mso, config, o);
    CHECK(a.test_acc_mean == b.test_acc_mean);
    CHECK(a.train_acc_std == b.train_acc_std);
    CHECK(a.dataset_digests == b.dataset_digests);
    CHECK(a.taus.size() == 7);
    CHECK(a.n_runs == 3);
    CHECK(a.reservoir_seeds.size() == 3);
    for (std::size_t k = 0; k < a.taus.size(); ++k) {
      CHECK(a.test_acc_std[k] >= 0.0);
      CHECK(a.train_acc_std[k] >= 0.0);
    }

    std::ostringstream out;
    write_delay_memory_csv(out, {a});
    const std::string text = out.str();
    CHECK(text.rfind("benchmark,family,tau,split,acc_mean,acc_std,n_runs\nmso,linear,0,train,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 7);
  }

  TEST_CASE("short data sets are rejected") {
    const auto path = std::filesystem::temp_directory_path() / "sphesn_short_sf.txt";
    {
      std::ofstream f(path);
      for (int i = 0; i < 100; ++i) f << (i % 7) << '\n';
    }
    DelayMemoryOptions o = small_memory_options();
    o.signal.santa_fe_path = path;
    CHECK_THROWS_AS(delay_memory_experiment(Benchmark::santa_fe, memory_task_config(Activation::tanh, 20), o),
                    InvalidArgument);
    std::filesystem::remove(path);
  }

  TEST_CASE("white-noise memory: spherical keeps tau = 0, tanh forgets tau = 50") {
    DelayMemoryOptions o;
    o.train_len = 1000;
    o.test_len = 400;
    o.tau_max = 50;
    o.n_runs = 2;
    const auto sph = delay_memory_experiment(Benchmark::white_noise, memory_task_config(Activation::spherical, 100), o);
    const auto tnh = delay_memory_experiment(Benchmark::white_noise, memory_task_config(Activation::tanh, 100), o);
    CHECK(sph.test_acc_mean.front() >= 0.9);
    CHECK(tnh.test_acc_mean.back() <= 0.1);
  }

  TEST_CASE("trade-off grid: linearized target and bookkeeping") {
    SweepPlan plan;
    plan.sr_values = linspace(0.2, 1.5, 4);
    plan.scaling_values = linspace(0.01, 2.0, 4);
    plan.n_neurons = 60;
    plan.train_len = 400;
    plan.test_len = 200;
    plan.n_seeds = 2;
    const TradeoffResult r = tradeoff_grid_experiment(Activation::linear, {0.0, 0.01}, {0, 2}, plan);
    CHECK(r.test_nrmse.rows() == 2);
    CHECK(r.test_nrmse.cols() == 2);
    // nu = 0 has a constant target: every configuration is undefined.
    CHECK(r.flagged[0][0]);
    CHECK(r.flagged[0][1]);
    CHECK(std::isnan(r.test_nrmse(0, 0)));
    // nu -> 0+: sin(nu u) ~ nu u, which a linear reservoir reproduces.
    for (Eigen::Index j = 0; j < 2; ++j) {
      CHECK_FALSE(r.flagged[1][static_cast<std::size_t>(j)]);
      CHECK(r.test_nrmse(1, j) <= 0.2);
      CHECK(r.best_sr(1, j) >= 0.2);
      CHECK(r.best_sr(1, j) <= 1.5);
      CHECK(std::isfinite(r.contractivity_margin(1, j)));
    }

    std::ostringstream out;
    write_tradeoff_csv(out, {r});
    CHECK(out.str().rfind("family,nu,tau,test_nrmse,best_sr,best_scaling\nlinear,0,0,nan,nan,nan\n", 0) == 0);
  }

  TEST_CASE("trade-off grid selection matches a brute-force rerun") {
    SweepPlan plan;
    plan.sr_values = {0.5, 3.0};
    plan.scaling_values = {0.1, 1.0};
    plan.n_neurons = 40;
    plan.train_len = 300;
    plan.test_len = 100;
    const TradeoffResult r = tradeoff_grid_experiment(Activation::tanh, {1.0}, {0}, plan);
    // tanh, tau = 0: the task is nearly memoryless and well solved.
    CHECK(r.test_nrmse(0, 0) <= 0.2);
    CHECK(r.train_nrmse(0, 0) <= r.test_nrmse(0, 0) + 0.1);
  }

  TEST_CASE("fixed-hyper-parameter task score") {
    SweepPlan plan;
    plan.n_seeds = 2;
    plan.n_neurons = 50;
    ReservoirConfig c = memory_task_config(Activation::linear, 50);
    const TaskScore s = evaluate_tradeoff_task(c, 0.01, 1, plan);
    CHECK(s.test_acc.size() == 2);
    CHECK(s.test_acc_mean >= 0.8);
    CHECK(s.test_acc_mean == doctest::Approx(1.0 - s.test_nrmse_mean).epsilon(1e-12));
  }

  TEST_CASE("Lyapunov sweep") {
    LleSweepOptions o;
    o.n_neurons = 30;
    o.n_seeds = 1;
    o.lyapunov.n_steps = 1200;
    o.lyapunov.transient = 200;
    const auto one = lle_sweep_experiment({2.0}, o);
    REQUIRE(one.size() == 1);
    ReservoirConfig c;
    c.n_neurons = 30;
    c.spectral_radius = 2.0;
    c.seed = derive_seed(o.master_seed, {3, 0, 0});
    CHECK(one[0].max_lle == max_lle_paper(build_reservoir(c), o.lyapunov));
    CHECK(one[0].seed == c.seed);

    o.family = Activation::linear;
    o.n_seeds = 2;
    o.with_spectrum = false;
    const auto lin = lle_sweep_experiment({2.0, 0.5}, o);
    REQUIRE(lin.size() == 4);
    CHECK(lin[0].max_lle == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(lin[3].max_lle == doctest::Approx(std::log(0.5)).epsilon(1e-6));
    const auto summary = summarize_lle(lin);
    REQUIRE(summary.size() == 2);
    CHECK(summary[1].sr == 0.5);
    CHECK(summary[1].n == 2);
    CHECK(std::isnan(summary[1].qr_mean));

    std::ostringstream out;
    write_lle_csv(out, one);
    const std::string text = out.str();
    CHECK(text.rfind("family,sr,seed,max_lle,method\n", 0) == 0);
    CHECK(text.find(",jacobian_radius\n") != std::string::npos);
    CHECK(text.find(",qr\n") != std::string::npos);

    o.lyapunov.n_steps = 10;
    CHECK_THROWS_WITH_AS(lle_sweep_experiment({2.0}, o), doctest::Contains("sr=2, seed=0"), InvalidArgument);
  }

  TEST_CASE("series digest") {
    TimeSeries a = white_noise(10, 1), b = white_noise(10, 1);
    CHECK(series_digest(a) == series_digest(b));
    CHECK(series_digest(a).size() == 64);
    b.values(3, 0) += 1e-16;
    CHECK(series_digest(a) != series_digest(b));
  }
}
