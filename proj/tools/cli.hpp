#pragma once

#include "sphesn/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphesn::cli {

/// Bad command line; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scale { desk, paper };

struct GenerateFlags {
  std::string signal = "white_noise";
  long length = 1000;
  bool normalize = false;
};

struct SimulateFlags {
  Activation family = Activation::spherical;
  std::string benchmark = "white_noise";
  int n = 200;
  std::optional<double> sr;
  std::optional<double> input_scaling;
  long length = 1000;
  long washout = 100;
  std::filesystem::path reservoir;  ///< load instead of drawing when set
  bool save_reservoir = false;
};

struct LyapunovFlags {
  Activation family = Activation::spherical;
  std::vector<double> sr{0.2, 1.0, 5.0, 15.0, 50.0};
  int n = 100;
  long steps = 5000;
  long transient = 500;
  int seeds = 10;
  JacobianForm jacobian = JacobianForm::elementwise;
  long stride = 1;
  long qr_exponents = 0;
  bool spectrum = true;
};

struct MemoryFlags {
  std::string benchmark = "white_noise";
  std::vector<Activation> families{Activation::spherical, Activation::linear, Activation::tanh};
  int tau_max = 100;
  int runs = 5;
  long train = 2000;
  long test = 800;
  long washout = 100;
  int n = 200;
  std::optional<double> sr;
  std::optional<double> input_scaling;
  double lambda = kDefaultRidgeLambda;
};

struct TradeoffFlags {
  std::vector<Activation> families{Activation::spherical, Activation::linear, Activation::tanh};
  std::optional<double> sr_min, sr_max;
  double scaling_min = 0.01;
  double scaling_max = 2.0;
  int grid_points = 10;
  std::vector<double> nu{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<int> tau{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  int seeds = 2;
  long train = 500;
  long test = 200;
  long washout = 100;
  int n = 100;
  double lambda = kDefaultRidgeLambda;
};

/// Signal generator settings shared by generate, simulate and memory.
struct SignalFlags {
  std::filesystem::path santa_fe;
  double mg_exponent = 1.0;
  double mg_dt = 0.1;
  int mg_sample_every = 10;
  double lorenz_dt = 0.01;
  int lorenz_subsample = 5;
};

struct CommandSpec {
  std::string subcommand;
  std::vector<std::string> argv;  ///< as given, without the program name
  Scale scale = Scale::desk;
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path output_dir;
  SignalFlags signal;
  GenerateFlags generate;
  SimulateFlags simulate;
  LyapunovFlags lyapunov;
  MemoryFlags memory;
  TradeoffFlags tradeoff;
};

/// Parses argv (without the program name), fills preset defaults for flags
/// that were not given and range-checks everything. Throws UsageError.
/// `help` is set, and nothing else is filled, when --help was requested.
CommandSpec parse_and_validate(const std::vector<std::string>& argv, std::string* help = nullptr);

/// Runs the command, writing CSV files and manifest.json to the output
/// directory. Returns 0; errors propagate as exceptions.
int execute(const CommandSpec& spec, std::ostream& log);

/// parse_and_validate + execute with exit codes 0 (ok), 1 (runtime error)
/// and 2 (usage error).
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace sphesn::cli
