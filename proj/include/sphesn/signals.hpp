#pragma once

#include "sphesn/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace sphesn {

struct TimeSeries {
  Matrix values;             ///< T x d
  std::optional<double> dt;  ///< sampling step of ODE-derived series
  std::string source;        ///< generator name and parameters, or file path

  Eigen::Index length() const { return values.rows(); }
  Eigen::Index channels() const { return values.cols(); }
};

/// I.i.d. uniform samples on [-1, 1].
TimeSeries white_noise(Eigen::Index length, std::uint64_t seed);

/// u(k) = sin(0.2 k) + sin(0.311 k) + sin(0.42 k), k = 0..length-1.
TimeSeries mso(Eigen::Index length);

struct LorenzOptions {
  double dt = 0.01;
  int subsample = 5;
  long transient_steps = 1000;
  std::array<double, 3> initial{1.0, 1.0, 1.0};
  /// When set, each initial coordinate is shifted by a uniform draw in [-1e-3, 1e-3].
  std::optional<std::uint64_t> seed_perturbation;
  double sigma = 10.0;
  double beta = 8.0 / 3.0;
  double rho = 28.0;
};

/// x coordinate of the Lorenz system, integrated with fixed-step RK4.
TimeSeries lorenz_x(Eigen::Index length, const LorenzOptions& options = {});

/// Right-hand side of the Lorenz system; exposed for the fixed-point checks.
std::array<double, 3> lorenz_field(const std::array<double, 3>& s, const LorenzOptions& options = {});

struct MackeyGlassOptions {
  double dt = 0.1;
  int sample_every = 10;
  double delay = 17.0;
  double alpha = 0.2;
  double beta = 0.1;
  /// Power of x(t - delay) in the denominator; 1 reproduces the equation as
  /// usually printed without it, 10 gives the customary chaotic regime.
  double exponent = 1.0;
  double initial_history = 1.2;
  long discard_steps = 0;
};

/// Mackey-Glass delay equation integrated with fixed-step RK4. Delayed values
/// at half steps come from cubic Hermite interpolation of the stored history
/// (values and derivatives), which keeps the scheme fourth order.
TimeSeries mackey_glass(Eigen::Index length, const MackeyGlassOptions& options = {});

/// One numeric sample per non-blank line.
TimeSeries load_santa_fe(const std::filesystem::path& path);

/// Divides every channel by its sample standard deviation. The mean is left
/// alone unless `center` is set.
TimeSeries normalize_unit_variance(const TimeSeries& series, bool center = false);

/// Two-column CSV (index,value); further channels add value_1, value_2, ...
void write_series_csv(std::ostream& out, const TimeSeries& series);

}  // namespace sphesn
