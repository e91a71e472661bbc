#include "sphesn/signals.hpp"

#include "sphesn/csv.hpp"
#include "sphesn/random.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace sphesn {

namespace {

constexpr double kDivergenceBound = 1e6;

std::string describe(double v) { return csv::format(v); }

}  // namespace

TimeSeries white_noise(Eigen::Index length, std::uint64_t seed) {
  if (length < 1) throw InvalidArgument("white_noise: length must be positive");
  Rng rng(seed);
  TimeSeries out;
  out.values.resize(length, 1);
  for (Eigen::Index k = 0; k < length; ++k) out.values(k, 0) = rng.uniform(-1.0, 1.0);
  out.source = "white_noise(seed=" + std::to_string(seed) + ")";
  return out;
}

TimeSeries mso(Eigen::Index length) {
  if (length < 1) throw InvalidArgument("mso: length must be positive");
  TimeSeries out;
  out.values.resize(length, 1);
  for (Eigen::Index k = 0; k < length; ++k) {
    const double t = static_cast<double>(k);
    out.values(k, 0) = std::sin(0.2 * t) + std::sin(0.311 * t) + std::sin(0.42 * t);
  }
  out.source = "mso";
  return out;
}

std::array<double, 3> lorenz_field(const std::array<double, 3>& s, const LorenzOptions& o) {
  return {o.sigma * (s[1] - s[0]), s[0] * (o.rho - s[2]) - s[1], s[0] * s[1] - o.beta * s[2]};
}

TimeSeries lorenz_x(Eigen::Index length, const LorenzOptions& options) {
  if (length < 1) throw InvalidArgument("lorenz_x: length must be positive");
  if (!(options.dt > 0.0 && options.dt <= 0.02)) throw InvalidArgument("lorenz_x: dt must lie in (0, 0.02]");
  if (options.subsample < 1) throw InvalidArgument("lorenz_x: subsample must be positive");
  if (options.transient_steps < 1000) throw InvalidArgument("lorenz_x: discard at least 1000 transient steps");

  std::array<double, 3> s = options.initial;
  if (options.seed_perturbation) {
    Rng rng(*options.seed_perturbation);
    for (double& c : s) c += rng.uniform(-1e-3, 1e-3);
  }

  const double h = options.dt;
  auto advance = [&](long step_number) {
    auto shifted = [&](const std::array<double, 3>& k, double f) {
      return std::array<double, 3>{s[0] + f * k[0], s[1] + f * k[1], s[2] + f * k[2]};
    };
    const auto k1 = lorenz_field(s, options);
    const auto k2 = lorenz_field(shifted(k1, h / 2), options);
    const auto k3 = lorenz_field(shifted(k2, h / 2), options);
    const auto k4 = lorenz_field(shifted(k3, h), options);
    for (int i = 0; i < 3; ++i) {
      s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!(std::abs(s[i]) <= kDivergenceBound))
        throw NumericalError("lorenz_x: integration diverged at step " + std::to_string(step_number));
    }
  };

  long step_number = 0;
  for (; step_number < options.transient_steps; ++step_number) advance(step_number + 1);

  TimeSeries out;
  out.values.resize(length, 1);
  for (Eigen::Index k = 0; k < length; ++k) {
    if (k > 0)
      for (int i = 0; i < options.subsample; ++i) advance(++step_number);
    out.values(k, 0) = s[0];
  }
  out.dt = h * options.subsample;
  out.source = "lorenz_x(dt=" + describe(h) + ",subsample=" + std::to_string(options.subsample) +
               ",transient=" + std::to_string(options.transient_steps) +
               (options.seed_perturbation ? ",seed=" + std::to_string(*options.seed_perturbation) : "") + ")";
  return out;
}

TimeSeries mackey_glass(Eigen::Index length, const MackeyGlassOptions& o) {
  if (length < 1) throw InvalidArgument("mackey_glass: length must be positive");
  if (!(o.dt > 0.0) || o.sample_every < 1 || o.discard_steps < 0)
    throw InvalidArgument("mackey_glass: dt, sample_every and discard_steps must be positive");
  const double ratio = o.delay / o.dt;
  const long lag = std::lround(ratio);
  if (lag < 1 || std::abs(ratio - static_cast<double>(lag)) > 1e-9 * ratio)
    throw InvalidArgument("mackey_glass: dt must divide the delay");

  auto rhs = [&](double x, double delayed) {
    return -o.beta * x + o.alpha * delayed / (1.0 + std::pow(delayed, o.exponent));
  };

  const long total = o.discard_steps + static_cast<long>(length - 1) * o.sample_every;
  // Solution values and derivatives on the grid t_i = i dt, i >= 0. Times
  // before zero read the constant initial history.
  std::vector<double> x(static_cast<std::size_t>(total + 1));
  std::vector<double> f(static_cast<std::size_t>(total + 1));
  const double h = o.dt;
  auto value_at = [&](long i) { return i <= 0 ? o.initial_history : x[static_cast<std::size_t>(i)]; };
  auto delayed_midpoint = [&](long j) {
    if (j + 1 <= 0) return o.initial_history;
    const double x0 = x[static_cast<std::size_t>(j)];
    const double x1 = x[static_cast<std::size_t>(j + 1)];
    return 0.5 * (x0 + x1) + h * (f[static_cast<std::size_t>(j)] - f[static_cast<std::size_t>(j + 1)]) / 8.0;
  };

  x[0] = o.initial_history;
  f[0] = rhs(x[0], value_at(-lag));
  for (long i = 0; i < total; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    const double d0 = value_at(i - lag);
    const double dm = delayed_midpoint(i - lag);
    const double d1 = value_at(i - lag + 1);
    const double k1 = rhs(xi, d0);
    const double k2 = rhs(xi + h / 2 * k1, dm);
    const double k3 = rhs(xi + h / 2 * k2, dm);
    const double k4 = rhs(xi + h * k3, d1);
    const double next = xi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(std::abs(next) <= kDivergenceBound))
      throw NumericalError("mackey_glass: integration diverged at step " + std::to_string(i + 1));
    x[static_cast<std::size_t>(i + 1)] = next;
    f[static_cast<std::size_t>(i + 1)] = rhs(next, value_at(i + 1 - lag));
  }

  TimeSeries out;
  out.values.resize(length, 1);
  for (Eigen::Index k = 0; k < length; ++k)
    out.values(k, 0) = x[static_cast<std::size_t>(o.discard_steps + k * o.sample_every)];
  out.dt = h * o.sample_every;
  out.source = "mackey_glass(dt=" + describe(h) + ",sample_every=" + std::to_string(o.sample_every) +
               ",delay=" + describe(o.delay) + ",alpha=" + describe(o.alpha) + ",beta=" + describe(o.beta) +
               ",exponent=" + describe(o.exponent) + ",history=" + describe(o.initial_history) + ")";
  return out;
}

TimeSeries load_santa_fe(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_santa_fe: cannot open " + path.string());
  std::vector<double> samples;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
      throw InvalidArgument("load_santa_fe: " + path.string() + ":" + std::to_string(line_number) +
                            ": cannot parse '" + std::string(begin, end) + "'");
    samples.push_back(value);
  }
  if (samples.empty()) throw InvalidArgument("load_santa_fe: " + path.string() + " contains no samples");
  TimeSeries out;
  out.values = Eigen::Map<const Vector>(samples.data(), static_cast<Eigen::Index>(samples.size()));
  out.source = path.string();
  return out;
}

TimeSeries normalize_unit_variance(const TimeSeries& series, bool center) {
  if (series.length() < 2) throw InvalidArgument("normalize_unit_variance: need at least two samples");
  TimeSeries out = series;
  const double denom = static_cast<double>(series.length() - 1);
  for (Eigen::Index c = 0; c < series.channels(); ++c) {
    auto column = out.values.col(c);
    const double mean = column.mean();
    const double variance = (column.array() - mean).square().sum() / denom;
    if (!(variance > 0.0))
      throw InvalidArgument("normalize_unit_variance: channel " + std::to_string(c) + " has zero variance");
    if (center) column.array() -= mean;
    column /= std::sqrt(variance);
  }
  out.source = series.source + (center ? "|centered,unit-variance" : "|unit-variance");
  return out;
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  out << "index,value";
  for (Eigen::Index c = 1; c < series.channels(); ++c) out << ",value_" << c;
  out << '\n';
  for (Eigen::Index k = 0; k < series.length(); ++k) {
    out << csv::format(k);
    for (Eigen::Index c = 0; c < series.channels(); ++c) out << ',' << csv::format(series.values(k, c));
    out << '\n';
  }
}

}  // namespace sphesn
