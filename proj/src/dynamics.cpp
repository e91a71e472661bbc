#include "sphesn/dynamics.hpp"

#include "sphesn/csv.hpp"
#include "sphesn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace sphesn {

namespace {

constexpr long kMinLyapunovSteps = 1000;
constexpr Eigen::Index kMaxQrNeurons = 500;

void check_lyapunov_options(const LyapunovOptions& options) {
  if (options.n_steps < kMinLyapunovSteps)
    throw InvalidArgument("Lyapunov estimation needs at least " + std::to_string(kMinLyapunovSteps) + " steps");
  if (options.transient < 0 || options.transient >= options.n_steps)
    throw InvalidArgument("Lyapunov transient must lie in [0, n_steps)");
  if (options.radius_stride < 1) throw InvalidArgument("Lyapunov radius_stride must be at least 1");
  if (options.qr_exponents < 0) throw InvalidArgument("Lyapunov qr_exponents must be non-negative");
}

Vector initial_state(const Reservoir& reservoir, const std::optional<Vector>& x0) {
  if (!x0) return default_initial_state(reservoir.config());
  if (x0->size() != reservoir.size()) throw DimensionMismatch("Lyapunov: x0 size does not match reservoir");
  return *x0;
}

// True when the Jacobian at `a` equals the one at `previous` for this family.
bool same_jacobian(Activation family, const Vector& a, const Vector& previous) {
  if (previous.size() != a.size()) return false;
  switch (family) {
    case Activation::linear:
      return true;
    case Activation::tanh:
      return a == previous;
    case Activation::spherical:
      // Both spherical forms depend on a only through ||a|| and a a^T.
      return a == previous || a == -previous;
  }
  return false;
}

}  // namespace

Matrix family_jacobian(Activation family, const Eigen::Ref<const Matrix>& w, const Eigen::Ref<const Vector>& a,
                       double radius, JacobianForm form) {
  switch (family) {
    case Activation::spherical:
      return form == JacobianForm::exact ? jacobian_spherical(w, a, radius)
                                         : jacobian_spherical_elementwise(w, a, radius);
    case Activation::tanh: {
      const Vector slope = 1.0 - a.array().tanh().square();
      return slope.asDiagonal() * w;
    }
    case Activation::linear:
      return w;
  }
  throw InvalidArgument("family_jacobian: unknown family");
}

double max_lle_paper(const Reservoir& reservoir, const LyapunovOptions& options, std::optional<Vector> x0) {
  check_lyapunov_options(options);
  const auto& config = reservoir.config();
  const Matrix& w = reservoir.w();
  Vector x = initial_state(reservoir, x0);

  Vector previous_a;
  double previous_log_radius = 0.0;
  double sum = 0.0;
  long samples = 0;
  for (long k = 0; k < options.n_steps; ++k) {
    const Vector a = w * x;
    if (k >= options.transient && (k - options.transient) % options.radius_stride == 0) {
      if (!same_jacobian(config.activation, a, previous_a)) {
        const Matrix j = family_jacobian(config.activation, w, a, config.sphere_radius, options.radius_form);
        previous_log_radius = std::log(dense_spectral_radius(j));
        previous_a = a;
      }
      sum += previous_log_radius;
      ++samples;
    }
    try {
      x = activate(config.activation, a, config.sphere_radius);
    } catch (const DegenerateActivation& e) {
      throw DegenerateActivation("max_lle_paper: step " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return sum / static_cast<double>(samples);
}

Vector lyapunov_spectrum_qr(const Reservoir& reservoir, const LyapunovOptions& options, std::optional<Vector> x0) {
  check_lyapunov_options(options);
  if (reservoir.size() > kMaxQrNeurons) throw InvalidArgument("lyapunov_spectrum_qr: at most 500 neurons");
  const auto& config = reservoir.config();
  const Matrix& w = reservoir.w();
  const Eigen::Index n = reservoir.size();
  const Eigen::Index m = options.qr_exponents == 0 ? n : std::min(options.qr_exponents, n);
  const double floor = std::numeric_limits<double>::min();

  Vector x = initial_state(reservoir, x0);
  Matrix basis = Matrix::Identity(n, m);
  Matrix image(n, m);
  Vector sums = Vector::Zero(m);
  Eigen::HouseholderQR<Matrix> qr(n, m);

  for (long k = 0; k < options.n_steps; ++k) {
    const Vector a = w * x;
    image.noalias() = w * basis;
    switch (config.activation) {
      case Activation::spherical: {
        const double norm = a.norm();
        if (!(norm >= kDegenerateNorm))
          throw DegenerateActivation("lyapunov_spectrum_qr: step " + std::to_string(k + 1) + ": zero pre-activation");
        const Vector unit = a / norm;
        const Eigen::RowVectorXd projection = unit.transpose() * image;
        image.noalias() -= unit * projection;
        image *= config.sphere_radius / norm;
        break;
      }
      case Activation::tanh:
        image = (1.0 - a.array().tanh().square()).matrix().asDiagonal() * image;
        break;
      case Activation::linear:
        break;
    }
    qr.compute(image);
    const Vector diag = qr.matrixQR().diagonal();
    if (!diag.allFinite())
      throw NumericalError("lyapunov_spectrum_qr: QR breakdown at step " + std::to_string(k + 1));
    if (k >= options.transient)
      for (Eigen::Index i = 0; i < m; ++i) sums(i) += std::log(std::max(std::abs(diag(i)), floor));
    if (m == n)
      basis = qr.householderQ();
    else
      basis = qr.householderQ() * Matrix::Identity(n, m);
    x = activate(config.activation, a, config.sphere_radius);
  }

  Vector spectrum = sums / static_cast<double>(options.n_steps - options.transient);
  std::sort(spectrum.begin(), spectrum.end(), std::greater<>());
  return spectrum;
}

LyapunovReport lyapunov_report(const Reservoir& reservoir, const LyapunovOptions& options) {
  LyapunovReport report;
  report.family = reservoir.config().activation;
  report.spectral_radius = reservoir.config().spectral_radius;
  report.max_lle = max_lle_paper(reservoir, options);
  report.spectrum = lyapunov_spectrum_qr(reservoir, options);
  report.n_steps = options.n_steps;
  report.n_neurons = static_cast<int>(reservoir.size());
  report.seed = reservoir.config().seed;
  return report;
}

double theoretical_memory(Activation family, const MemoryParams& params, long lag) {
  if (lag < 0) throw InvalidArgument("theoretical_memory: lag must be non-negative");
  const double steps = static_cast<double>(lag);
  switch (family) {
    case Activation::spherical:
      if (!(params.alpha > 0.0)) throw InvalidArgument("spherical memory needs alpha > 0");
      return std::pow(params.alpha / (params.alpha + 1.0), steps);
    case Activation::linear:
      if (!(params.rho > 0.0 && params.rho <= 1.0)) throw InvalidArgument("linear memory needs 0 < rho <= 1");
      return std::pow(params.rho, steps);
    case Activation::tanh: {
      if (!(params.rho > 0.0 && params.rho <= 1.0)) throw InvalidArgument("tanh memory needs 0 < rho <= 1");
      if (!(params.input_magnitude >= 0.0)) throw InvalidArgument("tanh memory needs a non-negative magnitude");
      if (params.input_magnitude == 0.0) return std::pow(params.rho, steps);
      const double start = std::tanh(params.input_magnitude);
      double value = start;
      for (long i = 0; i < lag; ++i) value = std::tanh(params.rho * value);
      return value / start;
    }
  }
  throw InvalidArgument("theoretical_memory: unknown family");
}

double memory_loss(Activation family, const MemoryParams& params, long k, long m, long n) {
  if (!(m > n && n > k)) throw InvalidArgument("memory_loss: requires m > n > k");
  return theoretical_memory(family, params, m - k) - theoretical_memory(family, params, n - k);
}

double input_ordering_gap(Activation family, const MemoryParams& params, long a, long delta) {
  if (a < 1 || delta < 1) throw InvalidArgument("input_ordering_gap: requires a >= 1 and delta >= 1");
  return theoretical_memory(family, params, a) - theoretical_memory(family, params, a + delta);
}

DeltaEstimate estimate_delta(const Trajectory& trajectory, double spectral_radius) {
  const Eigen::Index count = trajectory.norm_factors.size() - trajectory.washout;
  if (count <= 0) throw InvalidArgument("estimate_delta: no post-washout steps");
  const Vector delta = trajectory.norm_factors.tail(count).array() - spectral_radius;
  DeltaEstimate out;
  out.count = count;
  out.mean = delta.mean();
  out.stddev = count > 1 ? std::sqrt((delta.array() - out.mean).square().sum() / static_cast<double>(count - 1)) : 0.0;
  return out;
}

MemoryCurve make_memory_curve(Activation family, const MemoryParams& params, long max_lag) {
  if (max_lag < 0) throw InvalidArgument("make_memory_curve: max_lag must be non-negative");
  MemoryCurve curve{family, params, {}, {}};
  for (long lag = 0; lag <= max_lag; ++lag) {
    curve.lags.push_back(lag);
    curve.values.push_back(theoretical_memory(family, params, lag));
  }
  return curve;
}

void write_lyapunov_csv(std::ostream& out, const std::vector<LyapunovReport>& reports) {
  csv::write_row(out, "family", "sr", "seed", "n", "steps", "lag_or_rank", "value");
  for (const auto& r : reports)
    for (Eigen::Index i = 0; i < r.spectrum.size(); ++i)
      csv::write_row(out, to_string(r.family), r.spectral_radius, r.seed, r.n_neurons, r.n_steps, i, r.spectrum(i));
}

void write_memory_curve_csv(std::ostream& out, const std::vector<MemoryCurve>& curves) {
  csv::write_row(out, "family", "sr", "seed", "n", "steps", "lag_or_rank", "value");
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.lags.size(); ++i)
      csv::write_row(out, to_string(c.family), c.params.rho, 0, 0, 0, c.lags[i], c.values[i]);
}

}  // namespace sphesn
