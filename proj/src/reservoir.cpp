#include "sphesn/reservoir.hpp"

#include "sphesn/linalg.hpp"
#include "sphesn/random.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sphesn {

namespace {

constexpr int kMaxRedraws = 10;
constexpr int kRescaleExponent = 400;
constexpr int kJsonVersion = 1;

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::spherical:
      return "spherical";
    case Activation::tanh:
      return "tanh";
    case Activation::linear:
      return "linear";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "spherical") return Activation::spherical;
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  throw InvalidArgument("unknown activation family '" + std::string(name) + "'");
}

void ReservoirConfig::validate() const {
  if (n_neurons < 2) throw InvalidArgument("n_neurons must be at least 2");
  if (n_inputs < 1) throw InvalidArgument("n_inputs must be positive");
  if (!(spectral_radius > 0.0) || !std::isfinite(spectral_radius))
    throw InvalidArgument("spectral_radius must be positive and finite");
  if (!(input_scaling >= 0.0) || !std::isfinite(input_scaling))
    throw InvalidArgument("input_scaling must be non-negative and finite");
  if (!(sphere_radius > 0.0) || !std::isfinite(sphere_radius))
    throw InvalidArgument("sphere_radius must be positive and finite");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must lie in (0, 1]");
}

Reservoir::Reservoir(Matrix w, Matrix w_in, ReservoirConfig config)
    : w_(std::move(w)), w_in_(std::move(w_in)), config_(config) {
  config_.validate();
  if (w_.rows() != config_.n_neurons || w_.cols() != config_.n_neurons)
    throw DimensionMismatch("reservoir: W must be n_neurons x n_neurons");
  if (w_in_.rows() != config_.n_neurons || w_in_.cols() != config_.n_inputs)
    throw DimensionMismatch("reservoir: W_in must be n_neurons x n_inputs");
}

Reservoir build_reservoir(const ReservoirConfig& config) {
  config.validate();
  const Eigen::Index n = config.n_neurons;
  Rng rng(config.seed);

  Matrix w(n, n);
  double radius = 0.0;
  int attempt = 0;
  for (; attempt < kMaxRedraws; ++attempt) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const bool keep = config.density >= 1.0 || rng.canonical() < config.density;
        w(i, j) = keep ? rng.normal() : 0.0;
      }
    }
    radius = spectral_radius_of(w);
    if (radius > 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff())) break;
  }
  if (attempt == kMaxRedraws)
    throw NumericalError("build_reservoir: drawn W is nilpotent after " + std::to_string(kMaxRedraws) + " attempts");
  w *= config.spectral_radius / radius;

  Matrix w_in(n, config.n_inputs);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < w_in.cols(); ++j) w_in(i, j) = rng.uniform(-1.0, 1.0) * config.input_scaling;

  return Reservoir(std::move(w), std::move(w_in), config);
}

Vector default_initial_state(const ReservoirConfig& config) {
  Vector x = Vector::Zero(config.n_neurons);
  if (config.activation == Activation::spherical) x(0) = config.sphere_radius;
  return x;
}

StepResult step(const Reservoir& reservoir, const NetworkState& state, const Eigen::Ref<const Vector>& input) {
  if (state.x.size() != reservoir.size()) throw DimensionMismatch("step: state size does not match reservoir");
  if (input.size() != reservoir.n_inputs()) throw DimensionMismatch("step: input size does not match reservoir");
  const Vector a = reservoir.w() * state.x + reservoir.w_in() * input;
  const auto& config = reservoir.config();
  StepResult out;
  out.norm_factor = a.norm();
  out.state.x = activate(config.activation, a, config.sphere_radius);
  out.state.step_index = state.step_index + 1;
  return out;
}

Trajectory drive(const Reservoir& reservoir, const Eigen::Ref<const Matrix>& inputs,
                 const Eigen::Ref<const Vector>& x0, Eigen::Index washout) {
  const Eigen::Index length = inputs.rows();
  if (inputs.cols() != reservoir.n_inputs()) throw DimensionMismatch("drive: input width does not match reservoir");
  if (x0.size() != reservoir.size()) throw DimensionMismatch("drive: x0 size does not match reservoir");
  if (washout < 0 || length <= washout) throw InvalidArgument("drive: need more input rows than washout steps");
  if (!x0.allFinite()) throw InvalidArgument("drive: x0 is not finite");

  Trajectory traj;
  traj.states.resize(length, reservoir.size());
  traj.norm_factors.resize(length);
  traj.washout = washout;

  NetworkState state{x0, 0};
  for (Eigen::Index k = 0; k < length; ++k) {
    try {
      StepResult next = step(reservoir, state, inputs.row(k).transpose());
      traj.states.row(k) = next.state.x.transpose();
      traj.norm_factors(k) = next.norm_factor;
      state = std::move(next.state);
    } catch (const DegenerateActivation& e) {
      throw DegenerateActivation("drive: step " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return traj;
}

double contractivity_margin(const Reservoir& reservoir, double max_input_norm) {
  if (!(max_input_norm >= 0.0)) throw InvalidArgument("contractivity_margin: max_input_norm must be non-negative");
  return min_singular_value(reservoir.w()) - 1.0 -
         operator_norm(reservoir.w_in()) * max_input_norm / reservoir.config().sphere_radius;
}

Vector autonomous_power_form(const Eigen::Ref<const Matrix>& w, const Eigen::Ref<const Vector>& x0, long n,
                             double radius) {
  if (w.rows() != w.cols() || w.cols() != x0.size()) throw DimensionMismatch("autonomous_power_form: shape mismatch");
  if (n < 1) throw InvalidArgument("autonomous_power_form: n must be positive");
  if (x0.isZero(0.0)) throw DegenerateActivation("autonomous_power_form: x0 is zero");

  Vector v = x0;
  for (long i = 0; i < n; ++i) {
    v = w * v;
    const double peak = v.cwiseAbs().maxCoeff();
    if (!(peak > 0.0) || !std::isfinite(peak))
      throw DegenerateActivation("autonomous_power_form: W^" + std::to_string(i + 1) + " x0 is numerically zero");
    int exponent = 0;
    std::frexp(peak, &exponent);
    if (exponent > kRescaleExponent || exponent < -kRescaleExponent) v = v.unaryExpr([exponent](double c) {
      return std::ldexp(c, -exponent);
    });
  }
  return activate(Activation::spherical, v, radius);
}

Vector reconstruct_state(const Eigen::Ref<const Matrix>& w, const Eigen::Ref<const Matrix>& effective_inputs,
                         const Eigen::Ref<const Vector>& x0, const Eigen::Ref<const Vector>& norm_factors,
                         double radius) {
  const Eigen::Index length = effective_inputs.rows();
  if (w.rows() != w.cols() || effective_inputs.cols() != w.rows() || x0.size() != w.rows())
    throw DimensionMismatch("state_decomposition: shape mismatch");
  if (norm_factors.size() != length) throw DimensionMismatch("state_decomposition: one norm factor per input");
  if (length == 0) return x0;
  if (!(norm_factors.minCoeff() > 0.0)) throw NumericalError("state_decomposition: non-positive norm factor");

  // Term k (k = 0 is the initial state) is r^(T-k+1) W^(T-k) v_k / prod_{l=k..T} N_l
  // with N_0 = 1; each term is propagated on its own from step k to T.
  Vector total = Vector::Zero(w.rows());
  for (Eigen::Index k = 0; k <= length; ++k) {
    Vector term = (k == 0) ? Vector(x0) : Vector(effective_inputs.row(k - 1).transpose());
    if (k > 0) term *= radius / norm_factors(k - 1);
    for (Eigen::Index l = k + 1; l <= length; ++l) term = (radius / norm_factors(l - 1)) * (w * term);
    total += term;
  }
  return total;
}

Vector state_decomposition(const Reservoir& reservoir, const Eigen::Ref<const Matrix>& inputs,
                           const Eigen::Ref<const Vector>& x0) {
  if (reservoir.config().activation != Activation::spherical)
    throw InvalidArgument("state_decomposition: only defined for the spherical family");
  const Trajectory reference = drive(reservoir, inputs, x0, 0);
  const Matrix effective = inputs * reservoir.w_in().transpose();
  return reconstruct_state(reservoir.w(), effective, x0, reference.norm_factors, reservoir.config().sphere_radius);
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw InvalidArgument("reservoir file: matrix data length does not match its shape");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
  return m;
}

}  // namespace

std::string reservoir_to_json(const Reservoir& reservoir) {
  const auto& c = reservoir.config();
  nlohmann::json j;
  j["format"] = "sphesn.reservoir";
  j["version"] = kJsonVersion;
  j["config"] = {{"n_neurons", c.n_neurons},         {"n_inputs", c.n_inputs},
                 {"spectral_radius", c.spectral_radius}, {"input_scaling", c.input_scaling},
                 {"activation", std::string(to_string(c.activation))},
                 {"sphere_radius", c.sphere_radius}, {"density", c.density},
                 {"seed", c.seed}};
  j["w"] = matrix_to_json(reservoir.w());
  j["w_in"] = matrix_to_json(reservoir.w_in());
  return j.dump();
}

Reservoir reservoir_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "sphesn.reservoir")
      throw InvalidArgument("reservoir file: unexpected format tag");
    if (j.at("version").get<int>() != kJsonVersion) throw InvalidArgument("reservoir file: unsupported version");
    const auto& jc = j.at("config");
    ReservoirConfig c;
    c.n_neurons = jc.at("n_neurons").get<int>();
    c.n_inputs = jc.at("n_inputs").get<int>();
    c.spectral_radius = jc.at("spectral_radius").get<double>();
    c.input_scaling = jc.at("input_scaling").get<double>();
    c.activation = parse_activation(jc.at("activation").get<std::string>());
    c.sphere_radius = jc.at("sphere_radius").get<double>();
    c.density = jc.at("density").get<double>();
    c.seed = jc.at("seed").get<std::uint64_t>();
    return Reservoir(matrix_from_json(j.at("w")), matrix_from_json(j.at("w_in")), c);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("reservoir file: ") + e.what());
  }
}

void save_reservoir(const Reservoir& reservoir, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << reservoir_to_json(reservoir) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

Reservoir load_reservoir(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return reservoir_from_json(buffer.str());
}

}  // namespace sphesn
