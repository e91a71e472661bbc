#pragma once

#include "sphesn/types.hpp"

#include <filesystem>
#include <string>

namespace sphesn {

/// Pre-activations with norm below this are rejected by the spherical map.
inline constexpr double kDegenerateNorm = 1e-300;

/// Frozen recurrent matrix W (N x N) and input matrix W_in (N x N_in).
/// Immutable after construction; safe to share between threads.
class Reservoir {
 public:
  /// Checks shapes against `config`; does not rescale anything.
  Reservoir(Matrix w, Matrix w_in, ReservoirConfig config);

  const Matrix& w() const { return w_; }
  const Matrix& w_in() const { return w_in_; }
  const ReservoirConfig& config() const { return config_; }
  Eigen::Index size() const { return w_.rows(); }
  Eigen::Index n_inputs() const { return w_in_.cols(); }

 private:
  Matrix w_;
  Matrix w_in_;
  ReservoirConfig config_;
};

struct NetworkState {
  Vector x;
  long step_index = 0;
};

/// States x_1..x_T (one per row) with the norm factors ||W x_{k-1} + u_k||.
/// The first `washout` rows are excluded from readout training.
struct Trajectory {
  Matrix states;
  Vector norm_factors;
  Eigen::Index washout = 0;

  Eigen::Index length() const { return states.rows(); }
};

struct StepResult {
  NetworkState state;
  double norm_factor = 0.0;
};

/// Draws W (standard normal with a Bernoulli(density) mask, rescaled to the
/// configured spectral radius) and W_in (uniform on [-1, 1] times the input
/// scaling). Nilpotent draws are rejected and redrawn up to 10 times.
Reservoir build_reservoir(const ReservoirConfig& config);

/// Element-wise tanh, identity, or projection r * a / ||a|| onto the sphere.
template <typename Derived>
Vector activate(Activation family, const Eigen::MatrixBase<Derived>& a, double radius = 1.0) {
  switch (family) {
    case Activation::spherical: {
      const double norm = a.norm();
      if (!(norm >= kDegenerateNorm))
        throw DegenerateActivation("spherical activation: pre-activation norm " + std::to_string(norm) +
                                   " is numerically zero");
      return (radius / norm) * a;
    }
    case Activation::tanh:
      return a.array().tanh().matrix();
    case Activation::linear:
      return a;
  }
  throw InvalidArgument("activate: unknown activation family");
}

/// Spherical: r * e_1. tanh and linear: the zero vector.
Vector default_initial_state(const ReservoirConfig& config);

/// One update a = W x + W_in s, x' = activate(a). The norm factor ||a|| is
/// reported for every family.
StepResult step(const Reservoir& reservoir, const NetworkState& state, const Eigen::Ref<const Vector>& input);

/// Iterates `step` over the rows of `inputs` (T x N_in) from `x0`.
Trajectory drive(const Reservoir& reservoir, const Eigen::Ref<const Matrix>& inputs,
                 const Eigen::Ref<const Vector>& x0, Eigen::Index washout = 0);

/// sigma_min(W) - 1 - ||W_in|| * max_input_norm / r. Non-negative values mean
/// the sufficient condition for contractivity holds.
double contractivity_margin(const Reservoir& reservoir, double max_input_norm);

/// W^n x0 / ||W^n x0|| (times `radius`), projecting only once at the end.
/// Intermediate products are rescaled by exact powers of two to stay in range.
Vector autonomous_power_form(const Eigen::Ref<const Matrix>& w, const Eigen::Ref<const Vector>& x0, long n,
                             double radius = 1.0);

/// Rebuilds x_T from the explicit expansion
///   x_T = M(T,0) x0 + sum_k M(T,k) u_k,  M(T,k) = r^(T-k+1) W^(T-k) / prod_{l=k..T} N_l,
/// using the norm factors of a reference drive and u_k = W_in s_k.
Vector state_decomposition(const Reservoir& reservoir, const Eigen::Ref<const Matrix>& inputs,
                           const Eigen::Ref<const Vector>& x0);

/// Same expansion with caller-supplied effective inputs (rows u_k) and norm factors.
Vector reconstruct_state(const Eigen::Ref<const Matrix>& w, const Eigen::Ref<const Matrix>& effective_inputs,
                         const Eigen::Ref<const Vector>& x0, const Eigen::Ref<const Vector>& norm_factors,
                         double radius = 1.0);

std::string reservoir_to_json(const Reservoir& reservoir);
Reservoir reservoir_from_json(const std::string& text);
void save_reservoir(const Reservoir& reservoir, const std::filesystem::path& path);
Reservoir load_reservoir(const std::filesystem::path& path);

}  // namespace sphesn
