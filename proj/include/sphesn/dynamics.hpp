#pragma once

#include "sphesn/reservoir.hpp"
#include "sphesn/types.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace sphesn {

/// Exact Jacobian of a -> r a / ||a|| composed with x -> W x + u, evaluated at
/// pre-activation `a`: (r / ||a||) (I - a^ a^T) W with a^ = a / ||a||.
template <typename DerivedW, typename DerivedA>
Matrix jacobian_spherical(const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedA>& a,
                          double radius = 1.0) {
  const double norm = a.norm();
  if (!(norm >= kDegenerateNorm)) throw DegenerateActivation("jacobian_spherical: pre-activation is zero");
  if (w.rows() != w.cols() || w.rows() != a.size()) throw DimensionMismatch("jacobian_spherical: shape mismatch");
  const Vector unit = a / norm;
  Matrix j = w;
  j.noalias() -= unit * (unit.transpose() * w);
  return (radius / norm) * j;
}

/// Element-wise form W_ij (1 - a^_i a^_j) r / ||a||. Not the derivative of the
/// spherical map (it drops the sum over the projection), but it is the form
/// the per-step spectral-radius estimator of the maximum exponent is defined on.
template <typename DerivedW, typename DerivedA>
Matrix jacobian_spherical_elementwise(const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedA>& a,
                                      double radius = 1.0) {
  const double norm = a.norm();
  if (!(norm >= kDegenerateNorm)) throw DegenerateActivation("jacobian_spherical: pre-activation is zero");
  if (w.rows() != w.cols() || w.rows() != a.size()) throw DimensionMismatch("jacobian_spherical: shape mismatch");
  const Vector unit = a / norm;
  return (radius / norm) * (w.array() * (1.0 - (unit * unit.transpose()).array())).matrix();
}

enum class JacobianForm { exact, elementwise };

/// Jacobian of one autonomous update at pre-activation `a`: the spherical
/// forms above, diag(1 - tanh(a)^2) W for tanh, and W for linear units.
Matrix family_jacobian(Activation family, const Eigen::Ref<const Matrix>& w, const Eigen::Ref<const Vector>& a,
                       double radius = 1.0, JacobianForm form = JacobianForm::exact);

struct LyapunovOptions {
  long n_steps = 5000;
  long transient = 500;
  /// Jacobian used by the per-step spectral-radius estimator.
  JacobianForm radius_form = JacobianForm::elementwise;
  /// Evaluate rho(J_k) only on every `radius_stride`-th post-transient step.
  /// 1 averages over every step.
  long radius_stride = 1;
  /// Number of leading exponents tracked by the QR method; 0 tracks all N.
  /// The leading exponents do not depend on the trailing tangent vectors.
  Eigen::Index qr_exponents = 0;
};

/// Maximum exponent as the time average of log rho(J_k) over the autonomous
/// trajectory, after discarding `transient` steps. Steps whose Jacobian is
/// identical to the previous one reuse its spectral radius.
double max_lle_paper(const Reservoir& reservoir, const LyapunovOptions& options = {},
                     std::optional<Vector> x0 = std::nullopt);

/// Spectrum by QR re-orthonormalization of the exact Jacobians along the
/// autonomous trajectory, sorted descending (all N exponents unless
/// `qr_exponents` asks for fewer). Directions annihilated by the
/// spherical projection report log(DBL_MIN).
Vector lyapunov_spectrum_qr(const Reservoir& reservoir, const LyapunovOptions& options = {},
                            std::optional<Vector> x0 = std::nullopt);

struct LyapunovReport {
  Activation family = Activation::spherical;
  double spectral_radius = 0.0;
  double max_lle = 0.0;
  Vector spectrum;
  long n_steps = 0;
  int n_neurons = 0;
  std::uint64_t seed = 0;
};

/// Runs both estimators on one reservoir.
LyapunovReport lyapunov_report(const Reservoir& reservoir, const LyapunovOptions& options = {});

/// Parameters of the closed-form memory curves. Spherical uses `alpha`;
/// linear uses `rho`; tanh uses `rho` and `input_magnitude`.
struct MemoryParams {
  double alpha = 1.0;
  double rho = 1.0;
  double input_magnitude = 1.0;
};

/// Influence of an input `lag` steps in the past on the current state:
/// (alpha / (alpha + 1))^lag, rho^lag, or the tanh chain S^(lag)(tanh(m))
/// divided by its lag-0 value tanh(m) (rho^lag in the m -> 0 limit).
/// Linear and tanh curves are defined for 0 < rho <= 1.
double theoretical_memory(Activation family, const MemoryParams& params, long lag);

/// M(k|m) - M(k|n) for m > n > k; never positive.
double memory_loss(Activation family, const MemoryParams& params, long k, long m, long n);

/// M(n-a|n) - M(n-a-delta|n) for a, delta >= 1; never negative.
double input_ordering_gap(Activation family, const MemoryParams& params, long a, long delta);

struct DeltaEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  Eigen::Index count = 0;
};

/// Mean and standard deviation of N_l - rho over the post-washout steps.
DeltaEstimate estimate_delta(const Trajectory& trajectory, double spectral_radius);

struct MemoryCurve {
  Activation family = Activation::spherical;
  MemoryParams params;
  std::vector<long> lags;
  std::vector<double> values;
};

MemoryCurve make_memory_curve(Activation family, const MemoryParams& params, long max_lag);

/// CSV with header family,sr,seed,n,steps,lag_or_rank,value; one row per
/// spectrum entry (rank 0 is the largest exponent).
void write_lyapunov_csv(std::ostream& out, const std::vector<LyapunovReport>& reports);

/// Same columns; `sr` is the curve's spectral radius parameter, n and steps
/// are zero for closed-form curves.
void write_memory_curve_csv(std::ostream& out, const std::vector<MemoryCurve>& curves);

}  // namespace sphesn
