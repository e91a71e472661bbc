#pragma once

#include "sphesn/types.hpp"

namespace sphesn {

namespace detail {
double spectral_radius_impl(const Matrix& m);
double dense_spectral_radius_impl(const Matrix& m);
Vector singular_values_impl(const Matrix& m);
void require_finite(const Matrix& m, const char* what);
}  // namespace detail

/// Largest eigenvalue modulus of a square matrix.
///
/// Runs a block subspace iteration with Rayleigh-Ritz extraction and
/// accepts the estimate only once the Ritz residual is below 1e-12 relative;
/// otherwise (clustered or defective spectra) falls back to a dense
/// eigensolver. Small matrices go straight to the dense path.
template <typename Derived>
double spectral_radius_of(const Eigen::MatrixBase<Derived>& m) {
  return detail::spectral_radius_impl(m.eval());
}

/// Dense eigensolver route; also the oracle for spectral_radius_of in tests.
template <typename Derived>
double dense_spectral_radius(const Eigen::MatrixBase<Derived>& m) {
  return detail::dense_spectral_radius_impl(m.eval());
}

/// Smallest singular value.
template <typename Derived>
double min_singular_value(const Eigen::MatrixBase<Derived>& m) {
  const Vector s = detail::singular_values_impl(m.eval());
  return s.size() == 0 ? 0.0 : s.minCoeff();
}

/// Operator 2-norm (largest singular value).
template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& m) {
  const Vector s = detail::singular_values_impl(m.eval());
  return s.size() == 0 ? 0.0 : s.maxCoeff();
}

}  // namespace sphesn
