#include "sphesn/linalg.hpp"

#include "sphesn/random.hpp"

#include <cmath>
#include <string>

namespace sphesn::detail {

namespace {

constexpr Eigen::Index kDenseCutoff = 64;
constexpr Eigen::Index kBlockSize = 4;
constexpr int kMaxIterations = 300;
constexpr double kResidualTolerance = 1e-12;

}  // namespace

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
}

double dense_spectral_radius_impl(const Matrix& m) {
  require_finite(m, "spectral_radius_of");
  if (m.rows() != m.cols()) throw DimensionMismatch("spectral_radius_of: matrix is not square");
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("spectral_radius_of: dense eigensolver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius_impl(const Matrix& m) {
  require_finite(m, "spectral_radius_of");
  if (m.rows() != m.cols()) throw DimensionMismatch("spectral_radius_of: matrix is not square");
  const Eigen::Index n = m.rows();
  if (n <= kDenseCutoff) return dense_spectral_radius_impl(m);

  Rng rng(0x5eedULL);
  Matrix basis(n, kBlockSize);
  for (Eigen::Index j = 0; j < basis.cols(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) basis(i, j) = rng.normal();
  basis = Eigen::HouseholderQR<Matrix>(basis).householderQ() * Matrix::Identity(n, kBlockSize);

  for (int it = 0; it < kMaxIterations; ++it) {
    const Matrix image = m * basis;
    const Matrix ritz = basis.transpose() * image;
    Eigen::EigenSolver<Matrix> small(ritz, false);
    const double estimate = small.eigenvalues().cwiseAbs().maxCoeff();
    if (estimate == 0.0) break;
    const double residual = (image - basis * ritz).norm();
    if (residual <= kResidualTolerance * estimate) return estimate;
    const double scale = image.norm();
    if (!(scale > 0.0) || !std::isfinite(scale)) break;
    basis = Eigen::HouseholderQR<Matrix>(image / scale).householderQ() * Matrix::Identity(n, kBlockSize);
  }
  return dense_spectral_radius_impl(m);
}

Vector singular_values_impl(const Matrix& m) {
  require_finite(m, "singular values");
  if (m.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

}  // namespace sphesn::detail
