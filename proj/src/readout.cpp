#include "sphesn/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sphesn {

namespace {

Matrix stacked_design(const Eigen::Ref<const Matrix>& states, double lambda) {
  const Eigen::Index n = states.cols();
  Matrix design(states.rows() + n, n);
  design.topRows(states.rows()) = states;
  design.bottomRows(n) = std::sqrt(lambda) * Matrix::Identity(n, n);
  return design;
}

}  // namespace

RidgeSolver::RidgeSolver(const Eigen::Ref<const Matrix>& states, double lambda)
    : rows_(states.rows()), features_(states.cols()), lambda_(lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("fit_ridge: lambda must be finite and >= 0");
  if (rows_ < 1 || features_ < 1) throw InvalidArgument("fit_ridge: need at least one row and one feature");
  if (!states.allFinite()) throw NumericalError("fit_ridge: states contain non-finite values");

  if (lambda > 0.0) {
    factor_ = Eigen::HouseholderQR<Matrix>(stacked_design(states, lambda));
    return;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(states);
  if (qr.rank() < features_)
    throw NumericalError("fit_ridge: design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " < " +
                         std::to_string(features_) + "); use a ridge coefficient lambda > 0");
  factor_ = std::move(qr);
}

ReadoutWeights RidgeSolver::solve(const Eigen::Ref<const Matrix>& targets) const {
  if (targets.rows() != rows_) throw DimensionMismatch("fit_ridge: states and targets differ in length");
  Matrix rhs = targets;
  if (lambda_ > 0.0) {
    rhs.conservativeResize(rows_ + features_, Eigen::NoChange);
    rhs.bottomRows(features_).setZero();
  }
  const Matrix solution = std::visit([&](const auto& f) -> Matrix { return f.solve(rhs); }, factor_);
  return ReadoutWeights{solution.transpose(), lambda_};
}

ReadoutWeights fit_ridge(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                         double lambda) {
  return RidgeSolver(states, lambda).solve(targets);
}

Matrix predict(const ReadoutWeights& weights, const Eigen::Ref<const Matrix>& states) {
  if (states.cols() != weights.w_out.cols()) throw DimensionMismatch("predict: state width does not match W_out");
  return states * weights.w_out.transpose();
}

double nrmse(const Eigen::Ref<const Matrix>& predicted, const Eigen::Ref<const Matrix>& actual) {
  if (predicted.rows() != actual.rows() || predicted.cols() != actual.cols())
    throw DimensionMismatch("nrmse: predicted and actual shapes differ");
  if (actual.rows() < 2) throw InvalidArgument("nrmse: need at least two time steps");
  const double count = static_cast<double>(actual.rows());
  const Eigen::RowVectorXd mean = actual.colwise().mean();
  const double spread = (actual.rowwise() - mean).squaredNorm() / count;
  if (!(spread > 0.0)) throw InvalidArgument("nrmse: actual series is constant");
  if (!predicted.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  const double error = (actual - predicted).squaredNorm() / count;
  return std::sqrt(error / spread);
}

double accuracy_gamma(double nrmse_value) {
  if (!(nrmse_value >= 0.0)) throw InvalidArgument("accuracy_gamma: nrmse must be non-negative");
  return std::max(1.0 - nrmse_value, 0.0);
}

Metrics evaluate(const Eigen::Ref<const Matrix>& predicted, const Eigen::Ref<const Matrix>& actual) {
  Metrics m;
  m.nrmse = nrmse(predicted, actual);
  m.accuracy = std::isnan(m.nrmse) ? std::numeric_limits<double>::quiet_NaN() : accuracy_gamma(m.nrmse);
  return m;
}

}  // namespace sphesn
