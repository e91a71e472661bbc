#pragma once

#include "sphesn/types.hpp"

#include <variant>

namespace sphesn {

/// Default ridge coefficient. The memory benchmarks are noiseless, so the
/// readout is regularized only at the level of rounding noise in the states.
inline constexpr double kDefaultRidgeLambda = 1e-20;

struct ReadoutWeights {
  Matrix w_out;  ///< N_out x N
  double ridge_lambda = 0.0;
};

/// Factorizes the ridge problem for one design matrix so that many target
/// columns can be fitted against it.
///
/// Solves min ||X W^T - Y||^2 + lambda ||W||^2 as the stacked least-squares
/// problem [X; sqrt(lambda) I] W^T = [Y; 0] with Householder QR. Its solution
/// satisfies the regularized normal equations (X^T X + lambda I) W^T = X^T Y
/// without squaring the condition number of X.
class RidgeSolver {
 public:
  /// Throws NumericalError when lambda == 0 and X is rank deficient.
  RidgeSolver(const Eigen::Ref<const Matrix>& states, double lambda);

  ReadoutWeights solve(const Eigen::Ref<const Matrix>& targets) const;

  Eigen::Index rows() const { return rows_; }
  Eigen::Index features() const { return features_; }
  double lambda() const { return lambda_; }

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index features_ = 0;
  double lambda_ = 0.0;
  std::variant<Eigen::HouseholderQR<Matrix>, Eigen::ColPivHouseholderQR<Matrix>> factor_;
};

/// Rows of `states` are post-washout reservoir states; rows of `targets` the
/// desired outputs at the same steps. No intercept is fitted.
ReadoutWeights fit_ridge(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                         double lambda = kDefaultRidgeLambda);

/// Row-wise y_k = W_out x_k.
Matrix predict(const ReadoutWeights& weights, const Eigen::Ref<const Matrix>& states);

/// sqrt(<||y - y_hat||^2> / <||y - <y>||^2>) with time averages over rows.
/// Non-finite predictions yield NaN.
double nrmse(const Eigen::Ref<const Matrix>& predicted, const Eigen::Ref<const Matrix>& actual);

/// max(1 - nrmse, 0).
double accuracy_gamma(double nrmse_value);

struct Metrics {
  double nrmse = 0.0;
  double accuracy = 0.0;
};

Metrics evaluate(const Eigen::Ref<const Matrix>& predicted, const Eigen::Ref<const Matrix>& actual);

}  // namespace sphesn
