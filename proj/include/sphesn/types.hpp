#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sphesn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied an argument outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The spherical projection was asked to normalize a (numerically) zero vector.
class DegenerateActivation : public Error {
 public:
  using Error::Error;
};

/// An iterative or factorization-based numerical routine failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

enum class Activation { spherical, tanh, linear };

std::string_view to_string(Activation a);
/// Parses "spherical", "tanh" or "linear"; throws InvalidArgument otherwise.
Activation parse_activation(std::string_view name);

/// Generative hyper-parameters of a reservoir.
struct ReservoirConfig {
  int n_neurons = 200;
  int n_inputs = 1;
  double spectral_radius = 1.0;
  double input_scaling = 1.0;
  Activation activation = Activation::spherical;
  double sphere_radius = 1.0;
  double density = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;

  friend bool operator==(const ReservoirConfig&, const ReservoirConfig&) = default;
};

}  // namespace sphesn
