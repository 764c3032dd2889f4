#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace hamgame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One vector per agent (payoff vectors y_i, cumulative strategies X_i, mixed strategies x_i).
using AgentVectors = std::vector<Vector>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent shapes, unknown agents, invalid partitions.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A point outside the domain of an operation (non-finite input, boundary point, bad step size).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation needs structure the game does not have (e.g. a Hamiltonian on a general-sum game).
class UnsupportedGameError : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline bool all_finite(const AgentVectors& vs) {
  for (const auto& v : vs) {
    if (!v.allFinite()) return false;
  }
  return true;
}

/// Zero vectors shaped like `like`.
inline AgentVectors zeros_like(const AgentVectors& like) {
  AgentVectors out;
  out.reserve(like.size());
  for (const auto& v : like) out.push_back(Vector::Zero(v.size()));
  return out;
}

}  // namespace hamgame
