#pragma once

#include <span>
#include <string>
#include <vector>

#include "hamgame/types.hpp"

namespace hamgame {

/// Convex compact strategy set of one agent.
///
///  - simplex(k):     {x in R^k : x >= 0, sum x = 1}
///  - sub_simplex(k): {x in R^k : x >= 0, sum x <= 1}, i.e. a (k+1)-simplex with its
///                    last coordinate eliminated by x_{k+1} = 1 - sum x
///  - box(k):         [0,1]^k
///  - product:        cartesian product of factor spaces, coordinates concatenated
class StrategySpace {
 public:
  enum class Kind { simplex, sub_simplex, box, product };

  static StrategySpace simplex(int dim);
  static StrategySpace sub_simplex(int dim);
  static StrategySpace box(int dim);
  static StrategySpace product(std::vector<StrategySpace> factors);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::span<const StrategySpace> factors() const { return factors_; }

  /// Membership with absolute slack `tol` on every constraint.
  bool contains(const Vector& x, double tol) const;

  /// Smallest slack over the inequality constraints at x (0 on the relative boundary).
  double interior_margin(const Vector& x) const;

  std::string describe() const;

  bool operator==(const StrategySpace& other) const;

 private:
  StrategySpace(Kind kind, int dim, std::vector<StrategySpace> factors);

  Kind kind_;
  int dim_;
  std::vector<StrategySpace> factors_;
};

std::string to_string(StrategySpace::Kind kind);

}  // namespace hamgame
