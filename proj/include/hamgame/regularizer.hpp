#pragma once

#include <span>
#include <string>
#include <vector>

#include "hamgame/strategy_space.hpp"
#include "hamgame/types.hpp"

namespace hamgame {

enum class RegularizerKind { entropy, euclidean };

std::string to_string(RegularizerKind kind);
RegularizerKind parse_regularizer_kind(const std::string& name);

/// Strongly convex regularizer h on a strategy space, scaled by a positive constant.
///
/// entropy:   h(x) = scale * sum x_s log x_s   (0 log 0 := 0)
/// euclidean: h(x) = scale * ||x||^2
///
/// On a sub-simplex the regularizer is evaluated at the lifted point (x, 1 - sum x), which is
/// exactly the substitution that eliminates one pure strategy. A product regularizer is the
/// separable sum of its factors over concatenated coordinates.
class Regularizer {
 public:
  Regularizer(RegularizerKind kind, StrategySpace space, double scale = 1.0);

  static Regularizer entropy(int dim, double scale = 1.0);
  static Regularizer euclidean(int dim, double scale = 1.0);
  static Regularizer product(std::vector<Regularizer> factors);

  RegularizerKind kind() const { return kind_; }
  const StrategySpace& space() const { return space_; }
  double scale() const { return scale_; }
  int dim() const { return space_.dim(); }
  bool is_product() const { return !factors_.empty(); }
  std::span<const Regularizer> factors() const { return factors_; }

  /// Same regularizer with scale multiplied by `factor` (every factor of a product).
  Regularizer rescaled(double factor) const;

  /// "entropy", "euclidean", or "product(entropy,euclidean,...)".
  std::string name() const;

 private:
  Regularizer(std::vector<Regularizer> factors);

  RegularizerKind kind_;
  StrategySpace space_;
  double scale_;
  std::vector<Regularizer> factors_;
};

/// Maximizer and value of <x, y> - h(x) over the domain.
struct ConjugatePair {
  double value;
  Vector maximizer;
};

/// scale * h(x); throws DomainError if x is outside the domain by more than 1e-9.
double h_value(const Regularizer& reg, const Vector& x);

/// Gradient of h at x. Entropy requires every coordinate (lifted coordinate included) to be > 0.
Vector h_gradient(const Regularizer& reg, const Vector& x);

/// The choice map grad h*(y) = argmax_x <x, y> - h(x).
Vector choice_map(const Regularizer& reg, const Vector& y);

/// h*(y) evaluated as <x, y> - h(x) at x = choice_map(y).
double conjugate_value(const Regularizer& reg, const Vector& y);

ConjugatePair conjugate(const Regularizer& reg, const Vector& y);

/// scale * log sum exp(y / scale); entropy on a simplex only.
double entropy_conjugate_closed_form(const Regularizer& reg, const Vector& y);

/// h(x_ref) - h(x) - <grad h(x), x_ref - x>.
double bregman_distance(const Regularizer& reg, const Vector& x_ref, const Vector& x);

/// h*(y) - <y, x_ref> + h(x_ref).
double fenchel_coupling(const Regularizer& reg, const Vector& x_ref, const Vector& y);

/// Euclidean projection onto the probability simplex by sorted thresholding.
Vector project_to_simplex(const Vector& v);

}  // namespace hamgame
