#include "hamgame/strategy_space.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace hamgame {

StrategySpace::StrategySpace(Kind kind, int dim, std::vector<StrategySpace> factors)
    : kind_(kind), dim_(dim), factors_(std::move(factors)) {}

StrategySpace StrategySpace::simplex(int dim) {
  if (dim < 1) throw StructuralError("simplex dimension must be positive");
  return StrategySpace(Kind::simplex, dim, {});
}

StrategySpace StrategySpace::sub_simplex(int dim) {
  if (dim < 1) throw StructuralError("sub-simplex dimension must be positive");
  return StrategySpace(Kind::sub_simplex, dim, {});
}

StrategySpace StrategySpace::box(int dim) {
  if (dim < 1) throw StructuralError("box dimension must be positive");
  return StrategySpace(Kind::box, dim, {});
}

StrategySpace StrategySpace::product(std::vector<StrategySpace> factors) {
  if (factors.empty()) throw StructuralError("product space needs at least one factor");
  int dim = 0;
  for (const auto& f : factors) dim += f.dim();
  return StrategySpace(Kind::product, dim, std::move(factors));
}

bool StrategySpace::contains(const Vector& x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  switch (kind_) {
    case Kind::simplex:
      return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
    case Kind::sub_simplex:
      return x.minCoeff() >= -tol && x.sum() <= 1.0 + tol;
    case Kind::box:
      return x.minCoeff() >= -tol && x.maxCoeff() <= 1.0 + tol;
    case Kind::product: {
      int offset = 0;
      for (const auto& f : factors_) {
        if (!f.contains(x.segment(offset, f.dim()), tol)) return false;
        offset += f.dim();
      }
      return true;
    }
  }
  return false;
}

double StrategySpace::interior_margin(const Vector& x) const {
  switch (kind_) {
    case Kind::simplex:
      return x.minCoeff();
    case Kind::sub_simplex:
      return std::min(x.minCoeff(), 1.0 - x.sum());
    case Kind::box:
      return std::min(x.minCoeff(), 1.0 - x.maxCoeff());
    case Kind::product: {
      double margin = std::numeric_limits<double>::infinity();
      int offset = 0;
      for (const auto& f : factors_) {
        margin = std::min(margin, f.interior_margin(x.segment(offset, f.dim())));
        offset += f.dim();
      }
      return margin;
    }
  }
  return 0.0;
}

std::string StrategySpace::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(";
  if (kind_ == Kind::product) {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) os << ",";
      os << factors_[i].describe();
    }
  } else {
    os << dim_;
  }
  os << ")";
  return os.str();
}

bool StrategySpace::operator==(const StrategySpace& other) const {
  return kind_ == other.kind_ && dim_ == other.dim_ && factors_ == other.factors_;
}

std::string to_string(StrategySpace::Kind kind) {
  switch (kind) {
    case StrategySpace::Kind::simplex: return "simplex";
    case StrategySpace::Kind::sub_simplex: return "sub_simplex";
    case StrategySpace::Kind::box: return "box";
    case StrategySpace::Kind::product: return "product";
  }
  return "unknown";
}

}  // namespace hamgame
