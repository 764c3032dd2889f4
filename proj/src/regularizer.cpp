#include "hamgame/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hamgame {

namespace {

constexpr double kDomainTolerance = 1e-9;

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

void require_finite(const Vector& y, const char* what) {
  if (!y.allFinite()) throw DomainError(std::string(what) + ": non-finite payoff vector");
}

void require_dim(const Regularizer& reg, const Vector& v, const char* what) {
  if (v.size() != reg.dim()) {
    std::ostringstream os;
    os << what << ": vector of length " << v.size() << " for regularizer of dimension "
       << reg.dim();
    throw StructuralError(os.str());
  }
}

void require_in_domain(const Regularizer& reg, const Vector& x, const char* what) {
  require_dim(reg, x, what);
  if (!reg.space().contains(x, kDomainTolerance)) {
    throw DomainError(std::string(what) + ": point outside " + reg.space().describe());
  }
}

Vector lift_point(const Vector& x) {
  Vector out(x.size() + 1);
  out.head(x.size()) = x;
  out(x.size()) = 1.0 - x.sum();
  return out;
}

Vector lift_payoff(const Vector& y) {
  Vector out = Vector::Zero(y.size() + 1);
  out.head(y.size()) = y;
  return out;
}

/// The full-simplex regularizer a sub-simplex regularizer is a coordinate chart of.
Regularizer lifted(const Regularizer& reg) {
  return Regularizer(reg.kind(), StrategySpace::simplex(reg.dim() + 1), reg.scale());
}

template <typename Fn>
void for_each_factor(const Regularizer& reg, Fn&& fn) {
  int offset = 0;
  for (const auto& f : reg.factors()) {
    fn(f, offset);
    offset += f.dim();
  }
}

Vector softmax(const Vector& z) {
  const double m = z.maxCoeff();
  Vector e = (z.array() - m).exp();
  return e / e.sum();
}

}  // namespace

std::string to_string(RegularizerKind kind) {
  return kind == RegularizerKind::entropy ? "entropy" : "euclidean";
}

RegularizerKind parse_regularizer_kind(const std::string& name) {
  if (name == "entropy") return RegularizerKind::entropy;
  if (name == "euclidean") return RegularizerKind::euclidean;
  throw StructuralError("unknown regularizer '" + name + "' (expected entropy or euclidean)");
}

Regularizer::Regularizer(RegularizerKind kind, StrategySpace space, double scale)
    : kind_(kind), space_(std::move(space)), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("regularizer scale must be positive and finite");
  }
  if (space_.kind() == StrategySpace::Kind::product) {
    throw StructuralError("use Regularizer::product for product spaces");
  }
}

Regularizer::Regularizer(std::vector<Regularizer> factors)
    : kind_(factors.front().kind()),
      space_(StrategySpace::simplex(1)),
      scale_(1.0),
      factors_(std::move(factors)) {
  std::vector<StrategySpace> spaces;
  spaces.reserve(factors_.size());
  for (const auto& f : factors_) spaces.push_back(f.space());
  space_ = StrategySpace::product(std::move(spaces));
}

Regularizer Regularizer::entropy(int dim, double scale) {
  return Regularizer(RegularizerKind::entropy, StrategySpace::simplex(dim), scale);
}

Regularizer Regularizer::euclidean(int dim, double scale) {
  return Regularizer(RegularizerKind::euclidean, StrategySpace::simplex(dim), scale);
}

Regularizer Regularizer::product(std::vector<Regularizer> factors) {
  if (factors.empty()) throw StructuralError("product regularizer needs at least one factor");
  // Flatten nested products so every factor is atomic.
  std::vector<Regularizer> flat;
  for (auto& f : factors) {
    if (f.is_product()) {
      for (const auto& g : f.factors()) flat.push_back(g);
    } else {
      flat.push_back(std::move(f));
    }
  }
  return Regularizer(std::move(flat));
}

Regularizer Regularizer::rescaled(double factor) const {
  if (is_product()) {
    std::vector<Regularizer> fs;
    for (const auto& f : factors_) fs.push_back(f.rescaled(factor));
    return Regularizer(std::move(fs));
  }
  return Regularizer(kind_, space_, scale_ * factor);
}

std::string Regularizer::name() const {
  if (!is_product()) return to_string(kind_);
  std::string out = "product(";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += ",";
    out += factors_[i].name();
  }
  return out + ")";
}

double h_value(const Regularizer& reg, const Vector& x) {
  require_in_domain(reg, x, "h_value");
  if (reg.is_product()) {
    double total = 0.0;
    for_each_factor(reg, [&](const Regularizer& f, int off) {
      total += h_value(f, x.segment(off, f.dim()));
    });
    return total;
  }
  switch (reg.space().kind()) {
    case StrategySpace::Kind::sub_simplex:
      return h_value(lifted(reg), lift_point(x));
    case StrategySpace::Kind::simplex:
    case StrategySpace::Kind::box:
    case StrategySpace::Kind::product:
      break;
  }
  double h = 0.0;
  if (reg.kind() == RegularizerKind::entropy) {
    for (Eigen::Index s = 0; s < x.size(); ++s) h += xlogx(x(s));
  } else {
    h = x.squaredNorm();
  }
  return reg.scale() * h;
}

Vector h_gradient(const Regularizer& reg, const Vector& x) {
  require_in_domain(reg, x, "h_gradient");
  if (reg.is_product()) {
    Vector g(x.size());
    for_each_factor(reg, [&](const Regularizer& f, int off) {
      g.segment(off, f.dim()) = h_gradient(f, x.segment(off, f.dim()));
    });
    return g;
  }
  if (reg.space().kind() == StrategySpace::Kind::sub_simplex) {
    const Vector full = h_gradient(lifted(reg), lift_point(x));
    return full.head(x.size()).array() - full(x.size());
  }
  if (reg.kind() == RegularizerKind::entropy) {
    if (x.minCoeff() <= 0.0) {
      throw DomainError("entropy gradient undefined on boundary");
    }
    return reg.scale() * (x.array().log() + 1.0).matrix();
  }
  return 2.0 * reg.scale() * x;
}

Vector choice_map(const Regularizer& reg, const Vector& y) {
  require_dim(reg, y, "choice_map");
  require_finite(y, "choice_map");
  if (reg.is_product()) {
    Vector x(y.size());
    for_each_factor(reg, [&](const Regularizer& f, int off) {
      x.segment(off, f.dim()) = choice_map(f, y.segment(off, f.dim()));
    });
    return x;
  }
  const double s = reg.scale();
  switch (reg.space().kind()) {
    case StrategySpace::Kind::simplex:
      if (reg.kind() == RegularizerKind::entropy) return softmax(y / s);
      return project_to_simplex(y / (2.0 * s));
    case StrategySpace::Kind::sub_simplex:
      return choice_map(lifted(reg), lift_payoff(y)).head(y.size());
    case StrategySpace::Kind::box:
      if (reg.kind() == RegularizerKind::entropy) {
        return (y.array() / s - 1.0).min(0.0).exp().matrix();
      }
      return (y.array() / (2.0 * s)).max(0.0).min(1.0).matrix();
    case StrategySpace::Kind::product:
      break;
  }
  throw StructuralError("choice_map: unsupported domain");
}

ConjugatePair conjugate(const Regularizer& reg, const Vector& y) {
  Vector x = choice_map(reg, y);
  const double value = x.dot(y) - h_value(reg, x);
  return {value, std::move(x)};
}

double conjugate_value(const Regularizer& reg, const Vector& y) {
  return conjugate(reg, y).value;
}

double entropy_conjugate_closed_form(const Regularizer& reg, const Vector& y) {
  if (reg.is_product() || reg.kind() != RegularizerKind::entropy ||
      reg.space().kind() != StrategySpace::Kind::simplex) {
    throw UnsupportedGameError("closed-form conjugate is defined for entropy on a simplex");
  }
  require_dim(reg, y, "entropy_conjugate_closed_form");
  require_finite(y, "entropy_conjugate_closed_form");
  const Vector z = y / reg.scale();
  const double m = z.maxCoeff();
  return reg.scale() * (m + std::log((z.array() - m).exp().sum()));
}

double bregman_distance(const Regularizer& reg, const Vector& x_ref, const Vector& x) {
  require_in_domain(reg, x_ref, "bregman_distance");
  require_in_domain(reg, x, "bregman_distance");
  if (reg.is_product()) {
    double total = 0.0;
    for_each_factor(reg, [&](const Regularizer& f, int off) {
      total += bregman_distance(f, x_ref.segment(off, f.dim()), x.segment(off, f.dim()));
    });
    return total;
  }
  if (reg.space().kind() == StrategySpace::Kind::sub_simplex) {
    return bregman_distance(lifted(reg), lift_point(x_ref), lift_point(x));
  }
  const double s = reg.scale();
  if (reg.kind() == RegularizerKind::euclidean) return s * (x_ref - x).squaredNorm();

  if (x.minCoeff() <= 0.0) throw DomainError("entropy gradient undefined on boundary");
  double d = 0.0;
  const bool simplex = reg.space().kind() == StrategySpace::Kind::simplex;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double p = std::max(x_ref(k), 0.0);
    if (p > 0.0) d += p * std::log(p / x(k));
    if (!simplex) d += x(k) - p;
  }
  return s * d;
}

double fenchel_coupling(const Regularizer& reg, const Vector& x_ref, const Vector& y) {
  require_in_domain(reg, x_ref, "fenchel_coupling");
  return conjugate_value(reg, y) - y.dot(x_ref) + h_value(reg, x_ref);
}

Vector project_to_simplex(const Vector& v) {
  const Eigen::Index k = v.size();
  std::vector<double> u(v.data(), v.data() + k);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

}  // namespace hamgame
