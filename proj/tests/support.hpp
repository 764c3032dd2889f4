#pragma once

// Builders, generators and independent oracles shared by the test binaries.
// Oracles here deliberately avoid the library's own closed forms.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "hamgame/dynamics.hpp"
#include "hamgame/game.hpp"
#include "hamgame/regularizer.hpp"

namespace testsupport {

using namespace hamgame;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Polymatrix mp_payoffs() {
  const Matrix A = mat({{1, -1}, {-1, 1}});
  Polymatrix p({2, 2});
  p.set_block(0, 1, A);
  p.set_block(1, 0, -A.transpose());
  return p;
}

inline NetworkGame matching_pennies() { return NetworkGame(mp_payoffs(), Sigma::zero_sum); }

/// Initial payoffs giving x(0) = ((0.6, 0.4), (0.5, 0.5)) under the scale-1 euclidean map.
inline AgentVectors mp_y0() { return {vec({0.2, -0.2}), vec({0.0, 0.0})}; }

inline AgentVectors uniform_profile(const Polymatrix& g) {
  AgentVectors x;
  for (int i = 0; i < g.agent_count(); ++i) x.push_back(Vector::Constant(g.strategies(i), 1.0 / g.strategies(i)));
  return x;
}

inline std::vector<Regularizer> regs_for(const Polymatrix& g, RegularizerKind kind, double scale = 1.0) {
  std::vector<Regularizer> r;
  for (int i = 0; i < g.agent_count(); ++i) r.emplace_back(kind, StrategySpace::simplex(g.strategies(i)), scale);
  return r;
}

/// Hand-rolled generator over a fixed seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  Vector vector(int n, double a, double b) {
    Vector v(n);
    for (int k = 0; k < n; ++k) v(k) = uniform(a, b);
    return v;
  }

  Matrix matrix(int r, int c, double a, double b) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = uniform(a, b);
    return m;
  }

  /// Point of the simplex with every entry >= floor.
  Vector simplex_point(int n, double floor = 0.0) {
    Vector v(n);
    for (int k = 0; k < n; ++k) v(k) = -std::log(uniform(1e-12, 1.0));
    v /= v.sum();
    return Vector::Constant(n, floor) + (1.0 - n * floor) * v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

using EdgeList = std::vector<std::pair<int, int>>;

inline EdgeList cycle_edges(int n) {
  EdgeList e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return e;
}

/// Zero-sum game whose payoff vectors vanish at x_star: A^(ij) = (I - 1 x*_i^T) M (I - x*_j 1^T),
/// A^(ji) = -(A^(ij))^T. Every pure strategy then earns zero against x_star.
inline NetworkGame zero_sum_with_equilibrium(const EdgeList& edges, const AgentVectors& x_star, Gen& gen) {
  std::vector<int> counts;
  for (const auto& v : x_star) counts.push_back(static_cast<int>(v.size()));
  Polymatrix p(counts);
  for (auto [i, j] : edges) {
    const int ki = counts[i], kj = counts[j];
    const Matrix M = gen.matrix(ki, kj, -2.0, 2.0);
    const Matrix Pi = Matrix::Identity(ki, ki) - Vector::Ones(ki) * x_star[i].transpose();
    const Matrix Pj = Matrix::Identity(kj, kj) - x_star[j] * Vector::Ones(kj).transpose();
    const Matrix A = Pi * M * Pj;
    p.set_block(i, j, A);
    p.set_block(j, i, -A.transpose());
  }
  return NetworkGame(std::move(p), Sigma::zero_sum);
}

/// Coordination counterpart: same projected blocks, A^(ji) = (A^(ij))^T.
inline NetworkGame coordination_with_equilibrium(const EdgeList& edges, const AgentVectors& x_star, Gen& gen) {
  const NetworkGame zs = zero_sum_with_equilibrium(edges, x_star, gen);
  Polymatrix p = zs.payoffs();
  for (auto [i, j] : edges) p.set_block(j, i, p.block(i, j).transpose());
  return NetworkGame(std::move(p), Sigma::coordination);
}

inline NetworkGame random_zero_sum(const std::vector<int>& counts, const EdgeList& edges, Gen& gen) {
  Polymatrix p(counts);
  for (auto [i, j] : edges) {
    const Matrix A = gen.matrix(counts[i], counts[j], -2.0, 2.0);
    p.set_block(i, j, A);
    p.set_block(j, i, -A.transpose());
  }
  return NetworkGame(std::move(p), Sigma::zero_sum);
}

inline NetworkGame random_coordination(const std::vector<int>& counts, const EdgeList& edges, Gen& gen) {
  Polymatrix p(counts);
  for (auto [i, j] : edges) {
    const Matrix A = gen.matrix(counts[i], counts[j], -2.0, 2.0);
    p.set_block(i, j, A);
    p.set_block(j, i, A.transpose());
  }
  return NetworkGame(std::move(p), Sigma::coordination);
}

inline AgentVectors random_payoffs(const Polymatrix& g, Gen& gen, double a, double b) {
  AgentVectors y;
  for (int i = 0; i < g.agent_count(); ++i) y.push_back(gen.vector(g.strategies(i), a, b));
  return y;
}

// ---------------------------------------------------------------------------
// Oracles

/// h from the textbook formulas (0 log 0 = 0), simplex domain.
inline double h_direct(RegularizerKind kind, double scale, const Vector& x) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (kind == RegularizerKind::entropy) {
      s += x(k) > 0.0 ? x(k) * std::log(x(k)) : 0.0;
    } else {
      s += x(k) * x(k);
    }
  }
  return scale * s;
}

/// Exhaustive maximizer of <x,y> - h(x) over the 2-simplex grid with spacing `step`.
inline Vector grid_maximizer_2(RegularizerKind kind, double scale, const Vector& y, double step = 1e-4) {
  const int n = static_cast<int>(std::lround(1.0 / step));
  double best = -INFINITY;
  Vector arg(2);
  for (int a = 0; a <= n; ++a) {
    Vector x(2);
    x << a * step, 1.0 - a * step;
    const double v = x.dot(y) - h_direct(kind, scale, x);
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  return arg;
}

/// Maximizer over the 3-simplex: coarse grid, then successively finer grids around the best
/// point down to spacing 1e-4. The objective is concave, so local refinement is sound.
inline Vector grid_maximizer_3(RegularizerKind kind, double scale, const Vector& y) {
  auto value = [&](double a, double b) {
    Vector x(3);
    x << a, b, 1.0 - a - b;
    return x.dot(y) - h_direct(kind, scale, x);
  };
  double ca = 1.0 / 3, cb = 1.0 / 3;
  double step = 0.05;
  double half_width = 0.5;
  while (true) {
    double best = -INFINITY, ba = ca, bb = cb;
    const int m = static_cast<int>(std::lround(half_width / step));
    for (int i = -m; i <= m; ++i) {
      for (int j = -m; j <= m; ++j) {
        const double a = std::round((ca + i * step) / step) * step;
        const double b = std::round((cb + j * step) / step) * step;
        if (a < -1e-12 || b < -1e-12 || a + b > 1.0 + 1e-12) continue;
        const double aa = std::max(a, 0.0), bbv = std::max(b, 0.0);
        const double v = value(aa, std::min(bbv, 1.0 - aa));
        if (v > best) {
          best = v;
          ba = aa;
          bb = std::min(bbv, 1.0 - aa);
        }
      }
    }
    ca = ba;
    cb = bb;
    if (step <= 1e-4 + 1e-15) break;
    half_width = 3 * step;
    step = std::max(step / 10, 1e-4);
  }
  Vector x(3);
  x << ca, cb, 1.0 - ca - cb;
  return x;
}

/// scale * log sum exp(y / scale), computed stably.
inline double logsumexp_conjugate(double scale, const Vector& y) {
  const double m = (y / scale).maxCoeff();
  return scale * (m + std::log(((y / scale).array() - m).exp().sum()));
}

/// Euclidean choice map by bisection on the threshold tau in x = max(y/(2s) - tau, 0).
inline Vector euclidean_bisection(double scale, const Vector& y) {
  const Vector z = y / (2 * scale);
  double lo = z.minCoeff() - 1.0, hi = z.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = (z.array() - mid).max(0.0).sum();
    (s > 1.0 ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  Vector x = (z.array() - tau).max(0.0);
  return x / x.sum();
}

/// Matching Pennies with scale-1 euclidean regularizers, interior orbit:
/// p' = q - 1/2, q' = -(p - 1/2), solved in closed form.
struct HarmonicOracle {
  double p0, q0;
  double p(double t) const { return 0.5 + (p0 - 0.5) * std::cos(t) + (q0 - 0.5) * std::sin(t); }
  double q(double t) const { return 0.5 + (q0 - 0.5) * std::cos(t) - (p0 - 0.5) * std::sin(t); }
};

/// Pure Nash equilibria of a 2x2 bimatrix game by enumeration.
inline std::vector<std::pair<int, int>> pure_equilibria_2x2(const Polymatrix& g) {
  std::vector<std::pair<int, int>> out;
  const Matrix& A = g.block(0, 1);
  const Matrix& B = g.block(1, 0);  // agent 2's payoff is B(s2, s1)
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      const bool row_ok = A(s1, s2) >= A(1 - s1, s2);
      const bool col_ok = B(s2, s1) >= B(1 - s2, s1);
      if (row_ok && col_ok) out.emplace_back(s1, s2);
    }
  }
  return out;
}

inline double max_abs_diff(const AgentVectors& a, const AgentVectors& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace testsupport
