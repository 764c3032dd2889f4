#include "hamgame/game.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <limits>
#include <sstream>

namespace hamgame {

namespace {

std::string edge_name(int i, int j) {
  std::ostringstream os;
  os << "A^(" << i << "," << j << ")";
  return os.str();
}

bool is_zero(const Matrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Is A^(ji) + (A^(ij))^T a constant matrix? Returns the constant.
std::optional<double> edge_constant(const Polymatrix& g, int i, int j, double tol) {
  const Matrix sum = g.block(j, i) + g.block(i, j).transpose();
  if (sum.size() == 0) return 0.0;
  const double c = sum(0, 0);
  if ((sum.array() - c).abs().maxCoeff() > tol) return std::nullopt;
  return c;
}

}  // namespace

double sigma_sign(Sigma sigma) {
  switch (sigma) {
    case Sigma::zero_sum: return -1.0;
    case Sigma::coordination: return 1.0;
    case Sigma::general: break;
  }
  throw UnsupportedGameError("game has no sigma tag (general-sum)");
}

std::string to_string(Sigma sigma) {
  switch (sigma) {
    case Sigma::zero_sum: return "zero-sum";
    case Sigma::coordination: return "coordination";
    case Sigma::general: return "general";
  }
  return "unknown";
}

std::string to_string(GameClass c) {
  switch (c) {
    case GameClass::zero_sum: return "zero-sum";
    case GameClass::coordination: return "coordination";
    case GameClass::constant_sum: return "constant-sum";
    case GameClass::general: return "general";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Polymatrix

Polymatrix::Polymatrix(std::vector<int> strategy_counts) : counts_(std::move(strategy_counts)) {
  if (counts_.empty()) throw StructuralError("a game needs at least one agent");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 1) {
      throw StructuralError("agent " + std::to_string(i) + " has no strategies");
    }
  }
  const int n = agent_count();
  blocks_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) blocks_[index(i, j)] = Matrix::Zero(counts_[i], counts_[j]);
    }
  }
}

Polymatrix::Polymatrix(std::vector<int> strategy_counts, std::vector<Edge> edges)
    : Polymatrix(std::move(strategy_counts)) {
  for (auto& e : edges) set_block(e.i, e.j, std::move(e.A));
}

void Polymatrix::check_agent(int i) const {
  if (i < 0 || i >= agent_count()) {
    throw StructuralError("agent index " + std::to_string(i) + " out of range");
  }
}

std::size_t Polymatrix::index(int i, int j) const {
  return static_cast<std::size_t>(i) * counts_.size() + static_cast<std::size_t>(j);
}

void Polymatrix::set_block(int i, int j, Matrix A) {
  check_agent(i);
  check_agent(j);
  if (i == j) throw StructuralError("self-interaction " + edge_name(i, j) + " is not allowed");
  if (A.rows() != counts_[i] || A.cols() != counts_[j]) {
    std::ostringstream os;
    os << "shape mismatch on edge " << edge_name(i, j) << ": got " << A.rows() << "x"
       << A.cols() << ", expected " << counts_[i] << "x" << counts_[j];
    throw StructuralError(os.str());
  }
  if (!A.allFinite()) throw StructuralError("non-finite entry in " + edge_name(i, j));
  blocks_[index(i, j)] = std::move(A);
}

int Polymatrix::total_strategies() const {
  int total = 0;
  for (int k : counts_) total += k;
  return total;
}

const Matrix& Polymatrix::block(int i, int j) const {
  check_agent(i);
  check_agent(j);
  if (i == j) throw StructuralError("no block " + edge_name(i, j));
  return blocks_[index(i, j)];
}

bool Polymatrix::has_interaction(int i, int j) const {
  if (i == j) return false;
  return !is_zero(block(i, j)) || !is_zero(block(j, i));
}

Vector Polymatrix::payoff_vector(int i, const AgentVectors& x) const {
  Vector u = Vector::Zero(counts_.at(i));
  for (int j = 0; j < agent_count(); ++j) {
    if (j != i) u.noalias() += block(i, j) * x[j];
  }
  return u;
}

// ---------------------------------------------------------------------------
// NetworkGame / MixedProfile

NetworkGame::NetworkGame(Polymatrix payoffs, Sigma sigma)
    : payoffs_(std::move(payoffs)), sigma_(sigma) {
  if (sigma_ == Sigma::general) return;
  const double s = sigma_sign(sigma_);
  const int n = payoffs_.agent_count();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gap = max_abs(payoffs_.block(i, j) - s * payoffs_.block(j, i).transpose());
      if (gap > kSymmetryTolerance) {
        std::ostringstream os;
        os << "edge (" << i << "," << j << ") violates the " << to_string(sigma_)
           << " relation A^(ij) = sigma (A^(ji))^T (max deviation " << gap << ")";
        throw StructuralError(os.str());
      }
    }
  }
}

MixedProfile::MixedProfile(AgentVectors strategies) : strategies_(std::move(strategies)) {
  for (std::size_t i = 0; i < strategies_.size(); ++i) {
    const Vector& x = strategies_[i];
    if (x.size() == 0 || !x.allFinite() || x.minCoeff() < 0.0 ||
        std::abs(x.sum() - 1.0) > kSymmetryTolerance) {
      throw DomainError("mixed strategy of agent " + std::to_string(i) +
                        " is not in its simplex");
    }
  }
}

// ---------------------------------------------------------------------------
// Classification and normalization

bool satisfies_zero_sum(const Polymatrix& game, double tol) {
  const int n = game.agent_count();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (max_abs(game.block(i, j) + game.block(j, i).transpose()) > tol) return false;
    }
  }
  return true;
}

bool satisfies_coordination(const Polymatrix& game, double tol) {
  const int n = game.agent_count();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (max_abs(game.block(i, j) - game.block(j, i).transpose()) > tol) return false;
    }
  }
  return true;
}

Classification classify_game(const Polymatrix& game) {
  Classification out;
  const int n = game.agent_count();
  if (satisfies_zero_sum(game)) {
    out.game_class = GameClass::zero_sum;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) out.constants.push_back({i, j, 0.0});
    }
    return out;
  }
  if (satisfies_coordination(game)) {
    out.game_class = GameClass::coordination;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto c = edge_constant(game, i, j, kSymmetryTolerance);
      if (!c) {
        out.constants.clear();
        out.game_class = GameClass::general;
        return out;
      }
      out.constants.push_back({i, j, *c});
    }
  }
  out.game_class = GameClass::constant_sum;
  return out;
}

NetworkGame normalize_constant_sum(const Polymatrix& game) {
  const Classification cls = classify_game(game);
  if (cls.game_class != GameClass::zero_sum && cls.game_class != GameClass::constant_sum) {
    throw UnsupportedGameError("game is " + to_string(cls.game_class) +
                               ", not pairwise constant-sum; it cannot be normalized");
  }
  if (cls.game_class == GameClass::zero_sum) return NetworkGame(game, Sigma::zero_sum);
  Polymatrix out = game;
  for (const auto& [i, j, c] : cls.constants) {
    // A^(ji) - c 1 equals -(A^(ij))^T up to the classification tolerance; store the exact form.
    out.set_block(j, i, -game.block(i, j).transpose());
  }
  return NetworkGame(std::move(out), Sigma::zero_sum);
}

// ---------------------------------------------------------------------------
// Bipartite structure

std::optional<Partition> bipartite_partition(const Polymatrix& game) {
  const int n = game.agent_count();
  std::vector<int> side(n, -1);
  for (int root = 0; root < n; ++root) {
    if (side[root] != -1) continue;
    side[root] = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v = 0; v < n; ++v) {
        if (v == u || !game.has_interaction(u, v)) continue;
        if (side[v] == -1) {
          side[v] = 1 - side[u];
          queue.push_back(v);
        } else if (side[v] == side[u]) {
          return std::nullopt;
        }
      }
    }
  }
  Partition p;
  for (int i = 0; i < n; ++i) (side[i] == 0 ? p.first : p.second).push_back(i);
  return p;
}

void check_partition(const Polymatrix& game, const Partition& partition) {
  const int n = game.agent_count();
  std::vector<int> side(n, -1);
  auto assign = [&](const std::vector<int>& agents, int s) {
    for (int a : agents) {
      if (a < 0 || a >= n) throw StructuralError("partition names unknown agent " + std::to_string(a));
      if (side[a] != -1) throw StructuralError("agent " + std::to_string(a) + " appears twice in partition");
      side[a] = s;
    }
  };
  assign(partition.first, 0);
  assign(partition.second, 1);
  for (int i = 0; i < n; ++i) {
    if (side[i] == -1) throw StructuralError("agent " + std::to_string(i) + " missing from partition");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (side[i] == side[j] && game.has_interaction(i, j)) {
        throw StructuralError("partition is inconsistent: nonzero intra-side edge (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Equilibria

double verify_nash(const Polymatrix& game, const MixedProfile& profile, bool fully_mixed) {
  const int n = game.agent_count();
  if (profile.size() != n) throw StructuralError("profile has wrong number of agents");
  for (int i = 0; i < n; ++i) {
    if (profile[i].size() != game.strategies(i)) {
      throw StructuralError("profile for agent " + std::to_string(i) + " has wrong length");
    }
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vector u = game.payoff_vector(i, profile.vectors());
    const double current = profile[i].dot(u);
    worst = std::max(worst, u.maxCoeff() - current);
    if (fully_mixed) {
      if (profile[i].minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, u.maxCoeff() - u.minCoeff());
    }
  }
  return std::max(worst, 0.0);
}

Solve2x2Result solve_2x2_fully_mixed_nash(const Polymatrix& game) {
  if (game.agent_count() != 2 || game.strategies(0) != 2 || game.strategies(1) != 2) {
    throw StructuralError("solve_2x2_fully_mixed_nash needs two agents with two strategies each");
  }
  const Matrix& A = game.block(0, 1);
  const Matrix& B = game.block(1, 0);
  const double a1 = A(0, 0) + A(1, 1) - A(0, 1) - A(1, 0);
  const double a2 = B(0, 0) + B(1, 1) - B(0, 1) - B(1, 0);
  if (std::abs(a1) <= kSymmetryTolerance || std::abs(a2) <= kSymmetryTolerance) {
    return {std::nullopt,
            "degenerate: an agent's payoff difference does not depend on the opponent"};
  }
  // Agent 1 mixes to make agent 2 indifferent and vice versa.
  const double p = (B(1, 1) - B(0, 1)) / a2;
  const double q = (A(1, 1) - A(0, 1)) / a1;
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    return {std::nullopt, "no interior solution: indifference point lies outside the simplex"};
  }
  Vector x1(2), x2(2);
  x1 << p, 1.0 - p;
  x2 << q, 1.0 - q;
  return {MixedProfile({x1, x2}), ""};
}

NetworkGame shift_payoffs_to_zero_drift(const NetworkGame& game, const MixedProfile& equilibrium) {
  if (game.sigma() != Sigma::zero_sum) {
    throw UnsupportedGameError("payoff shifting keeps edges zero-sum only for zero-sum games");
  }
  const Polymatrix& g = game.payoffs();
  const int n = g.agent_count();
  if (equilibrium.size() != n) throw StructuralError("profile has wrong number of agents");

  std::vector<double> need(n);
  for (int i = 0; i < n; ++i) {
    const Vector u = g.payoff_vector(i, equilibrium.vectors());
    if (u.maxCoeff() - u.minCoeff() > 1e-9) {
      throw DomainError("agent " + std::to_string(i) +
                        " is not indifferent at the reference profile (not a fully-mixed equilibrium)");
    }
    need[i] = u.mean();
  }

  // Spanning forest; push each node's residual shift onto its tree edge, leaves first.
  std::vector<int> parent(n, -2);
  std::vector<int> order;
  for (int root = 0; root < n; ++root) {
    if (parent[root] != -2) continue;
    parent[root] = -1;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (int v = 0; v < n; ++v) {
        if (v != u && parent[v] == -2 && g.has_interaction(u, v)) {
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
  }
  Polymatrix out = g;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int u = *it;
    const int p = parent[u];
    if (p < 0) {
      if (std::abs(need[u]) > 1e-9) {
        throw DomainError("equilibrium payoffs of a component do not sum to zero");
      }
      continue;
    }
    const double e = need[u];
    Matrix shifted = out.block(u, p).array() - e;
    out.set_block(p, u, -shifted.transpose());
    out.set_block(u, p, std::move(shifted));
    need[p] += e;
  }
  return NetworkGame(std::move(out), Sigma::zero_sum);
}

// ---------------------------------------------------------------------------
// GeneralizedGame

GeneralizedGame::GeneralizedGame(Polymatrix payoffs, std::vector<StrategySpace> spaces, Sigma sigma)
    : payoffs_(std::move(payoffs)), spaces_(std::move(spaces)), sigma_(sigma) {
  const int n = payoffs_.agent_count();
  if (static_cast<int>(spaces_.size()) != n) {
    throw StructuralError("generalized game needs one strategy space per agent");
  }
  for (int i = 0; i < n; ++i) {
    if (spaces_[i].dim() != payoffs_.strategies(i)) {
      throw StructuralError("strategy space of agent " + std::to_string(i) +
                            " does not match its payoff dimension");
    }
  }
  // Reuse the sigma check of NetworkGame.
  (void)NetworkGame(payoffs_, sigma_);
  linear_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto& lt = linear_[static_cast<std::size_t>(i) * n + j];
      lt.b = Vector::Zero(payoffs_.strategies(i));
      lt.d = Vector::Zero(payoffs_.strategies(j));
    }
    drift_.push_back(Vector::Zero(payoffs_.strategies(i)));
  }
}

GeneralizedGame GeneralizedGame::from_network(const NetworkGame& game) {
  std::vector<StrategySpace> spaces;
  for (int i = 0; i < game.agent_count(); ++i) {
    spaces.push_back(StrategySpace::simplex(game.strategies(i)));
  }
  return GeneralizedGame(game.payoffs(), std::move(spaces), game.sigma());
}

void GeneralizedGame::set_linear_terms(int i, int j, LinearTerms terms) {
  const int n = agent_count();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    throw StructuralError("linear terms need a pair of distinct agents");
  }
  if (terms.b.size() != payoffs_.strategies(i) || terms.d.size() != payoffs_.strategies(j)) {
    throw StructuralError("linear term shape mismatch on edge (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
  }
  if (!terms.b.allFinite() || !terms.d.allFinite() || !std::isfinite(terms.c)) {
    throw StructuralError("non-finite linear term");
  }
  linear_[static_cast<std::size_t>(i) * n + j] = std::move(terms);
  drift_[i].setZero();
  for (int k = 0; k < n; ++k) {
    if (k != i) drift_[i] += linear_[static_cast<std::size_t>(i) * n + k].b;
  }
}

const GeneralizedGame::LinearTerms& GeneralizedGame::linear_terms(int i, int j) const {
  const int n = agent_count();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    throw StructuralError("linear terms need a pair of distinct agents");
  }
  return linear_[static_cast<std::size_t>(i) * n + j];
}

bool GeneralizedGame::has_drift() const {
  for (const auto& b : drift_) {
    if (b.size() && b.cwiseAbs().maxCoeff() > 0.0) return true;
  }
  return false;
}

double GeneralizedGame::payoff(int i, const AgentVectors& x) const {
  double total = 0.0;
  for (int j = 0; j < agent_count(); ++j) {
    if (j == i) continue;
    const auto& lt = linear_terms(i, j);
    total += x[i].dot(payoffs_.block(i, j) * x[j]) + lt.b.dot(x[i]) + lt.d.dot(x[j]) + lt.c;
  }
  return total;
}

// ---------------------------------------------------------------------------
// GameRef / hashing

GameRef::GameRef(const NetworkGame& game) : payoffs_(&game.payoffs()), sigma_(game.sigma()) {}

GameRef::GameRef(const GeneralizedGame& game)
    : payoffs_(&game.payoffs()), sigma_(game.sigma()), drift_(&game.drift()), generalized_(&game) {}

bool GameRef::has_drift() const { return generalized_ != nullptr && generalized_->has_drift(); }

StrategySpace GameRef::space(int i) const {
  if (generalized_) return generalized_->space(i);
  return StrategySpace::simplex(payoffs_->strategies(i));
}

std::string game_hash(GameRef game) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix_bytes = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= p[k];
      h *= 1099511628211ULL;
    }
  };
  auto mix_int = [&](std::int64_t v) { mix_bytes(&v, sizeof v); };
  auto mix_double = [&](double v) {
    if (v == 0.0) v = 0.0;  // fold -0.0
    const auto bits = std::bit_cast<std::uint64_t>(v);
    mix_bytes(&bits, sizeof bits);
  };
  auto mix_string = [&](const std::string& s) {
    mix_int(static_cast<std::int64_t>(s.size()));
    mix_bytes(s.data(), s.size());
  };

  const Polymatrix& g = game.payoffs();
  const int n = g.agent_count();
  mix_int(n);
  mix_string(to_string(game.sigma()));
  for (int i = 0; i < n; ++i) {
    mix_int(g.strategies(i));
    mix_string(game.space(i).describe());
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Matrix& A = g.block(i, j);
      for (Eigen::Index r = 0; r < A.rows(); ++r) {
        for (Eigen::Index c = 0; c < A.cols(); ++c) mix_double(A(r, c));
      }
      if (const auto* gen = game.generalized()) {
        const auto& lt = gen->linear_terms(i, j);
        for (Eigen::Index k = 0; k < lt.b.size(); ++k) mix_double(lt.b(k));
        for (Eigen::Index k = 0; k < lt.d.size(); ++k) mix_double(lt.d(k));
        mix_double(lt.c);
      }
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hamgame
