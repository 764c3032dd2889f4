#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hamgame/strategy_space.hpp"
#include "hamgame/types.hpp"

namespace hamgame {

/// Entrywise tolerance for the zero-sum / coordination / constant-sum relations.
inline constexpr double kSymmetryTolerance = 1e-12;

/// The game class tag sigma: -1 (zero-sum), +1 (coordination) or untagged.
enum class Sigma { zero_sum, coordination, general };

/// -1 for zero_sum, +1 for coordination; throws UnsupportedGameError for general.
double sigma_sign(Sigma sigma);
std::string to_string(Sigma sigma);

/// Payoff matrices A^(ij) of a polymatrix game. Absent edges are zero matrices.
/// No class invariant beyond shape consistency; this is the unvalidated candidate.
class Polymatrix {
 public:
  struct Edge {
    int i;
    int j;
    Matrix A;
  };

  explicit Polymatrix(std::vector<int> strategy_counts);
  Polymatrix(std::vector<int> strategy_counts, std::vector<Edge> edges);

  /// Sets A^(ij); the matrix must be |S_i| x |S_j|.
  void set_block(int i, int j, Matrix A);

  int agent_count() const { return static_cast<int>(counts_.size()); }
  int strategies(int i) const { return counts_.at(i); }
  std::span<const int> strategy_counts() const { return counts_; }
  int total_strategies() const;

  const Matrix& block(int i, int j) const;

  /// True iff A^(ij) or A^(ji) has a nonzero entry.
  bool has_interaction(int i, int j) const;

  /// sum_{j != i} A^(ij) x_j
  Vector payoff_vector(int i, const AgentVectors& x) const;

 private:
  std::size_t index(int i, int j) const;
  void check_agent(int i) const;

  std::vector<int> counts_;
  std::vector<Matrix> blocks_;
};

/// A polymatrix game whose class tag has been checked against the matrices.
class NetworkGame {
 public:
  /// Throws StructuralError if sigma is zero_sum/coordination and some pair violates
  /// A^(ij) = sigma (A^(ji))^T within kSymmetryTolerance.
  NetworkGame(Polymatrix payoffs, Sigma sigma);

  const Polymatrix& payoffs() const { return payoffs_; }
  Sigma sigma() const { return sigma_; }
  int agent_count() const { return payoffs_.agent_count(); }
  int strategies(int i) const { return payoffs_.strategies(i); }
  const Matrix& block(int i, int j) const { return payoffs_.block(i, j); }

 private:
  Polymatrix payoffs_;
  Sigma sigma_;
};

/// Mixed strategy profile: every x_i lies in its simplex (sum within 1e-12, entries >= 0).
class MixedProfile {
 public:
  explicit MixedProfile(AgentVectors strategies);

  int size() const { return static_cast<int>(strategies_.size()); }
  const Vector& operator[](int i) const { return strategies_.at(i); }
  const AgentVectors& vectors() const { return strategies_; }

 private:
  AgentVectors strategies_;
};

enum class GameClass { zero_sum, coordination, constant_sum, general };
std::string to_string(GameClass c);

struct EdgeConstant {
  int i;
  int j;
  double c;
};

struct Classification {
  GameClass game_class = GameClass::general;
  /// Per unordered edge (i < j) constant c with A^(ji) = c 1 - (A^(ij))^T; filled for
  /// zero_sum and constant_sum classifications.
  std::vector<EdgeConstant> constants;
};

bool satisfies_zero_sum(const Polymatrix& game, double tol = kSymmetryTolerance);
bool satisfies_coordination(const Polymatrix& game, double tol = kSymmetryTolerance);

/// Tie order: zero_sum > coordination > constant_sum > general.
Classification classify_game(const Polymatrix& game);

/// Subtracts c_{ij} 1 from A^(ji) (i < j) so that every edge is exactly zero-sum.
/// Throws UnsupportedGameError when the game is not pairwise constant-sum.
NetworkGame normalize_constant_sum(const Polymatrix& game);

/// Agents split into two sides with no interaction inside a side.
struct Partition {
  std::vector<int> first;
  std::vector<int> second;
};

/// Breadth-first 2-coloring of the interaction graph; nullopt on an odd cycle.
/// Each component's lowest-index agent (and every isolated agent) goes to `first`.
std::optional<Partition> bipartite_partition(const Polymatrix& game);

/// Throws StructuralError naming the first intra-side edge, or an agent missing/duplicated.
void check_partition(const Polymatrix& game, const Partition& partition);

/// max over agents i and pure strategies s of e_s^T u_i - x_i^T u_i, u_i = sum_j A^(ij) x_j.
/// With `fully_mixed`, also requires every entry > 0 (else +inf) and folds in the spread
/// max(u_i) - min(u_i) of each payoff vector.
double verify_nash(const Polymatrix& game, const MixedProfile& profile, bool fully_mixed);

struct Solve2x2Result {
  std::optional<MixedProfile> profile;
  std::string note;
};

/// Closed-form fully-mixed equilibrium of a 2-agent, 2-strategy game from the indifference
/// conditions; no profile when degenerate or when the solution is not strictly interior.
Solve2x2Result solve_2x2_fully_mixed_nash(const Polymatrix& game);

/// For a zero-sum game with fully-mixed equilibrium x*, shifts edge matrices by constant
/// multiples of the all-ones matrix (A^(ij) -= e 1, A^(ji) += e 1) so that every payoff vector
/// sum_j A^(ij) x*_j becomes zero. Edges stay exactly zero-sum; the x-dynamics are unchanged.
NetworkGame shift_payoffs_to_zero_drift(const NetworkGame& game, const MixedProfile& equilibrium);

/// Affine-payoff game: agent i receives sum_j x_i^T A^(ij) x_j + b^(ij).x_i + d^(ij).x_j + c^(ij).
class GeneralizedGame {
 public:
  struct LinearTerms {
    Vector b;
    Vector d;
    double c = 0.0;
  };

  GeneralizedGame(Polymatrix payoffs, std::vector<StrategySpace> spaces, Sigma sigma);

  /// The degenerate embedding b = d = c = 0 on simplices.
  static GeneralizedGame from_network(const NetworkGame& game);

  void set_linear_terms(int i, int j, LinearTerms terms);

  const Polymatrix& payoffs() const { return payoffs_; }
  Sigma sigma() const { return sigma_; }
  int agent_count() const { return payoffs_.agent_count(); }
  const StrategySpace& space(int i) const { return spaces_.at(i); }
  std::span<const StrategySpace> spaces() const { return spaces_; }
  const LinearTerms& linear_terms(int i, int j) const;

  /// sum_{j != i} b^(ij): the constant part of agent i's payoff gradient.
  const AgentVectors& drift() const { return drift_; }
  bool has_drift() const;

  /// Utility of agent i at profile x.
  double payoff(int i, const AgentVectors& x) const;

 private:
  Polymatrix payoffs_;
  std::vector<StrategySpace> spaces_;
  Sigma sigma_;
  std::vector<LinearTerms> linear_;
  AgentVectors drift_;
};

/// Non-owning view of either game type, as consumed by the dynamics and energy evaluators.
class GameRef {
 public:
  GameRef(const NetworkGame& game);      // NOLINT(google-explicit-constructor)
  GameRef(const GeneralizedGame& game);  // NOLINT(google-explicit-constructor)

  const Polymatrix& payoffs() const { return *payoffs_; }
  Sigma sigma() const { return sigma_; }
  int agent_count() const { return payoffs_->agent_count(); }

  /// Per-agent constant drift, nullptr for network games.
  const AgentVectors* drift() const { return drift_; }
  bool has_drift() const;

  /// The generalized game, if this view wraps one.
  const GeneralizedGame* generalized() const { return generalized_; }

  /// Strategy space of agent i (simplex for network games).
  StrategySpace space(int i) const;

 private:
  const Polymatrix* payoffs_;
  Sigma sigma_;
  const AgentVectors* drift_ = nullptr;
  const GeneralizedGame* generalized_ = nullptr;
};

/// Stable 64-bit FNV-1a fingerprint (hex) of shapes, matrices, linear terms, and sigma.
std::string game_hash(GameRef game);

}  // namespace hamgame
