#pragma once

#include <span>
#include <vector>

#include "hamgame/game.hpp"
#include "hamgame/regularizer.hpp"

namespace hamgame {

/// A bipartite network game seen as a two-agent game between meta-agents that choose the
/// concatenated strategies of their side (strategy space: product of simplices).
class BipartiteReduction {
 public:
  const GeneralizedGame& meta_game() const { return meta_game_; }
  const Partition& partition() const { return partition_; }

  /// Per-agent vectors -> the two concatenated meta-agent vectors.
  AgentVectors join(const AgentVectors& per_agent) const;
  /// Inverse of join.
  AgentVectors split(const AgentVectors& meta) const;
  /// Product regularizers sum_{i in side} h_i for the two meta-agents.
  std::vector<Regularizer> regularizers(std::span<const Regularizer> per_agent) const;

 private:
  friend BipartiteReduction reduce_bipartite_to_two_agent(const NetworkGame&, const Partition&);
  BipartiteReduction(GeneralizedGame meta, Partition partition, std::vector<int> counts);

  GeneralizedGame meta_game_;
  Partition partition_;
  std::vector<int> counts_;
};

/// Block game [A^(ij)]_{i in N1, j in N2}. Throws StructuralError when the partition has an
/// intra-side edge or a side is empty.
BipartiteReduction reduce_bipartite_to_two_agent(const NetworkGame& game, const Partition& partition);

/// A 2x2 game rewritten on [0,1]^2 via x_{i2} = 1 - x_{i1}, with agent 2 rescaled so that the
/// interaction coefficients satisfy A^(12) = sigma (A^(21))^T.
struct TwoByTwoReduction {
  GeneralizedGame game;
  std::vector<Regularizer> regularizers;
  AgentVectors y0;
  Sigma sigma;
  double a1;     ///< a + d - b - c of agent 1's matrix
  double a2;     ///< alpha + delta - beta - gamma of agent 2's matrix
  double ratio;  ///< |a1| / |a2|, applied to agent 2's payoff, regularizer and y(0)

  /// Reduced strategies (x_11, x_21) -> full mixed strategies.
  static AgentVectors expand(const AgentVectors& reduced);
};

/// Throws StructuralError for non-2x2 input or regularizers not on a 2-simplex, and
/// UnsupportedGameError when a1 = 0 or a2 = 0.
TwoByTwoReduction reduce_2x2_to_generalized(const Polymatrix& game,
                                            std::span<const Regularizer> regularizers,
                                            const AgentVectors& y0);

}  // namespace hamgame
