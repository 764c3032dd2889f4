#include "hamgame/reduction.hpp"

#include <cmath>

namespace hamgame {

BipartiteReduction::BipartiteReduction(GeneralizedGame meta, Partition partition,
                                       std::vector<int> counts)
    : meta_game_(std::move(meta)), partition_(std::move(partition)), counts_(std::move(counts)) {}

AgentVectors BipartiteReduction::join(const AgentVectors& per_agent) const {
  if (per_agent.size() != counts_.size()) {
    throw StructuralError("join: expected one vector per original agent");
  }
  AgentVectors meta;
  for (const auto* side : {&partition_.first, &partition_.second}) {
    int total = 0;
    for (int a : *side) total += counts_[a];
    Vector v(total);
    int offset = 0;
    for (int a : *side) {
      if (per_agent[a].size() != counts_[a]) throw StructuralError("join: wrong vector length");
      v.segment(offset, counts_[a]) = per_agent[a];
      offset += counts_[a];
    }
    meta.push_back(std::move(v));
  }
  return meta;
}

AgentVectors BipartiteReduction::split(const AgentVectors& meta) const {
  if (meta.size() != 2) throw StructuralError("split: expected two meta-agent vectors");
  AgentVectors out(counts_.size());
  int side_index = 0;
  for (const auto* side : {&partition_.first, &partition_.second}) {
    int offset = 0;
    for (int a : *side) {
      out[a] = meta[side_index].segment(offset, counts_[a]);
      offset += counts_[a];
    }
    ++side_index;
  }
  return out;
}

std::vector<Regularizer> BipartiteReduction::regularizers(
    std::span<const Regularizer> per_agent) const {
  if (per_agent.size() != counts_.size()) {
    throw StructuralError("expected one regularizer per original agent");
  }
  std::vector<Regularizer> out;
  for (const auto* side : {&partition_.first, &partition_.second}) {
    std::vector<Regularizer> factors;
    for (int a : *side) factors.push_back(per_agent[a]);
    out.push_back(Regularizer::product(std::move(factors)));
  }
  return out;
}

BipartiteReduction reduce_bipartite_to_two_agent(const NetworkGame& game, const Partition& partition) {
  const Polymatrix& g = game.payoffs();
  check_partition(g, partition);
  if (partition.first.empty() || partition.second.empty()) {
    throw StructuralError("bipartite reduction needs two nonempty sides");
  }
  std::vector<int> counts(g.strategy_counts().begin(), g.strategy_counts().end());

  auto side_size = [&](const std::vector<int>& side) {
    int total = 0;
    for (int a : side) total += counts[a];
    return total;
  };
  const int k1 = side_size(partition.first);
  const int k2 = side_size(partition.second);

  auto block_matrix = [&](const std::vector<int>& rows, const std::vector<int>& cols, int nr, int nc) {
    Matrix M = Matrix::Zero(nr, nc);
    int r0 = 0;
    for (int i : rows) {
      int c0 = 0;
      for (int j : cols) {
        M.block(r0, c0, counts[i], counts[j]) = g.block(i, j);
        c0 += counts[j];
      }
      r0 += counts[i];
    }
    return M;
  };

  Polymatrix meta({k1, k2});
  meta.set_block(0, 1, block_matrix(partition.first, partition.second, k1, k2));
  meta.set_block(1, 0, block_matrix(partition.second, partition.first, k2, k1));

  std::vector<StrategySpace> spaces;
  for (const auto* side : {&partition.first, &partition.second}) {
    std::vector<StrategySpace> factors;
    for (int a : *side) factors.push_back(StrategySpace::simplex(counts[a]));
    spaces.push_back(StrategySpace::product(std::move(factors)));
  }
  return BipartiteReduction(GeneralizedGame(std::move(meta), std::move(spaces), game.sigma()),
                            partition, std::move(counts));
}

AgentVectors TwoByTwoReduction::expand(const AgentVectors& reduced) {
  AgentVectors out;
  for (const auto& v : reduced) {
    Vector full(2);
    full << v(0), 1.0 - v(0);
    out.push_back(std::move(full));
  }
  return out;
}

TwoByTwoReduction reduce_2x2_to_generalized(const Polymatrix& game,
                                            std::span<const Regularizer> regularizers,
                                            const AgentVectors& y0) {
  if (game.agent_count() != 2 || game.strategies(0) != 2 || game.strategies(1) != 2) {
    throw StructuralError("2x2 reduction needs two agents with two strategies each");
  }
  if (regularizers.size() != 2 || y0.size() != 2) {
    throw StructuralError("2x2 reduction needs two regularizers and two initial payoff vectors");
  }
  for (int i = 0; i < 2; ++i) {
    const auto& r = regularizers[i];
    if (r.is_product() || r.space() != StrategySpace::simplex(2)) {
      throw StructuralError("2x2 reduction needs regularizers on the 2-simplex");
    }
    if (y0[i].size() != 2) throw StructuralError("initial payoff vectors must have length 2");
  }

  const Matrix& A = game.block(0, 1);
  const Matrix& B = game.block(1, 0);
  const double a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
  const double alpha = B(0, 0), beta = B(0, 1), gamma = B(1, 0), delta = B(1, 1);

  const double a1 = a + d - b - c;
  const double a2 = alpha + delta - beta - gamma;
  if (a1 == 0.0 || a2 == 0.0) {
    throw UnsupportedGameError("trivial game: payoff independent of opponent interaction term");
  }
  const Sigma sigma = (a1 * a2 > 0.0) ? Sigma::coordination : Sigma::zero_sum;
  const double s = sigma_sign(sigma);
  const double ratio = std::abs(a1) / std::abs(a2);

  Polymatrix reduced({1, 1});
  reduced.set_block(0, 1, Matrix::Constant(1, 1, a1));
  // ratio * a2 = s * a1 in exact arithmetic; store the exact form.
  reduced.set_block(1, 0, Matrix::Constant(1, 1, s * a1));

  GeneralizedGame g(std::move(reduced), {StrategySpace::sub_simplex(1), StrategySpace::sub_simplex(1)},
                    sigma);
  g.set_linear_terms(0, 1, {Vector::Constant(1, b - d), Vector::Constant(1, c - d), d});
  g.set_linear_terms(1, 0, {Vector::Constant(1, ratio * (beta - delta)),
                            Vector::Constant(1, ratio * (gamma - delta)), ratio * delta});

  std::vector<Regularizer> regs{
      Regularizer(regularizers[0].kind(), StrategySpace::sub_simplex(1), regularizers[0].scale()),
      Regularizer(regularizers[1].kind(), StrategySpace::sub_simplex(1),
                  regularizers[1].scale() * ratio)};
  AgentVectors ybar{Vector::Constant(1, y0[0](0) - y0[0](1)),
                    Vector::Constant(1, ratio * (y0[1](0) - y0[1](1)))};
  return {std::move(g), std::move(regs), std::move(ybar), sigma, a1, a2, ratio};
}

}  // namespace hamgame
