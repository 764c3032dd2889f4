#include "hamgame/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hamgame {

std::string to_string(EnergyVariant variant) {
  switch (variant) {
    case EnergyVariant::two_agent: return "two-agent";
    case EnergyVariant::bipartite: return "bipartite";
    case EnergyVariant::network: return "network";
    case EnergyVariant::generalized: return "generalized";
    case EnergyVariant::generalized_bipartite: return "generalized-bipartite";
  }
  return "unknown";
}

namespace {

std::vector<int> all_agents(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// momentum: agents whose y is a coordinate. position: agents entering via reconstructed payoffs.
EnergyReading sided_energy(const SystemState& s, GameRef game, const std::vector<int>& momentum,
                           const std::vector<int>& position, RegularizerSet regs, EnergyVariant variant) {
  const double sigma = sigma_sign(game.sigma());
  EnergyReading e{variant, 0.0, 0.0, 0.0, 0.0, 0.0};
  for (int i : momentum) e.kinetic += conjugate_value(regs[i], s.y[i]);
  for (int j : position) e.potential -= sigma * conjugate_value(regs[j], reconstructed_payoff(s, game, j));
  if (const AgentVectors* b = game.drift()) {
    for (int i : momentum) e.linear -= (*b)[i].dot(s.X[i]);
    for (int j : position) e.compensation += sigma * (*b)[j].dot(s.X[j]);
  }
  e.value = e.kinetic + e.potential + e.linear + e.compensation;
  return e;
}

void require_no_drift(GameRef game) {
  if (game.has_drift()) {
    throw StructuralError("game has linear payoff terms; use the generalized energy");
  }
}

void require_state(const SystemState& s, GameRef game, RegularizerSet regs) {
  check_regularizers(game, regs);
  if (!s.y_initial || static_cast<int>(s.y.size()) != game.agent_count() ||
      s.X.size() != s.y.size()) {
    throw StructuralError("state does not match the game");
  }
}

}  // namespace

EnergyReading energy_two_agent(const SystemState& state, GameRef game, RegularizerSet regs) {
  if (game.agent_count() != 2) throw StructuralError("two-agent energy needs exactly two agents");
  require_no_drift(game);
  require_state(state, game, regs);
  return sided_energy(state, game, {0}, {1}, regs, EnergyVariant::two_agent);
}

EnergyReading energy_bipartite(const SystemState& state, GameRef game, const Partition& partition,
                               RegularizerSet regs) {
  require_no_drift(game);
  require_state(state, game, regs);
  check_partition(game.payoffs(), partition);
  return sided_energy(state, game, partition.first, partition.second, regs, EnergyVariant::bipartite);
}

EnergyReading energy_network(const SystemState& state, GameRef game, RegularizerSet regs) {
  require_no_drift(game);
  require_state(state, game, regs);
  const auto all = all_agents(game.agent_count());
  return sided_energy(state, game, all, all, regs, EnergyVariant::network);
}

EnergyReading energy_generalized(const SystemState& state, const GeneralizedGame& game,
                                 RegularizerSet regs) {
  require_state(state, game, regs);
  const auto all = all_agents(game.agent_count());
  return sided_energy(state, game, all, all, regs, EnergyVariant::generalized);
}

EnergyReading energy_generalized_bipartite(const SystemState& state, const GeneralizedGame& game,
                                           const Partition& partition, RegularizerSet regs) {
  require_state(state, game, regs);
  check_partition(game.payoffs(), partition);
  return sided_energy(state, game, partition.first, partition.second, regs,
                      EnergyVariant::generalized_bipartite);
}

double conjugate_sum(const SystemState& state, RegularizerSet regs) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.y.size(); ++i) total += conjugate_value(regs[i], state.y[i]);
  return total;
}

EnergyChart select_chart(GameRef game) {
  sigma_sign(game.sigma());  // throws for untagged games
  const int n = game.agent_count();
  EnergyChart chart{game.has_drift() ? EnergyVariant::generalized : EnergyVariant::network,
                    all_agents(n), all_agents(n), ""};
  if (game.sigma() != Sigma::coordination) return chart;
  if (auto p = bipartite_partition(game.payoffs()); p && !p->first.empty() && !p->second.empty()) {
    chart.momentum = p->first;
    chart.position = p->second;
    if (game.has_drift()) {
      chart.variant = EnergyVariant::generalized_bipartite;
    } else {
      chart.variant = n == 2 ? EnergyVariant::two_agent : EnergyVariant::bipartite;
    }
  } else {
    chart.note = "coordination, non-bipartite: network energy identically zero";
  }
  return chart;
}

EnergyReading canonical_energy(const SystemState& state, GameRef game, RegularizerSet regs) {
  const EnergyChart chart = select_chart(game);
  require_state(state, game, regs);
  return sided_energy(state, game, chart.momentum, chart.position, regs, chart.variant);
}

StructureReport verify_hamiltonian_structure(const SystemState& state, GameRef game,
                                             RegularizerSet regs) {
  const EnergyChart chart = select_chart(game);
  require_state(state, game, regs);
  for (int i = 0; i < game.agent_count(); ++i) {
    if (game.space(i).interior_margin(state.x[i]) < kStructureBoundaryMargin) {
      throw DomainError("state too close to the boundary for agent " + std::to_string(i));
    }
  }

  auto H = [&](const SystemState& s) {
    return sided_energy(s, game, chart.momentum, chart.position, regs, chart.variant).hamiltonian();
  };
  const VectorField field = vector_field(state, game, regs);

  StructureReport report{chart.variant, 0.0, 0.0, 0, chart.note};
  SystemState probe = state;
  for (int i : chart.momentum) {
    for (Eigen::Index k = 0; k < state.y[i].size(); ++k) {
      const double hy = kFiniteDifferenceStep * std::max(1.0, std::abs(state.y[i](k)));
      probe.y[i](k) = state.y[i](k) + hy;
      const double up = H(probe);
      probe.y[i](k) = state.y[i](k) - hy;
      const double down = H(probe);
      probe.y[i](k) = state.y[i](k);
      report.position_residual =
          std::max(report.position_residual, std::abs((up - down) / (2 * hy) - field.dX[i](k)));

      const double hx = kFiniteDifferenceStep * std::max(1.0, std::abs(state.X[i](k)));
      probe.X[i](k) = state.X[i](k) + hx;
      const double right = H(probe);
      probe.X[i](k) = state.X[i](k) - hx;
      const double left = H(probe);
      probe.X[i](k) = state.X[i](k);
      report.motion_residual =
          std::max(report.motion_residual, std::abs(-(right - left) / (2 * hx) - field.dy[i](k)));
      report.coordinates += 2;
    }
  }
  return report;
}

}  // namespace hamgame
