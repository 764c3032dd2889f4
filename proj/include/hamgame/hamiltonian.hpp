#pragma once

#include <string>
#include <vector>

#include "hamgame/dynamics.hpp"
#include "hamgame/game.hpp"

namespace hamgame {

enum class EnergyVariant { two_agent, bipartite, network, generalized, generalized_bipartite };
std::string to_string(EnergyVariant variant);

/// value = kinetic + potential + linear + compensation.
///
/// kinetic      sum over momentum agents of h*_i(y_i(t))
/// potential    -sigma sum over position-side agents of h*_j(y_j(0) + sum_i A^(ji) X_i(t) [+ b_j t])
/// linear       -sum over momentum agents of b_i . X_i(t)
/// compensation +sigma sum over position-side agents of b_j . X_j(t)
///
/// The first three terms form the time-dependent Hamiltonian whose partial derivatives
/// generate the dynamics (see hamiltonian()). With nonzero drift b that function has an
/// explicit time dependence whose rate is sigma sum_j b_j . x_j; the compensation term cancels
/// it so that `value` is conserved. Without drift both terms are zero.
struct EnergyReading {
  EnergyVariant variant;
  double value;
  double kinetic;
  double potential;
  double linear;
  double compensation;

  double hamiltonian() const { return kinetic + potential + linear; }
};

/// h*_1(y_1) - sigma h*_2(y_2(0) + A^(21) X_1). Two agents, no drift.
EnergyReading energy_two_agent(const SystemState& state, GameRef game, RegularizerSet regs);

/// Energy seen from side N1 of a bipartite game. No drift.
EnergyReading energy_bipartite(const SystemState& state, GameRef game, const Partition& partition,
                               RegularizerSet regs);

/// sum_i h*_i(y_i) - sigma sum_j h*_j(y_j(0) + sum_{i != j} A^(ji) X_i). No drift.
EnergyReading energy_network(const SystemState& state, GameRef game, RegularizerSet regs);

/// Network energy of a generalized game, including the drift terms.
EnergyReading energy_generalized(const SystemState& state, const GeneralizedGame& game,
                                 RegularizerSet regs);

/// One-sided energy of a two-agent or bipartite generalized game.
EnergyReading energy_generalized_bipartite(const SystemState& state, const GeneralizedGame& game,
                                           const Partition& partition, RegularizerSet regs);

/// The chart used for instrumentation and structure checks: the network chart for zero-sum
/// games, the one-sided bipartite chart for bipartite coordination games, and the network chart
/// (energy identically zero on trajectories) for non-bipartite coordination games.
struct EnergyChart {
  EnergyVariant variant;
  std::vector<int> momentum;  ///< agents whose y_i are coordinates
  std::vector<int> position;  ///< agents entering through reconstructed payoffs
  std::string note;
};

/// Throws UnsupportedGameError for untagged games.
EnergyChart select_chart(GameRef game);

/// Energy in the chart chosen by select_chart.
EnergyReading canonical_energy(const SystemState& state, GameRef game, RegularizerSet regs);

/// sum_i h*_i(y_i): the energy of the discrete-time divergence argument.
double conjugate_sum(const SystemState& state, RegularizerSet regs);

/// Residuals of Hamilton's equations measured by central finite differences of
/// EnergyReading::hamiltonian():
///   position_residual = max | dH/dy_i - dX_i/dt |
///   motion_residual   = max | -dH/dX_i - dy_i/dt |
/// over the coordinates of the chosen chart.
struct StructureReport {
  EnergyVariant variant;
  double position_residual;
  double motion_residual;
  int coordinates;
  std::string note;

  double max_residual() const { return std::max(position_residual, motion_residual); }
};

/// Relative finite-difference step used by verify_hamiltonian_structure.
inline constexpr double kFiniteDifferenceStep = 1e-6;

/// States whose strategies come closer than this to the relative boundary are rejected.
inline constexpr double kStructureBoundaryMargin = 1e-6;

/// Uses the chart of select_chart. Throws UnsupportedGameError for untagged games and
/// DomainError for states too close to the boundary.
StructureReport verify_hamiltonian_structure(const SystemState& state, GameRef game,
                                             RegularizerSet regs);

}  // namespace hamgame
