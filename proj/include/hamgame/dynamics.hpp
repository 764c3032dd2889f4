#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hamgame/game.hpp"
#include "hamgame/regularizer.hpp"
#include "hamgame/types.hpp"

namespace hamgame {

using RegularizerSet = std::span<const Regularizer>;

/// Phase-space point of the learning system.
///
/// y_i is the cumulative payoff vector (motion), X_i the cumulative strategy (position,
/// X_i(0) = 0), and x_i = choice_map(h_i, y_i) the current strategy, always recomputed from y_i.
struct SystemState {
  double t = 0.0;
  AgentVectors y;
  AgentVectors X;
  AgentVectors x;
  /// y(0), shared by every state of a trajectory.
  std::shared_ptr<const AgentVectors> y_initial;

  const AgentVectors& initial_payoffs() const { return *y_initial; }
};

/// State at t = 0 with X = 0 and x = choice_map(y0). Validates shapes against the game.
SystemState initial_state(GameRef game, RegularizerSet regs, AgentVectors y0);

/// Throws StructuralError if the regularizers do not match the game's strategy spaces.
void check_regularizers(GameRef game, RegularizerSet regs);

struct VectorField {
  AgentVectors dX;
  AgentVectors dy;
};

/// dX_i/dt = x_i, dy_i/dt = sum_{j != i} A^(ij) x_j (+ sum_j b^(ij) for generalized games).
VectorField vector_field(const SystemState& state, GameRef game, RegularizerSet regs);

/// Discrete-time FTRL: y' = y + eta dy/dt, X' = X + eta x (pre-step x). Requires eta > 0.
SystemState step_euler(const SystemState& state, GameRef game, RegularizerSet regs, double eta);

/// Classical fourth-order Runge-Kutta on the joint (X, y) field.
SystemState step_rk4(const SystemState& state, GameRef game, RegularizerSet regs, double eta);

/// Kick-drift-kick leapfrog for H(X, y) = sum_i h*_i(y_i) + V(X, t), where the force on y_i
/// is evaluated at the strategies reconstructed from X. Accepts negative eta (time reversal).
/// Throws UnsupportedGameError for games without a sigma tag.
SystemState step_symplectic(const SystemState& state, GameRef game, RegularizerSet regs, double eta);

enum class Scheme { euler, rk4, leapfrog };
std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::rk4;
  double step = 1e-3;
  double horizon = 10.0;
  int snapshot_stride = 10;

  /// Throws DomainError unless step > 0, stride > 0, and horizon is 0 or >= step.
  void validate() const;
  /// ceil(horizon / step), tolerant to round-off in the quotient.
  long step_count() const;
};

SystemState advance(const SystemState& state, GameRef game, RegularizerSet regs, Scheme scheme,
                    double eta);

/// Components with |y| above this truncate a simulation.
inline constexpr double kBlowUpThreshold = 1e12;

struct Snapshot {
  SystemState state;
  double energy;         ///< canonical_energy value; NaN for untagged games
  double conjugate_sum;  ///< sum_i h*_i(y_i)
  double fenchel;        ///< F(x*, y); NaN without a reference
  double bregman;        ///< D(x* || x); NaN without a reference or on an entropy boundary
};

struct Diagnostic {
  long step;
  double t;
  std::string message;
};

struct TrajectoryMetadata {
  std::string game_hash;
  IntegratorConfig config;
  std::vector<std::string> regularizer_kinds;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  TrajectoryMetadata metadata;
  std::optional<AgentVectors> reference;
  std::optional<Diagnostic> diagnostic;  ///< set when the run was truncated

  bool truncated() const { return diagnostic.has_value(); }
};

/// Iterates the configured stepper from (t = 0, X = 0, y = y0), recording every
/// snapshot_stride-th state and the final one. With a reference profile, each snapshot also
/// carries the Fenchel coupling and Bregman distance to it. A non-finite value or |y| above
/// kBlowUpThreshold stops the run and records a diagnostic.
Trajectory simulate(GameRef game, RegularizerSet regs, const AgentVectors& y0,
                    const IntegratorConfig& config, const AgentVectors* reference = nullptr);

/// Final state only, no instruments. Throws DomainError on blow-up.
SystemState evolve(GameRef game, RegularizerSet regs, const AgentVectors& y0,
                   const IntegratorConfig& config);

/// max_i || y_i - y_i(0) - sum_j A^(ij) X_j - b_i t ||_inf
double reconstruction_residual(const SystemState& state, GameRef game);

/// y_j(0) + sum_{i != j} A^(ji) X_i + b_j t, the payoff vector implied by the positions.
Vector reconstructed_payoff(const SystemState& state, GameRef game, int j);

}  // namespace hamgame
