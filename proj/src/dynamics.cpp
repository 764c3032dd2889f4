#include "hamgame/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hamgame/hamiltonian.hpp"

namespace hamgame {

namespace {

AgentVectors strategies_of(RegularizerSet regs, const AgentVectors& y) {
  AgentVectors x;
  x.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x.push_back(choice_map(regs[i], y[i]));
  return x;
}

/// dy_i/dt given current strategies.
AgentVectors payoff_field(GameRef game, const AgentVectors& x) {
  const Polymatrix& g = game.payoffs();
  AgentVectors dy;
  dy.reserve(x.size());
  for (int i = 0; i < g.agent_count(); ++i) {
    Vector v = g.payoff_vector(i, x);
    if (game.drift()) v += (*game.drift())[i];
    dy.push_back(std::move(v));
  }
  return dy;
}

/// sum_j A^(ij) x~_j + b_i with x~_j the strategies implied by the positions X at time t.
AgentVectors position_force(const SystemState& s, GameRef game, RegularizerSet regs) {
  const int n = game.agent_count();
  AgentVectors implied;
  implied.reserve(n);
  for (int j = 0; j < n; ++j) implied.push_back(choice_map(regs[j], reconstructed_payoff(s, game, j)));
  return payoff_field(game, implied);
}

void axpy(AgentVectors& out, double a, const AgentVectors& v) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * v[i];
}

bool blown_up(const SystemState& s, std::string& why) {
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    if (!s.y[i].allFinite() || !s.X[i].allFinite() || !s.x[i].allFinite()) {
      why = "non-finite state for agent " + std::to_string(i);
      return true;
    }
    if (s.y[i].size() && s.y[i].cwiseAbs().maxCoeff() > kBlowUpThreshold) {
      why = "payoff magnitude exceeded blow-up threshold for agent " + std::to_string(i);
      return true;
    }
  }
  return false;
}

void require_step(double eta) {
  if (!std::isfinite(eta) || eta == 0.0) throw DomainError("step size must be finite and nonzero");
}

}  // namespace

void check_regularizers(GameRef game, RegularizerSet regs) {
  const int n = game.agent_count();
  if (static_cast<int>(regs.size()) != n) {
    throw StructuralError("expected " + std::to_string(n) + " regularizers, got " +
                          std::to_string(regs.size()));
  }
  for (int i = 0; i < n; ++i) {
    if (!(regs[i].space() == game.space(i))) {
      throw StructuralError("regularizer of agent " + std::to_string(i) + " lives on " +
                            regs[i].space().describe() + " but the agent plays on " +
                            game.space(i).describe());
    }
  }
}

SystemState initial_state(GameRef game, RegularizerSet regs, AgentVectors y0) {
  check_regularizers(game, regs);
  const int n = game.agent_count();
  if (static_cast<int>(y0.size()) != n) throw StructuralError("y0 needs one vector per agent");
  for (int i = 0; i < n; ++i) {
    if (y0[i].size() != game.payoffs().strategies(i)) {
      throw StructuralError("y0 of agent " + std::to_string(i) + " has wrong length");
    }
  }
  if (!all_finite(y0)) throw DomainError("initial payoffs must be finite");
  SystemState s;
  s.t = 0.0;
  s.X = zeros_like(y0);
  s.x = strategies_of(regs, y0);
  s.y = y0;
  s.y_initial = std::make_shared<const AgentVectors>(std::move(y0));
  return s;
}

VectorField vector_field(const SystemState& state, GameRef game, RegularizerSet regs) {
  if (!all_finite(state.y) || !all_finite(state.X)) throw DomainError("vector_field: non-finite state");
  const AgentVectors x = strategies_of(regs, state.y);
  return {x, payoff_field(game, x)};
}

SystemState step_euler(const SystemState& state, GameRef game, RegularizerSet regs, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("Euler step size must be positive");
  const VectorField f = vector_field(state, game, regs);
  SystemState next = state;
  axpy(next.y, eta, f.dy);
  axpy(next.X, eta, f.dX);
  next.t = state.t + eta;
  next.x = strategies_of(regs, next.y);
  return next;
}

SystemState step_rk4(const SystemState& state, GameRef game, RegularizerSet regs, double eta) {
  require_step(eta);
  // The field depends on y only; X integrates the stage strategies.
  auto stage = [&](const AgentVectors& y) {
    const AgentVectors x = strategies_of(regs, y);
    return VectorField{x, payoff_field(game, x)};
  };
  const VectorField k1 = stage(state.y);
  AgentVectors y2 = state.y;
  axpy(y2, 0.5 * eta, k1.dy);
  const VectorField k2 = stage(y2);
  AgentVectors y3 = state.y;
  axpy(y3, 0.5 * eta, k2.dy);
  const VectorField k3 = stage(y3);
  AgentVectors y4 = state.y;
  axpy(y4, eta, k3.dy);
  const VectorField k4 = stage(y4);

  SystemState next = state;
  for (std::size_t i = 0; i < next.y.size(); ++i) {
    next.y[i] += eta / 6.0 * (k1.dy[i] + 2.0 * k2.dy[i] + 2.0 * k3.dy[i] + k4.dy[i]);
    next.X[i] += eta / 6.0 * (k1.dX[i] + 2.0 * k2.dX[i] + 2.0 * k3.dX[i] + k4.dX[i]);
  }
  next.t = state.t + eta;
  next.x = strategies_of(regs, next.y);
  return next;
}

SystemState step_symplectic(const SystemState& state, GameRef game, RegularizerSet regs, double eta) {
  require_step(eta);
  if (game.sigma() == Sigma::general) {
    throw UnsupportedGameError("no Hamiltonian structure certified: game is neither zero-sum nor coordination");
  }
  SystemState next = state;
  axpy(next.y, 0.5 * eta, position_force(next, game, regs));
  axpy(next.X, eta, strategies_of(regs, next.y));
  next.t = state.t + eta;
  axpy(next.y, 0.5 * eta, position_force(next, game, regs));
  next.x = strategies_of(regs, next.y);
  return next;
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::euler: return "euler";
    case Scheme::rk4: return "rk4";
    case Scheme::leapfrog: return "leapfrog";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "euler") return Scheme::euler;
  if (name == "rk4") return Scheme::rk4;
  if (name == "leapfrog" || name == "symplectic" || name == "symplectic_leapfrog") {
    return Scheme::leapfrog;
  }
  throw DomainError("unknown scheme '" + name + "' (expected euler, rk4 or leapfrog)");
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("step size eta must be positive");
  if (snapshot_stride < 1) throw DomainError("snapshot stride must be positive");
  if (!std::isfinite(horizon) || horizon < 0.0) throw DomainError("horizon must be nonnegative");
  if (horizon > 0.0 && horizon < step) throw DomainError("horizon must be at least one step");
}

long IntegratorConfig::step_count() const {
  if (horizon == 0.0) return 0;
  return static_cast<long>(std::ceil(horizon / step - 1e-9));
}

SystemState advance(const SystemState& state, GameRef game, RegularizerSet regs, Scheme scheme,
                    double eta) {
  switch (scheme) {
    case Scheme::euler: return step_euler(state, game, regs, eta);
    case Scheme::rk4: return step_rk4(state, game, regs, eta);
    case Scheme::leapfrog: return step_symplectic(state, game, regs, eta);
  }
  throw DomainError("unknown scheme");
}

namespace {

Snapshot instrument(const SystemState& s, GameRef game, RegularizerSet regs,
                    const AgentVectors* reference) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Snapshot snap{s, nan, conjugate_sum(s, regs), nan, nan};
  if (game.sigma() != Sigma::general) {
    snap.energy = canonical_energy(s, game, regs).value;
  }
  if (reference) {
    double F = 0.0;
    double D = 0.0;
    bool d_defined = true;
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      F += fenchel_coupling(regs[i], (*reference)[i], s.y[i]);
      try {
        D += bregman_distance(regs[i], (*reference)[i], s.x[i]);
      } catch (const DomainError&) {
        d_defined = false;
      }
    }
    snap.fenchel = F;
    snap.bregman = d_defined ? D : nan;
  }
  return snap;
}

}  // namespace

Trajectory simulate(GameRef game, RegularizerSet regs, const AgentVectors& y0,
                    const IntegratorConfig& config, const AgentVectors* reference) {
  config.validate();
  SystemState state = initial_state(game, regs, y0);
  if (config.scheme == Scheme::leapfrog && game.sigma() == Sigma::general) {
    throw UnsupportedGameError("no Hamiltonian structure certified: leapfrog needs a zero-sum or coordination game");
  }
  if (reference) {
    if (reference->size() != y0.size()) throw StructuralError("reference needs one vector per agent");
    for (std::size_t i = 0; i < y0.size(); ++i) {
      if (!regs[i].space().contains((*reference)[i], 1e-9)) {
        throw DomainError("reference strategy of agent " + std::to_string(i) + " is outside its space");
      }
    }
  }

  Trajectory traj;
  traj.metadata.game_hash = game_hash(game);
  traj.metadata.config = config;
  for (const auto& r : regs) traj.metadata.regularizer_kinds.push_back(r.name());
  if (reference) traj.reference = *reference;

  traj.snapshots.push_back(instrument(state, game, regs, reference));
  const long steps = config.step_count();
  for (long k = 1; k <= steps; ++k) {
    SystemState next = advance(state, game, regs, config.scheme, config.step);
    next.t = static_cast<double>(k) * config.step;
    std::string why;
    if (blown_up(next, why)) {
      traj.diagnostic = Diagnostic{k, next.t, why};
      break;
    }
    state = std::move(next);
    if (k % config.snapshot_stride == 0 || k == steps) {
      traj.snapshots.push_back(instrument(state, game, regs, reference));
    }
  }
  return traj;
}

SystemState evolve(GameRef game, RegularizerSet regs, const AgentVectors& y0,
                   const IntegratorConfig& config) {
  config.validate();
  SystemState state = initial_state(game, regs, y0);
  const long steps = config.step_count();
  for (long k = 1; k <= steps; ++k) {
    state = advance(state, game, regs, config.scheme, config.step);
    state.t = static_cast<double>(k) * config.step;
    std::string why;
    if (blown_up(state, why)) {
      std::ostringstream os;
      os << why << " at step " << k;
      throw DomainError(os.str());
    }
  }
  return state;
}

Vector reconstructed_payoff(const SystemState& state, GameRef game, int j) {
  const Polymatrix& g = game.payoffs();
  Vector v = state.initial_payoffs()[j];
  for (int i = 0; i < g.agent_count(); ++i) {
    if (i != j) v.noalias() += g.block(j, i) * state.X[i];
  }
  if (game.drift()) v += state.t * (*game.drift())[j];
  return v;
}

double reconstruction_residual(const SystemState& state, GameRef game) {
  double worst = 0.0;
  for (int j = 0; j < game.agent_count(); ++j) {
    const Vector r = state.y[j] - reconstructed_payoff(state, game, j);
    if (r.size()) worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace hamgame
