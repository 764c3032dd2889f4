#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hamgame/dynamics.hpp"
#include "hamgame/hamiltonian.hpp"
#include "support.hpp"

using namespace hamgame;
using namespace testsupport;

namespace {

// Max deviation from the harmonic oracle over all snapshots.
double harmonic_error(const Trajectory& traj, const HarmonicOracle& o) {
  double worst = 0.0;
  for (const auto& s : traj.snapshots) {
    worst = std::max(worst, std::abs(s.state.x[0](0) - o.p(s.state.t)));
    worst = std::max(worst, std::abs(s.state.x[1](0) - o.q(s.state.t)));
  }
  return worst;
}

double final_error(const NetworkGame& g, Scheme scheme, double eta, double T) {
  const auto regs = regs_for(g.payoffs(), RegularizerKind::euclidean);
  IntegratorConfig cfg;
  cfg.scheme = scheme;
  cfg.step = eta;
  cfg.horizon = T;
  const SystemState s = evolve(g, regs, mp_y0(), cfg);
  const HarmonicOracle o{0.6, 0.5};
  return std::max(std::abs(s.x[0](0) - o.p(s.t)), std::abs(s.x[1](0) - o.q(s.t)));
}

}  // namespace

TEST_CASE("initial state and vector field on Matching Pennies") {
  const NetworkGame g = matching_pennies();
  const auto regs = regs_for(g.payoffs(), RegularizerKind::euclidean);
  const SystemState s = initial_state(g, regs, mp_y0());
  CHECK(s.t == 0.0);
  CHECK(s.X[0].isZero());
  CHECK(s.x[0](0) == doctest::Approx(0.6));
  CHECK(s.x[1](0) == doctest::Approx(0.5));
  const VectorField f = vector_field(s, g, regs);
  CHECK(f.dX[0](0) == doctest::Approx(0.6));
  CHECK(f.dy[0].cwiseAbs().maxCoeff() <= 1e-15);
  // agent 2 receives -A^T x_1 = -(0.2, -0.2)
  CHECK(f.dy[1](0) == doctest::Approx(-0.2));
  CHECK(f.dy[1](1) == doctest::Approx(0.2));

  CHECK_THROWS_AS(initial_state(g, regs, {vec({0, 0})}), StructuralError);
  CHECK_THROWS_AS(initial_state(g, regs, {vec({0, 0, 0}), vec({0, 0})}), StructuralError);
  CHECK_THROWS_AS(initial_state(g, regs, {vec({NAN, 0}), vec({0, 0})}), DomainError);
  const std::vector<Regularizer> wrong{Regularizer(RegularizerKind::entropy, StrategySpace::simplex(3)),
                                       Regularizer(RegularizerKind::entropy, StrategySpace::simplex(2))};
  CHECK_THROWS_AS(initial_state(g, wrong, mp_y0()), StructuralError);
}

TEST_CASE("zero-sum payoff flow is orthogonal to the strategies") {
  Gen gen(51);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.integer(2, 5);
    std::vector<int> counts;
    for (int i = 0; i < n; ++i) counts.push_back(gen.integer(2, 4));
    EdgeList edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (gen.uniform(0, 1) < 0.6) edges.emplace_back(i, j);
    const NetworkGame g = random_zero_sum(counts, edges, gen);
    const auto regs = regs_for(g.payoffs(), trial % 2 ? RegularizerKind::entropy : RegularizerKind::euclidean);
    const SystemState s = initial_state(g, regs, random_payoffs(g.payoffs(), gen, -2, 2));
    const VectorField f = vector_field(s, g, regs);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += s.x[i].dot(f.dy[i]);
    CHECK(std::abs(total) <= 1e-12);
  }
}

TEST_CASE("drift enters the payoff flow") {
  GeneralizedGame g = GeneralizedGame::from_network(matching_pennies());
  g.set_linear_terms(0, 1, {vec({1, -1}), vec({0, 0}), 0.0});
  const auto regs = regs_for(g.payoffs(), RegularizerKind::euclidean);
  const SystemState s = initial_state(g, regs, mp_y0());
  const VectorField f = vector_field(s, g, regs);
  CHECK(f.dy[0](0) == doctest::Approx(1.0));
  CHECK(f.dy[0](1) == doctest::Approx(-1.0));
}

TEST_CASE("Euler step matches the update rule") {
  const NetworkGame g = matching_pennies();
  const auto regs = regs_for(g.payoffs(), RegularizerKind::entropy);
  const SystemState s = initial_state(g, regs, {vec({0.3, -0.1}), vec({0.2, 0.0})});
  const SystemState e = step_euler(s, g, regs, 0.1);
  const Vector dy0 = g.block(0, 1) * s.x[1];
  CHECK((e.y[0] - (s.y[0] + 0.1 * dy0)).norm() <= 1e-15);
  CHECK((e.X[1] - 0.1 * s.x[1]).norm() <= 1e-15);
  CHECK((e.x[0] - choice_map(regs[0], e.y[0])).norm() <= 1e-15);
  CHECK_THROWS_AS(step_euler(s, g, regs, 0.0), DomainError);
  CHECK_THROWS_AS(step_euler(s, g, regs, -0.1), DomainError);
  CHECK_THROWS_AS(step_rk4(s, g, regs, NAN), DomainError);
  CHECK_THROWS_AS(step_symplectic(s, g, regs, 0.0), DomainError);
}

TEST_CASE("Euler keeps the interior equilibrium fixed") {
  const NetworkGame g = matching_pennies();
  const auto regs = regs_for(g.payoffs(), RegularizerKind::entropy);
  IntegratorConfig cfg;
  cfg.scheme = Scheme::euler;
  cfg.step = 0.1;
  cfg.horizon = 20.0;
  const SystemState s = evolve(g, regs, {vec({0, 0}), vec({0, 0})}, cfg);
  CHECK((s.x[0] - vec({0.5, 0.5})).norm() <= 1e-15);
  CHECK((s.x[1] - vec({0.5, 0.5})).norm() <= 1e-15);
}

TEST_CASE("Euler never decreases the conjugate sum on zero-sum games") {
  Gen gen(52);
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkGame g = random_zero_sum({2, 3, 2}, cycle_edges(3), gen);
    const auto regs = regs_for(g.payoffs(), trial % 2 ? RegularizerKind::entropy : RegularizerKind::euclidean);
    SystemState s = initial_state(g, regs, random_payoffs(g.payoffs(), gen, -1, 1));
    double prev = conjugate_sum(s, regs);
    for (int k = 0; k < 500; ++k) {
      s = step_euler(s, g, regs, 0.05);
      const double now = conjugate_sum(s, regs);
      CHECK(now >= prev - 1e-10);
      prev = now;
    }
  }
}

TEST_CASE("rk4 follows the harmonic Matching Pennies orbit") {
  const NetworkGame g = matching_pennies();
  const auto regs = regs_for(g.payoffs(), RegularizerKind::euclidean);
  IntegratorConfig cfg;
  cfg.step = 2 * std::numbers::pi / 6000;
  cfg.horizon = 2 * std::numbers::pi;
  cfg.snapshot_stride = 1;
  const Trajectory traj = simulate(g, regs, mp_y0(), cfg);
  CHECK(harmonic_error(traj, {0.6, 0.5}) <= 1e-6);
  const auto& last = traj.snapshots.back().state;
  CHECK(last.t == doctest::Approx(2 * std::numbers::pi).epsilon(1e-12));
  CHECK(std::abs(last.x[0](0) - 0.6) <= 1e-6);
  CHECK(std::abs(last.x[1](0) - 0.5) <= 1e-6);
}

TEST_CASE("convergence orders against the harmonic oracle") {
  const NetworkGame g = matching_pennies();
  const double rk_ratio = final_error(g, Scheme::rk4, 0.1, 1.0) / final_error(g, Scheme::rk4, 0.05, 1.0);
  CHECK(rk_ratio > 12.0);
  CHECK(rk_ratio < 20.0);
  const double lf_ratio =
      final_error(g, Scheme::leapfrog, 0.1, 1.0) / final_error(g, Scheme::leapfrog, 0.05, 1.0);
  CHECK(lf_ratio > 3.0);
  CHECK(lf_ratio < 5.0);
  const double eu_ratio =
      final_error(g, Scheme::euler, 0.01, 1.0) / final_error(g, Scheme::euler, 0.005, 1.0);
  CHECK(eu_ratio > 1.6);
  CHECK(eu_ratio < 2.4);
}

TEST_CASE("leapfrog is time reversible") {
  Gen gen(53);
  for (int trial = 0; trial < 5; ++trial) {
    const NetworkGame g = trial % 2 ? random_coordination({2, 3}, {{0, 1}}, gen)
                                    : random_zero_sum({2, 3, 2}, {{0, 1}, {1, 2}}, gen);
    const auto regs = regs_for(g.payoffs(), RegularizerKind::entropy);
    const SystemState start = initial_state(g, regs, random_payoffs(g.payoffs(), gen, -0.5, 0.5));
    SystemState s = start;
    for (int k = 0; k < 1000; ++k) s = step_symplectic(s, g, regs, 0.01);
    CHECK(max_abs_diff(s.y, start.y) > 1e-3);
    for (int k = 0; k < 1000; ++k) s = step_symplectic(s, g, regs, -0.01);
    CHECK(max_abs_diff(s.y, start.y) <= 1e-12);
    CHECK(max_abs_diff(s.X, start.X) <= 1e-12);
  }
}

TEST_CASE("leapfrog energy error stays bounded") {
  Gen gen(54);
  const NetworkGame g = random_zero_sum({2, 3, 2}, {{0, 1}, {1, 2}}, gen);
  const auto regs = regs_for(g.payoffs(), RegularizerKind::entropy);
  IntegratorConfig cfg;
  cfg.scheme = Scheme::leapfrog;
  cfg.step = 0.01;
  cfg.horizon = 200.0;
  const Trajectory traj = simulate(g, regs, random_payoffs(g.payoffs(), gen, -0.5, 0.5), cfg);
  const double H0 = traj.snapshots.front().energy;
  double first = 0.0, second = 0.0;
  for (const auto& s : traj.snapshots) {
    double& half = s.state.t <= 100.0 ? first : second;
    half = std::max(half, std::abs(s.energy - H0));
  }
  CHECK(first <= 1e-3);
  CHECK(second <= 2 * first);

  IntegratorConfig general = cfg;
  CHECK_THROWS_AS(simulate(NetworkGame(g.payoffs(), Sigma::general), regs,
                           random_payoffs(g.payoffs(), gen, -0.5, 0.5), general),
                  UnsupportedGameError);
}

TEST_CASE("integrator configuration") {
  IntegratorConfig c;
  c.step = 0.1;
  c.horizon = 2 * std::numbers::pi;
  CHECK(c.step_count() == 63);
  c.horizon = 1.0;
  CHECK(c.step_count() == 10);
  c.horizon = 0.0;
  CHECK(c.step_count() == 0);
  CHECK_NOTHROW(c.validate());
  c.horizon = 0.05;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.horizon = 1.0;
  c.snapshot_stride = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.snapshot_stride = 1;
  c.step = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);

  CHECK(parse_scheme("rk4") == Scheme::rk4);
  CHECK(parse_scheme("euler") == Scheme::euler);
  CHECK(parse_scheme("symplectic") == Scheme::leapfrog);
  CHECK(parse_scheme("leapfrog") == Scheme::leapfrog);
  CHECK_THROWS_AS(parse_scheme("rk45"), DomainError);
  CHECK(to_string(Scheme::leapfrog) == "leapfrog");
}

TEST_CASE("snapshot bookkeeping") {
  const NetworkGame g = matching_pennies();
  const auto regs = regs_for(g.payoffs(), RegularizerKind::euclidean);
  IntegratorConfig cfg;
  cfg.step = 0.01;
  cfg.horizon = 1.0;
  cfg.snapshot_stride = 10;
  const Trajectory t = simulate(g, regs, mp_y0(), cfg);
  CHECK(t.snapshots.size() == 11);
  CHECK_FALSE(t.truncated());
  CHECK(t.metadata.game_hash == game_hash(g));
  CHECK(std::isnan(t.snapshots[0].fenchel));

  cfg.snapshot_stride = 30;
  CHECK(simulate(g, regs, mp_y0(), cfg).snapshots.size() == 5);  // 0, 30, 60, 90, 100

  cfg.horizon = 0.0;
  const Trajectory zero = simulate(g, regs, mp_y0(), cfg);
  REQUIRE(zero.snapshots.size() == 1);
  CHECK(zero.snapshots[0].state.t == 0.0);

  const AgentVectors ref{vec({0.5, 0.5}), vec({0.5, 0.5})};
  cfg.horizon = 1.0;
  const Trajectory with_ref = simulate(g, regs, mp_y0(), cfg, &ref);
  CHECK(std::isfinite(with_ref.snapshots[0].fenchel));
  CHECK(std::isfinite(with_ref.snapshots[0].bregman));
  const AgentVectors outside{vec({0.7, 0.7}), vec({0.5, 0.5})};
  CHECK_THROWS_AS(simulate(g, regs, mp_y0(), cfg, &outside), DomainError);
}

TEST_CASE("blow-up truncates with a diagnostic") {
  Polymatrix p({2, 2});
  p.set_block(0, 1, mat({{1e15, 0}, {0, 1e15}}));
  p.set_block(1, 0, mat({{1e15, 0}, {0, 1e15}}));
  const NetworkGame g(p, Sigma::coordination);
  const auto regs = regs_for(p, RegularizerKind::entropy);
  IntegratorConfig cfg;
  cfg.horizon = 1.0;
  const Trajectory t = simulate(g, regs, mp_y0(), cfg);
  REQUIRE(t.truncated());
  CHECK(t.diagnostic->step == 2);  // 5e11 after one step, past 1e12 after two
  CHECK_FALSE(t.diagnostic->message.empty());
  CHECK(t.snapshots.size() == 1);
  CHECK_THROWS_AS(evolve(g, regs, mp_y0(), cfg), DomainError);
}

TEST_CASE("payoffs are reconstructed from positions") {
  Gen gen(55);
  for (Scheme scheme : {Scheme::euler, Scheme::rk4}) {
    const NetworkGame g = random_zero_sum({2, 3, 2, 3}, cycle_edges(4), gen);
    const auto regs = regs_for(g.payoffs(), RegularizerKind::entropy);
    IntegratorConfig cfg;
    cfg.scheme = scheme;
    cfg.step = 0.01;
    cfg.horizon = 20.0;
    cfg.snapshot_stride = 100;
    const Trajectory t = simulate(g, regs, random_payoffs(g.payoffs(), gen, -1, 1), cfg);
    for (const auto& s : t.snapshots) CHECK(reconstruction_residual(s.state, g) <= 1e-10);
  }
  GeneralizedGame drift = GeneralizedGame::from_network(matching_pennies());
  drift.set_linear_terms(0, 1, {vec({0.3, -0.1}), vec({0, 0}), 0.0});
  const auto regs = regs_for(drift.payoffs(), RegularizerKind::entropy);
  IntegratorConfig cfg;
  cfg.horizon = 5.0;
  const SystemState s = evolve(drift, regs, mp_y0(), cfg);
  CHECK(reconstruction_residual(s, drift) <= 1e-10);
}
