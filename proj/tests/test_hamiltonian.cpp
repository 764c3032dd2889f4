#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hamgame/hamiltonian.hpp"
#include "hamgame/reduction.hpp"
#include "support.hpp"

using namespace hamgame;
using namespace testsupport;

namespace {

// Conjugate by direct maximization: euclidean via the bisection oracle, entropy via logsumexp.
double conjugate_oracle(RegularizerKind kind, double scale, const Vector& y) {
  if (kind == RegularizerKind::entropy) return logsumexp_conjugate(scale, y);
  const Vector x = euclidean_bisection(scale, y);
  return x.dot(y) - h_direct(kind, scale, x);
}

IntegratorConfig rk4(double T, int stride = 100) {
  IntegratorConfig c;
  c.horizon = T;
  c.snapshot_stride = stride;
  return c;
}

double relative_drift(const Trajectory& t) {
  const double H0 = t.snapshots.front().energy;
  double worst = 0.0;
  for (const auto& s : t.snapshots) worst = std::max(worst, std::abs(s.energy - H0));
  return worst / std::max(1.0, std::abs(H0));
}

// Coordination 2x2 game with unequal diagonal, so its reduction carries drift.
Polymatrix lopsided_coordination() {
  Polymatrix p({2, 2});
  p.set_block(0, 1, mat({{2, 0}, {0, 1}}));
  p.set_block(1, 0, mat({{2, 0}, {0, 1}}));
  return p;
}

}  // namespace

TEST_CASE("energies at t = 0 match the conjugate oracle") {
  for (auto kind : {RegularizerKind::euclidean, RegularizerKind::entropy}) {
    const NetworkGame g = matching_pennies();
    const auto regs = regs_for(g.payoffs(), kind);
    const SystemState s = initial_state(g, regs, mp_y0());
    const double c0 = conjugate_oracle(kind, 1.0, mp_y0()[0]);
    const double c1 = conjugate_oracle(kind, 1.0, mp_y0()[1]);

    const EnergyReading net = energy_network(s, g, regs);
    CHECK(net.kinetic == doctest::Approx(c0 + c1).epsilon(1e-9));
    CHECK(net.potential == doctest::Approx(c0 + c1).epsilon(1e-9));
    CHECK(net.value == doctest::Approx(2 * (c0 + c1)).epsilon(1e-9));
    CHECK(net.linear == 0.0);
    CHECK(net.compensation == 0.0);

    const EnergyReading two = energy_two_agent(s, g, regs);
    CHECK(two.value == doctest::Approx(c0 + c1).epsilon(1e-9));
    CHECK(conjugate_sum(s, regs) == doctest::Approx(c0 + c1).epsilon(1e-9));
  }
  // euclidean by hand: h*(0.2,-0.2) = 0.04 - 0.52, h*(0,0) = -0.5
  const NetworkGame g = matching_pennies();
  const auto regs = regs_for(g.payoffs(), RegularizerKind::euclidean);
  CHECK(energy_network(initial_state(g, regs, mp_y0()), g, regs).value == doctest::Approx(-1.96));
}

TEST_CASE("coordination network energy vanishes identically") {
  Gen gen(61);
  for (int trial = 0; trial < 5; ++trial) {
    const NetworkGame g = random_coordination({2, 3, 2}, cycle_edges(3), gen);
    const auto regs = regs_for(g.payoffs(), RegularizerKind::entropy);
    const Trajectory t = simulate(g, regs, random_payoffs(g.payoffs(), gen, -1, 1), rk4(5.0));
    for (const auto& s : t.snapshots) {
      const EnergyReading e = energy_network(s.state, g, regs);
      CHECK(std::abs(e.value) <= 1e-12 * std::max(1.0, std::abs(e.kinetic)));
    }
  }
}

TEST_CASE("bipartite energy equals the two-agent energy of the block game") {
  Gen gen(62);
  for (int trial = 0; trial < 6; ++trial) {
    const NetworkGame g = trial % 2 ? random_coordination({2, 3, 2}, {{0, 1}, {0, 2}}, gen)
                                    : random_zero_sum({2, 2, 3, 2}, cycle_edges(4), gen);
    const Partition part = *bipartite_partition(g.payoffs());
    const auto red = reduce_bipartite_to_two_agent(g, part);
    const auto regs = regs_for(g.payoffs(), trial % 3 ? RegularizerKind::entropy : RegularizerKind::euclidean);
    const auto meta_regs = red.regularizers(regs);
    const AgentVectors y0 = random_payoffs(g.payoffs(), gen, -0.5, 0.5);
    const Trajectory a = simulate(g, regs, y0, rk4(5.0, 500));
    const Trajectory b = simulate(red.meta_game(), meta_regs, red.join(y0), rk4(5.0, 500));
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
      const double lhs = energy_bipartite(a.snapshots[k].state, g, part, regs).value;
      const double rhs = energy_two_agent(b.snapshots[k].state, red.meta_game(), meta_regs).value;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("generalized energy without drift equals the network energy") {
  Gen gen(63);
  const NetworkGame g = random_zero_sum({2, 3, 2}, cycle_edges(3), gen);
  const GeneralizedGame gg = GeneralizedGame::from_network(g);
  const auto regs = regs_for(g.payoffs(), RegularizerKind::entropy);
  const Trajectory t = simulate(g, regs, random_payoffs(g.payoffs(), gen, -1, 1), rk4(3.0));
  for (const auto& s : t.snapshots) {
    CHECK(energy_generalized(s.state, gg, regs).value ==
          doctest::Approx(energy_network(s.state, g, regs).value).epsilon(1e-14));
  }
}

TEST_CASE("chart selection") {
  Gen gen(64);
  const EnergyChart zs = select_chart(matching_pennies());
  CHECK(zs.variant == EnergyVariant::network);
  CHECK(zs.note.empty());

  const NetworkGame co2(lopsided_coordination(), Sigma::coordination);
  CHECK(select_chart(co2).variant == EnergyVariant::two_agent);
  CHECK(select_chart(co2).momentum == std::vector<int>{0});

  const NetworkGame star = random_coordination({2, 3, 2}, {{0, 1}, {0, 2}}, gen);
  CHECK(select_chart(star).variant == EnergyVariant::bipartite);

  const NetworkGame tri = random_coordination({2, 2, 2}, cycle_edges(3), gen);
  const EnergyChart t = select_chart(tri);
  CHECK(t.variant == EnergyVariant::network);
  CHECK(t.note == "coordination, non-bipartite: network energy identically zero");

  const auto red = reduce_2x2_to_generalized(lopsided_coordination(),
                                             regs_for(lopsided_coordination(), RegularizerKind::entropy),
                                             mp_y0());
  CHECK(red.game.has_drift());
  CHECK(select_chart(red.game).variant == EnergyVariant::generalized_bipartite);
  const auto mp = reduce_2x2_to_generalized(mp_payoffs(), regs_for(mp_payoffs(), RegularizerKind::entropy), mp_y0());
  CHECK(select_chart(mp.game).variant == EnergyVariant::generalized);

  CHECK(to_string(EnergyVariant::generalized_bipartite) == "generalized-bipartite");
  CHECK(to_string(EnergyVariant::two_agent) == "two-agent");
}

TEST_CASE("energy is conserved along rk4 trajectories for every chart") {
  Gen gen(65);
  for (auto kind : {RegularizerKind::entropy, RegularizerKind::euclidean}) {
    const NetworkGame net = random_zero_sum({2, 3, 2}, cycle_edges(3), gen);
    const auto net_regs = regs_for(net.payoffs(), kind);
    const Trajectory a = simulate(net, net_regs, random_payoffs(net.payoffs(), gen, -0.3, 0.3), rk4(10.0));
    CHECK(relative_drift(a) <= 1e-6);

    const NetworkGame two(lopsided_coordination(), Sigma::coordination);
    const auto two_regs = regs_for(two.payoffs(), kind);
    const Trajectory b = simulate(two, two_regs, {vec({0.1, 0}), vec({0, 0.05})}, rk4(10.0));
    CHECK(relative_drift(b) <= 1e-6);

    const NetworkGame star = random_coordination({2, 3, 2}, {{0, 1}, {0, 2}}, gen);
    const auto star_regs = regs_for(star.payoffs(), kind, 3.0);
    const Trajectory c = simulate(star, star_regs, random_payoffs(star.payoffs(), gen, -0.3, 0.3), rk4(10.0));
    CHECK(relative_drift(c) <= 1e-6);

    const auto mp = reduce_2x2_to_generalized(mp_payoffs(), regs_for(mp_payoffs(), kind), mp_y0());
    const Trajectory d = simulate(mp.game, mp.regularizers, mp.y0, rk4(10.0));
    CHECK(relative_drift(d) <= 1e-6);

    const auto co = reduce_2x2_to_generalized(lopsided_coordination(),
                                              regs_for(lopsided_coordination(), kind, 3.0), mp_y0());
    const Trajectory e = simulate(co.game, co.regularizers, co.y0, rk4(10.0));
    CHECK(relative_drift(e) <= 1e-6);
  }
}

TEST_CASE("finite differences of the energy reproduce the vector field") {
  Gen gen(66);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto kind = trial % 2 ? RegularizerKind::entropy : RegularizerKind::euclidean;
    std::vector<NetworkGame> games{random_zero_sum({2, 3, 2}, cycle_edges(3), gen),
                                   random_coordination({2, 3}, {{0, 1}}, gen),
                                   random_coordination({2, 3, 2}, {{0, 1}, {0, 2}}, gen)};
    for (const auto& g : games) {
      const auto regs = regs_for(g.payoffs(), kind, kind == RegularizerKind::euclidean ? 10.0 : 3.0);
      const SystemState s =
          evolve(g, regs, random_payoffs(g.payoffs(), gen, -0.2, 0.2), rk4(gen.uniform(0.5, 3.0)));
      bool interior = true;
      for (const auto& x : s.x) interior = interior && x.minCoeff() > 1e-3;
      if (!interior) continue;
      const StructureReport r = verify_hamiltonian_structure(s, g, regs);
      CHECK(r.max_residual() <= 1e-6);
      CHECK(r.coordinates > 0);
      ++checked;
    }
    const auto mp = reduce_2x2_to_generalized(mp_payoffs(), regs_for(mp_payoffs(), kind), mp_y0());
    const SystemState s = evolve(mp.game, mp.regularizers, mp.y0, rk4(1.5));
    CHECK(verify_hamiltonian_structure(s, mp.game, mp.regularizers).max_residual() <= 1e-6);
  }
  CHECK(checked >= 20);
}

TEST_CASE("energy evaluators reject unsupported input") {
  const NetworkGame general(mp_payoffs(), Sigma::general);
  const auto regs = regs_for(mp_payoffs(), RegularizerKind::entropy);
  const SystemState s = initial_state(general, regs, mp_y0());
  CHECK_THROWS_AS(select_chart(general), UnsupportedGameError);
  CHECK_THROWS_AS(canonical_energy(s, general, regs), UnsupportedGameError);
  CHECK_THROWS_AS(verify_hamiltonian_structure(s, general, regs), UnsupportedGameError);

  const auto mp = reduce_2x2_to_generalized(mp_payoffs(), regs, mp_y0());
  const SystemState r = initial_state(mp.game, mp.regularizers, mp.y0);
  CHECK_THROWS_AS(energy_network(r, mp.game, mp.regularizers), StructuralError);
  CHECK_THROWS_AS(energy_two_agent(r, mp.game, mp.regularizers), StructuralError);

  Gen gen(67);
  const NetworkGame tri = random_zero_sum({2, 2, 2}, cycle_edges(3), gen);
  const auto tri_regs = regs_for(tri.payoffs(), RegularizerKind::entropy);
  const SystemState t = initial_state(tri, tri_regs, random_payoffs(tri.payoffs(), gen, -1, 1));
  CHECK_THROWS_AS(energy_bipartite(t, tri, {{0, 2}, {1}}, tri_regs), StructuralError);
  CHECK_THROWS_AS(energy_two_agent(t, tri, tri_regs), StructuralError);
}

TEST_CASE("structure check rejects states on the boundary") {
  const NetworkGame g = matching_pennies();
  const auto regs = regs_for(g.payoffs(), RegularizerKind::euclidean);
  const SystemState s = initial_state(g, regs, {vec({5, -5}), vec({0, 0})});
  CHECK(s.x[0](1) == 0.0);
  CHECK_THROWS_AS(verify_hamiltonian_structure(s, g, regs), DomainError);
}
