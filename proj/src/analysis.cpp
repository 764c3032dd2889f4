#include "hamgame/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "hamgame/hamiltonian.hpp"

namespace hamgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double simplex_floor_euclidean(const Vector& x) {
  const Eigen::Index k = x.size();
  if (k < 2) return kInf;
  double best = kInf;
  for (Eigen::Index s = 0; s < k; ++s) {
    Vector rest(k - 1);
    rest << x.head(s), x.tail(k - 1 - s);
    const double dist = (rest - project_to_simplex(rest)).squaredNorm();
    best = std::min(best, x(s) * x(s) + dist);
  }
  return best;
}

double regularizer_floor(const Regularizer& reg, const Vector& x) {
  if (reg.is_product()) {
    double best = kInf;
    Eigen::Index offset = 0;
    for (const auto& f : reg.factors()) {
      best = std::min(best, regularizer_floor(f, x.segment(offset, f.dim())));
      offset += f.dim();
    }
    return best;
  }
  const bool entropy = reg.kind() == RegularizerKind::entropy;
  switch (reg.space().kind()) {
    case StrategySpace::Kind::simplex:
      return entropy ? kInf : reg.scale() * simplex_floor_euclidean(x);
    case StrategySpace::Kind::sub_simplex: {
      if (entropy) return kInf;
      Vector lifted(x.size() + 1);
      lifted << x, 1.0 - x.sum();
      return reg.scale() * simplex_floor_euclidean(lifted);
    }
    case StrategySpace::Kind::box: {
      // Faces x_s = 0 and x_s = 1 with the other coordinates at x*.
      double best = kInf;
      for (Eigen::Index s = 0; s < x.size(); ++s) {
        const double v = x(s);
        best = std::min(best, entropy ? v * std::log(v) - v + 1.0 : std::pow(std::min(v, 1.0 - v), 2));
      }
      return reg.scale() * best;
    }
    case StrategySpace::Kind::product:
      break;
  }
  throw StructuralError("floor_distance: unsupported strategy space " + reg.space().describe());
}

std::vector<double> time_series(const Trajectory& traj) {
  std::vector<double> t;
  t.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) t.push_back(s.state.t);
  return t;
}

double sup_distance(const AgentVectors& a, const AgentVectors& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size()) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  }
  return d;
}

}  // namespace

FloorEstimate floor_distance(RegularizerSet regs, const AgentVectors& x_star) {
  if (regs.size() != x_star.size()) throw StructuralError("floor_distance: one reference per agent");
  FloorEstimate est{{}, kInf, "exact face minimization"};
  for (std::size_t i = 0; i < regs.size(); ++i) {
    if (!regs[i].space().contains(x_star[i], 1e-12) || regs[i].space().interior_margin(x_star[i]) <= 0.0) {
      throw DomainError("reference of agent " + std::to_string(i) +
                        " is not fully mixed; the floor is trivially 0");
    }
    est.per_agent.push_back(regularizer_floor(regs[i], x_star[i]));
    est.joint = std::min(est.joint, est.per_agent.back());
  }
  return est;
}

EquilibriumReference make_reference(const Polymatrix& game, RegularizerSet regs, AgentVectors x_star,
                                    double tolerance) {
  MixedProfile profile(std::move(x_star));
  const double gap = verify_nash(game, profile, false);
  if (!(gap <= tolerance)) {
    throw DomainError("reference is not a Nash equilibrium (gap " + std::to_string(gap) + ")");
  }
  bool fully_mixed = true;
  for (const auto& v : profile.vectors()) fully_mixed = fully_mixed && v.minCoeff() > 0.0;
  FloorEstimate floor{std::vector<double>(profile.size(), 0.0), 0.0, "not fully mixed"};
  if (fully_mixed) floor = floor_distance(regs, profile.vectors());
  return {std::move(profile), fully_mixed, std::move(floor), gap};
}

std::optional<EnergyDrift> energy_drift(const Trajectory& traj) {
  if (traj.snapshots.empty() || !std::isfinite(traj.snapshots.front().energy)) return std::nullopt;
  const double h0 = traj.snapshots.front().energy;
  double worst = 0.0;
  for (const auto& s : traj.snapshots) worst = std::max(worst, std::abs(s.energy - h0));
  return EnergyDrift{h0, worst, worst / std::max(1.0, std::abs(h0))};
}

SeriesSummary summarize(const std::vector<double>& values) {
  SeriesSummary out;
  if (values.empty()) return out;
  out.initial = out.min = out.max = values.front();
  out.samples = static_cast<int>(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    out.min = std::min(out.min, values[k]);
    out.max = std::max(out.max, values[k]);
    out.max_deviation = std::max(out.max_deviation, std::abs(values[k] - out.initial));
    if (k == 0) continue;
    const double diff = values[k] - values[k - 1];
    out.max_decrease = std::max(out.max_decrease, -diff);
    out.max_increase = std::max(out.max_increase, diff);
    if (diff < -kMonotoneSlack) out.monotone = false;
  }
  return out;
}

FenchelBregmanReport fenchel_bregman_series(const Trajectory& traj, RegularizerSet regs,
                                            const AgentVectors& x_star) {
  if (regs.size() != x_star.size()) throw StructuralError("fenchel_bregman_series: one reference per agent");
  FenchelBregmanReport rep;
  std::vector<double> defined;
  std::vector<double> pairing;
  std::vector<double> half_gap;
  bool have_energy = true;
  rep.min_fenchel_minus_bregman = kInf;
  for (const auto& snap : traj.snapshots) {
    const SystemState& s = snap.state;
    double F = 0.0;
    double D = 0.0;
    double pair = 0.0;
    bool d_ok = true;
    for (std::size_t i = 0; i < regs.size(); ++i) {
      F += fenchel_coupling(regs[i], x_star[i], s.y[i]);
      pair += s.y[i].dot(x_star[i]);
      try {
        D += bregman_distance(regs[i], x_star[i], s.x[i]);
      } catch (const DomainError&) {
        d_ok = false;
      }
    }
    rep.fenchel.push_back(F);
    rep.bregman.push_back(d_ok ? D : kNaN);
    pairing.push_back(pair);
    if (std::isfinite(snap.energy)) {
      half_gap.push_back(F - 0.5 * snap.energy);
    } else {
      have_energy = false;
    }
    if (d_ok) {
      defined.push_back(D);
      rep.min_fenchel_minus_bregman = std::min(rep.min_fenchel_minus_bregman, F - D);
      double margin = kInf;
      for (std::size_t i = 0; i < regs.size(); ++i) {
        margin = std::min(margin, regs[i].space().interior_margin(s.x[i]));
      }
      if (margin > 0.0) {
        const double gap = std::abs(F - D);
        rep.max_fenchel_bregman_gap = std::max(rep.max_fenchel_bregman_gap, gap);
        if (gap > 1e-9 * std::max(1.0, std::abs(F))) rep.bregman_equals_fenchel = false;
      }
    } else {
      ++rep.bregman_unavailable;
    }
  }
  rep.fenchel_summary = summarize(rep.fenchel);
  rep.bregman_summary = summarize(defined);
  rep.pairing_deviation = summarize(pairing).max_deviation;
  rep.half_energy_gap_deviation = have_energy ? summarize(half_gap).max_deviation : kNaN;
  if (!std::isfinite(rep.min_fenchel_minus_bregman)) rep.min_fenchel_minus_bregman = kNaN;
  return rep;
}

MonotoneReport monotone_energy_check(const Trajectory& traj, RegularizerSet regs) {
  if (traj.metadata.config.scheme != Scheme::euler) {
    throw DomainError("monotone energy check applies to Euler (discrete FTRL) trajectories only, got " +
                      to_string(traj.metadata.config.scheme));
  }
  std::vector<double> energy;
  for (const auto& snap : traj.snapshots) energy.push_back(conjugate_sum(snap.state, regs));
  const SeriesSummary sum = summarize(energy);
  bool strict = true;
  for (std::size_t k = 2; k < energy.size(); ++k) strict = strict && energy[k] > energy[k - 1];
  const double total = energy.empty() ? 0.0 : energy.back() - energy.front();
  return {sum.monotone, sum.max_decrease, total, strict, sum.samples};
}

RecurrenceReport recurrence_report(const Trajectory& traj, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("recurrence epsilon must be positive");
  RecurrenceReport rep{epsilon, 0.0, {}};
  const auto& snaps = traj.snapshots;
  if (snaps.empty()) return rep;
  const double horizon = snaps.back().state.t;
  rep.warmup = 0.01 * horizon;
  const AgentVectors& x0 = snaps.front().state.x;
  std::vector<double> d;
  d.reserve(snaps.size());
  for (const auto& s : snaps) d.push_back(sup_distance(s.state.x, x0));
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (snaps[k].state.t < rep.warmup) continue;
    if (d[k] >= epsilon) continue;
    const bool left = k == 0 || d[k] <= d[k - 1];
    const bool right = k + 1 == d.size() || d[k] <= d[k + 1];
    if (left && right) rep.events.push_back({snaps[k].state.t, d[k]});
  }
  return rep;
}

BoundaryReport boundary_approach(const Trajectory& traj, RegularizerSet regs, int windows) {
  if (windows < 1) throw DomainError("boundary_approach needs at least one window");
  BoundaryReport rep{kInf, 0.0, std::vector<double>(windows, kInf), true, std::nullopt, 0.0};
  const auto& snaps = traj.snapshots;
  if (snaps.empty()) return rep;
  const auto times = time_series(traj);
  const double horizon = times.back();
  std::vector<double> fenchel;
  bool have_fenchel = true;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    double m = kInf;
    for (std::size_t i = 0; i < regs.size(); ++i) {
      m = std::min(m, regs[i].space().interior_margin(snaps[k].state.x[i]));
    }
    if (m < rep.min_coordinate) {
      rep.min_coordinate = m;
      rep.time_of_min = times[k];
    }
    int w = horizon > 0.0 ? static_cast<int>(times[k] / horizon * windows) : 0;
    w = std::clamp(w, 0, windows - 1);
    rep.window_minima[w] = std::min(rep.window_minima[w], m);
    if (std::isfinite(snaps[k].fenchel)) {
      fenchel.push_back(snaps[k].fenchel);
    } else {
      have_fenchel = false;
    }
  }
  // Windows without snapshots inherit the previous minimum.
  for (int w = 1; w < windows; ++w) {
    if (!std::isfinite(rep.window_minima[w])) rep.window_minima[w] = rep.window_minima[w - 1];
  }
  for (int w = 1; w < windows; ++w) {
    if (rep.window_minima[w] > rep.window_minima[w - 1] + 1e-12) rep.trend_decreasing = false;
  }
  if (have_fenchel && !fenchel.empty()) {
    const SeriesSummary s = summarize(fenchel);
    rep.fenchel_monotone = s.monotone;
    rep.fenchel_max_decrease = s.max_decrease;
  }
  return rep;
}

std::vector<AgentVectors> sample_ball(const AgentVectors& center, double radius, int count,
                                      std::uint64_t seed) {
  if (!(radius >= 0.0)) throw DomainError("ball radius must be nonnegative");
  if (count < 0) throw DomainError("sample count must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int dim = 0;
  for (const auto& v : center) dim += static_cast<int>(v.size());

  std::vector<AgentVectors> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    Vector g(dim);
    for (int k = 0; k < dim; ++k) g(k) = gauss(rng);
    const double r = radius * std::pow(unit(rng), 1.0 / std::max(dim, 1));
    const double norm = g.norm();
    if (norm > 0.0) g *= r / norm;
    AgentVectors y = center;
    int offset = 0;
    for (auto& v : y) {
      v += g.segment(offset, v.size());
      offset += static_cast<int>(v.size());
    }
    out.push_back(std::move(y));
  }
  return out;
}

int worker_threads() {
  if (const char* env = std::getenv("HAMGAME_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

Vector volume_coordinates(GameRef game, const AgentVectors& y) {
  std::vector<double> c;
  for (int i = 0; i < game.agent_count(); ++i) {
    const Vector& v = y[i];
    if (game.space(i).kind() == StrategySpace::Kind::simplex) {
      for (Eigen::Index s = 0; s + 1 < v.size(); ++s) c.push_back(v(s) - v(v.size() - 1));
    } else {
      for (Eigen::Index s = 0; s < v.size(); ++s) c.push_back(v(s));
    }
  }
  return Eigen::Map<Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
}

double sqrt_det_covariance(const Matrix& samples) {
  const Matrix centered = samples.rowwise() - samples.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
  const double det = cov.determinant();
  return det > 0.0 ? std::sqrt(det) : 0.0;
}

}  // namespace

VolumeReport volume_ratio(GameRef game, RegularizerSet regs, const std::vector<AgentVectors>& cloud,
                          const IntegratorConfig& config, int threads) {
  if (cloud.size() < 10) throw DomainError("volume_ratio needs a cloud of at least 10 members");
  config.validate();
  check_regularizers(game, regs);

  const int n = static_cast<int>(cloud.size());
  const int dim = static_cast<int>(volume_coordinates(game, cloud.front()).size());
  Matrix before(n, dim);
  Matrix after(n, dim);
  for (int k = 0; k < n; ++k) before.row(k) = volume_coordinates(game, cloud[k]).transpose();

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        const SystemState s = evolve(game, regs, cloud[k], config);
        after.row(k) = volume_coordinates(game, s.y).transpose();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads > 0 ? threads : worker_threads(), 1, n);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  VolumeReport rep{kNaN, n, dim, sqrt_det_covariance(before), sqrt_det_covariance(after), ""};
  if (!(rep.initial_volume > 0.0)) throw DomainError("initial cloud is degenerate (zero covariance volume)");
  rep.ratio = rep.final_volume / rep.initial_volume;
  rep.note = "covariance-determinant estimate over " + std::to_string(n) + " members in " +
             std::to_string(dim) + " payoff coordinates";
  if (n < 100) rep.note += "; fewer than 100 members, estimate is noisy";
  return rep;
}

AnalysisReport analyze_trajectory(const Trajectory& traj, RegularizerSet regs,
                                  const AgentVectors* x_star, double recurrence_epsilon) {
  AnalysisReport rep{energy_drift(traj), std::nullopt, std::nullopt,
                     recurrence_report(traj, recurrence_epsilon), boundary_approach(traj, regs),
                     std::nullopt};
  if (x_star) rep.fenchel = fenchel_bregman_series(traj, regs, *x_star);
  if (traj.metadata.config.scheme == Scheme::euler) rep.monotone = monotone_energy_check(traj, regs);
  return rep;
}

}  // namespace hamgame
