#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamgame/dynamics.hpp"
#include "hamgame/game.hpp"
#include "hamgame/regularizer.hpp"

namespace hamgame {

/// Slack applied to every "non-decreasing" check.
inline constexpr double kMonotoneSlack = 1e-10;

/// Lower bound d on the Bregman distance from x* to the relative boundary.
struct FloorEstimate {
  std::vector<double> per_agent;  ///< +inf when the boundary is at infinite distance
  double joint;                   ///< min over agents: the others may sit at x*
  std::string resolution;
};

/// Exact boundary minimum of D(x* || .) per agent. Euclidean: min over faces x_s = 0 of
/// x*_s^2 + dist^2(x*_{-s}, simplex), times the scale. Entropy: +inf on simplices (the divergence
/// blows up at every face). Throws DomainError if x* is not fully mixed.
FloorEstimate floor_distance(RegularizerSet regs, const AgentVectors& x_star);

/// Verified equilibrium together with its floor.
struct EquilibriumReference {
  MixedProfile profile;
  bool fully_mixed;
  FloorEstimate floor;
  double nash_gap;
};

/// Throws DomainError when verify_nash exceeds `tolerance`. The floor is only computed
/// (and only meaningful) for fully mixed profiles; otherwise it is zero.
EquilibriumReference make_reference(const Polymatrix& game, RegularizerSet regs, AgentVectors x_star,
                                    double tolerance = 1e-9);

struct EnergyDrift {
  double initial;
  double max_abs;   ///< max_t |H(t) - H(0)|
  double relative;  ///< max_abs / max(1, |H(0)|)
};

/// nullopt when the trajectory carries no energy (untagged game).
std::optional<EnergyDrift> energy_drift(const Trajectory& traj);

struct SeriesSummary {
  double initial = 0.0;
  double min = 0.0;
  double max = 0.0;
  double max_deviation = 0.0;  ///< max_t |v(t) - v(0)|
  double max_decrease = 0.0;   ///< largest drop between consecutive samples (>= 0)
  double max_increase = 0.0;   ///< largest rise between consecutive samples (>= 0)
  bool monotone = true;        ///< every consecutive difference >= -kMonotoneSlack
  int samples = 0;
};

SeriesSummary summarize(const std::vector<double>& values);

struct FenchelBregmanReport {
  std::vector<double> fenchel;
  std::vector<double> bregman;  ///< NaN where undefined (entropy boundary)
  SeriesSummary fenchel_summary;
  SeriesSummary bregman_summary;  ///< over defined samples only
  int bregman_unavailable = 0;
  double max_fenchel_bregman_gap = 0.0;  ///< max |F - D| over interior snapshots
  bool bregman_equals_fenchel = true;    ///< gap <= 1e-9 relative on interior snapshots
  double min_fenchel_minus_bregman = 0.0;
  /// max |(F - H/2)(t) - (F - H/2)(0)|; NaN without energy.
  double half_energy_gap_deviation = 0.0;
  /// max |sum_i <y_i(t), x*_i> - sum_i <y_i(0), x*_i>|
  double pairing_deviation = 0.0;
};

/// Recomputes F(x*, y(t)) and D(x* || x(t)) at every snapshot.
FenchelBregmanReport fenchel_bregman_series(const Trajectory& traj, RegularizerSet regs,
                                            const AgentVectors& x_star);

struct MonotoneReport {
  bool monotone;
  double max_decrease;
  double total_increase;
  /// Every step after the first strictly increases the energy.
  bool strictly_increasing_after_first;
  int samples;
};

/// Checks sum_i h*_i(y_i) along an Euler trajectory. Throws DomainError for other schemes.
MonotoneReport monotone_energy_check(const Trajectory& traj, RegularizerSet regs);

struct RecurrenceEvent {
  double t;
  double distance;
};

struct RecurrenceReport {
  double epsilon;
  double warmup;
  std::vector<RecurrenceEvent> events;
};

/// Local minima of ||x(t) - x(0)||_inf below epsilon, ignoring t < 1% of the horizon.
RecurrenceReport recurrence_report(const Trajectory& traj, double epsilon);

struct BoundaryReport {
  double min_coordinate;
  double time_of_min;
  /// Minimum coordinate over each of `windows` equal time windows.
  std::vector<double> window_minima;
  bool trend_decreasing;  ///< window minima non-increasing
  std::optional<bool> fenchel_monotone;
  double fenchel_max_decrease = 0.0;
};

/// Distance to the boundary measured by StrategySpace::interior_margin (the smallest
/// simplex coordinate on simplices).
BoundaryReport boundary_approach(const Trajectory& traj, RegularizerSet regs, int windows = 10);

/// Random initial payoffs drawn uniformly from the ball of `radius` around `center`
/// (joint over all agents' coordinates).
std::vector<AgentVectors> sample_ball(const AgentVectors& center, double radius, int count,
                                      std::uint64_t seed);

struct VolumeReport {
  double ratio;
  int members;
  int dimension;
  double initial_volume;  ///< sqrt det of the initial sample covariance
  double final_volume;
  std::string note;
};

/// Worker count: HAMGAME_THREADS if set and positive, else the hardware concurrency.
int worker_threads();

/// Evolves every member of the cloud and compares sqrt det of the sample covariance of the
/// payoff coordinates before and after. Simplex agents are measured in differences
/// y_is - y_ik, which remove the direction the choice map ignores. Throws DomainError for
/// fewer than 10 members or if any member blows up.
VolumeReport volume_ratio(GameRef game, RegularizerSet regs, const std::vector<AgentVectors>& cloud,
                          const IntegratorConfig& config, int threads = 0);

struct AnalysisReport {
  std::optional<EnergyDrift> energy_drift;
  std::optional<FenchelBregmanReport> fenchel;
  std::optional<MonotoneReport> monotone;
  RecurrenceReport recurrence;
  BoundaryReport boundary;
  std::optional<VolumeReport> volume;
};

/// Everything that can be computed from one trajectory.
AnalysisReport analyze_trajectory(const Trajectory& traj, RegularizerSet regs,
                                  const AgentVectors* x_star, double recurrence_epsilon = 1e-3);

}  // namespace hamgame
