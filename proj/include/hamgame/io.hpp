#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamgame/analysis.hpp"
#include "hamgame/dynamics.hpp"
#include "hamgame/game.hpp"
#include "hamgame/regularizer.hpp"

namespace hamgame {

/// Malformed game file; the message names the line or the offending field.
class ParseError : public StructuralError {
 public:
  using StructuralError::StructuralError;
};

struct LoadedGame {
  NetworkGame game;
  std::vector<std::string> ids;
  std::vector<Regularizer> regularizers;
  AgentVectors y0;  ///< zeros for agents without "y0"
  Classification classification;
  bool normalized = false;  ///< constant-sum input rewritten as zero-sum
  std::string source;
};

/// Reads {"agents": [...], "edges": [...], "sigma": -1 | 1 | "auto"}.
/// Edge endpoints may be agent ids or 0-based indices. A declared sigma that contradicts the
/// matrices is rejected, except that sigma = -1 on a constant-sum game normalizes it.
LoadedGame parse_game(const std::string& text, const std::string& source = "<string>");
LoadedGame load_game(const std::string& path);

/// "0.2,-0.2;0,0": agents separated by ';', coordinates by ','.
AgentVectors parse_inline_vectors(const std::string& text);

/// "%.17g"; empty for NaN.
std::string format_number(double v);

/// Header: t, x_<id>_<s> (s counted from 1), H, F, D.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& ids);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  ///< empty cells read as NaN
};

CsvTable read_csv(std::istream& is);

nlohmann::json vectors_to_json(const AgentVectors& v);
AgentVectors vectors_from_json(const nlohmann::json& j);

/// Sidecar metadata: game hash, integrator config, regularizers, y0, reference, diagnostic.
nlohmann::json trajectory_metadata_json(const Trajectory& traj, const AgentVectors& y0);

IntegratorConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EnergyDrift& d);
nlohmann::json to_json(const SeriesSummary& s);
nlohmann::json to_json(const MonotoneReport& m);
nlohmann::json to_json(const RecurrenceReport& r);
nlohmann::json to_json(const BoundaryReport& b);
nlohmann::json to_json(const VolumeReport& v);
/// Stable top-level keys: energy_drift, fenchel, bregman, recurrence, boundary, volume
/// (and monotone_energy for Euler runs). Absent sections are omitted.
nlohmann::json to_json(const AnalysisReport& report);

}  // namespace hamgame
