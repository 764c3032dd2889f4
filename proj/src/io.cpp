#include "hamgame/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace hamgame {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& where, const std::string& what) {
  throw ParseError(source + ": " + where + ": " + what);
}

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) line += text[k] == '\n';
  return line;
}

double number_at(const json& j, const std::string& source, const std::string& where) {
  if (!j.is_number()) fail(source, where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(source, where, "expected a finite number");
  return v;
}

Vector vector_at(const json& j, const std::string& source, const std::string& where) {
  if (!j.is_array()) fail(source, where, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = number_at(j[k], source, where + "[" + std::to_string(k) + "]");
  }
  return v;
}

std::string id_string(const json& j) {
  return j.is_string() ? j.get<std::string>() : j.dump();
}

}  // namespace

LoadedGame parse_game(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source, "line " + std::to_string(line_of(text, e.byte > 0 ? e.byte - 1 : 0)), e.what());
  }
  if (!doc.is_object()) fail(source, "top level", "expected an object");
  if (!doc.contains("agents") || !doc["agents"].is_array() || doc["agents"].empty()) {
    fail(source, "agents", "expected a nonempty array");
  }

  std::vector<std::string> ids;
  std::vector<int> counts;
  std::vector<Regularizer> regs;
  AgentVectors y0;
  std::map<std::string, int> index_of;
  const json& agents = doc["agents"];
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const std::string where = "agents[" + std::to_string(a) + "]";
    const json& ag = agents[a];
    if (!ag.is_object()) fail(source, where, "expected an object");
    const std::string id = ag.contains("id") ? id_string(ag["id"]) : std::to_string(a);
    if (index_of.count(id)) fail(source, where + ".id", "duplicate agent id '" + id + "'");
    if (!ag.contains("strategies") || !ag["strategies"].is_number_integer() ||
        ag["strategies"].get<long>() < 1) {
      fail(source, where + ".strategies", "expected a positive integer");
    }
    const int k = ag["strategies"].get<int>();
    RegularizerKind kind = RegularizerKind::entropy;
    if (ag.contains("regularizer")) {
      if (!ag["regularizer"].is_string()) fail(source, where + ".regularizer", "expected a string");
      try {
        kind = parse_regularizer_kind(ag["regularizer"].get<std::string>());
      } catch (const Error& e) {
        fail(source, where + ".regularizer", e.what());
      }
    }
    double scale = 1.0;
    if (ag.contains("scale")) {
      scale = number_at(ag["scale"], source, where + ".scale");
      if (!(scale > 0.0)) fail(source, where + ".scale", "expected a positive number");
    }
    Vector y = Vector::Zero(k);
    if (ag.contains("y0")) {
      y = vector_at(ag["y0"], source, where + ".y0");
      if (y.size() != k) fail(source, where + ".y0", "expected " + std::to_string(k) + " entries");
    }
    index_of[id] = static_cast<int>(a);
    ids.push_back(id);
    counts.push_back(k);
    regs.emplace_back(kind, StrategySpace::simplex(k), scale);
    y0.push_back(std::move(y));
  }

  Polymatrix poly(counts);
  std::map<std::pair<int, int>, bool> seen;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) fail(source, "edges", "expected an array");
    const json& edges = doc["edges"];
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::string where = "edges[" + std::to_string(e) + "]";
      const json& ed = edges[e];
      if (!ed.is_object() || !ed.contains("i") || !ed.contains("j") || !ed.contains("A")) {
        fail(source, where, "expected an object with i, j and A");
      }
      auto endpoint = [&](const char* key) {
        const json& v = ed[key];
        const std::string name = id_string(v);
        if (auto it = index_of.find(name); it != index_of.end()) return it->second;
        if (v.is_number_integer()) {
          const long idx = v.get<long>();
          if (idx >= 0 && idx < static_cast<long>(ids.size())) return static_cast<int>(idx);
        }
        fail(source, where + "." + key, "unknown agent '" + name + "'");
      };
      const int i = endpoint("i");
      const int j = endpoint("j");
      if (i == j) fail(source, where, "self-loop on agent '" + ids[i] + "'");
      if (seen[{i, j}]) fail(source, where, "edge (" + ids[i] + ", " + ids[j] + ") listed twice");
      seen[{i, j}] = true;
      const json& rows = ed["A"];
      if (!rows.is_array() || rows.size() != static_cast<std::size_t>(counts[i])) {
        fail(source, where + ".A", "expected " + std::to_string(counts[i]) + " rows");
      }
      Matrix A(counts[i], counts[j]);
      for (int r = 0; r < counts[i]; ++r) {
        const Vector row = vector_at(rows[r], source, where + ".A[" + std::to_string(r) + "]");
        if (row.size() != counts[j]) {
          fail(source, where + ".A[" + std::to_string(r) + "]", "expected " + std::to_string(counts[j]) + " columns");
        }
        A.row(r) = row.transpose();
      }
      poly.set_block(i, j, std::move(A));
    }
  }

  std::string declared = "auto";
  if (doc.contains("sigma")) {
    const json& s = doc["sigma"];
    if (s.is_string() && s.get<std::string>() == "auto") {
      declared = "auto";
    } else if (s.is_number_integer() && (s.get<int>() == -1 || s.get<int>() == 1)) {
      declared = s.get<int>() == -1 ? "-1" : "1";
    } else {
      fail(source, "sigma", "expected -1, 1 or \"auto\"");
    }
  }

  const Classification cls = classify_game(poly);
  auto build = [&](Sigma sigma) { return NetworkGame(poly, sigma); };
  auto result = [&](NetworkGame g, bool normalized) {
    return LoadedGame{std::move(g), ids, regs, y0, cls, normalized, source};
  };
  if (declared == "-1") {
    if (satisfies_zero_sum(poly)) return result(build(Sigma::zero_sum), false);
    if (cls.game_class == GameClass::constant_sum) return result(normalize_constant_sum(poly), true);
    fail(source, "sigma", "declared -1 but the game is " + to_string(cls.game_class));
  }
  if (declared == "1") {
    if (satisfies_coordination(poly)) return result(build(Sigma::coordination), false);
    fail(source, "sigma", "declared 1 but the game is " + to_string(cls.game_class));
  }
  switch (cls.game_class) {
    case GameClass::zero_sum: return result(build(Sigma::zero_sum), false);
    case GameClass::coordination: return result(build(Sigma::coordination), false);
    case GameClass::constant_sum: return result(normalize_constant_sum(poly), true);
    case GameClass::general: break;
  }
  return result(build(Sigma::general), false);
}

LoadedGame load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game(buf.str(), path);
}

AgentVectors parse_inline_vectors(const std::string& text) {
  AgentVectors out;
  std::stringstream agents(text);
  std::string part;
  while (std::getline(agents, part, ';')) {
    std::vector<double> vals;
    std::stringstream coords(part);
    std::string tok;
    while (std::getline(coords, tok, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw ParseError("cannot parse number '" + tok + "' in '" + text + "'");
      }
      if (tok.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
        throw ParseError("cannot parse number '" + tok + "' in '" + text + "'");
      }
      vals.push_back(v);
    }
    out.push_back(Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  if (out.empty()) throw ParseError("empty vector list");
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& ids) {
  os << "t";
  if (!traj.snapshots.empty()) {
    const AgentVectors& x = traj.snapshots.front().state.x;
    if (ids.size() != x.size()) throw StructuralError("write_trajectory_csv: one id per agent");
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (Eigen::Index s = 0; s < x[i].size(); ++s) os << ",x_" << ids[i] << "_" << s + 1;
    }
  }
  os << ",H,F,D\n";
  for (const auto& snap : traj.snapshots) {
    os << format_number(snap.state.t);
    for (const auto& v : snap.state.x) {
      for (Eigen::Index s = 0; s < v.size(); ++s) os << "," << format_number(v(s));
    }
    os << "," << format_number(snap.energy) << "," << format_number(snap.fenchel) << ","
       << format_number(snap.bregman) << "\n";
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(is, line)) throw ParseError("csv: missing header");
  table.header = split(line);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw ParseError("csv line " + std::to_string(lineno) + ": expected " +
                       std::to_string(table.header.size()) + " cells");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      if (c.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw ParseError("csv line " + std::to_string(lineno) + ": bad number '" + c + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

json vectors_to_json(const AgentVectors& v) {
  json out = json::array();
  for (const auto& a : v) out.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  return out;
}

AgentVectors vectors_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array of vectors");
  AgentVectors out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(vector_at(j[k], "json", "[" + std::to_string(k) + "]"));
  return out;
}

json trajectory_metadata_json(const Trajectory& traj, const AgentVectors& y0) {
  const auto& c = traj.metadata.config;
  json j;
  j["game_hash"] = traj.metadata.game_hash;
  j["config"] = {{"scheme", to_string(c.scheme)}, {"eta", c.step}, {"horizon", c.horizon},
                 {"stride", c.snapshot_stride}};
  j["regularizers"] = traj.metadata.regularizer_kinds;
  j["y0"] = vectors_to_json(y0);
  j["reference"] = traj.reference ? vectors_to_json(*traj.reference) : json(nullptr);
  j["snapshots"] = traj.snapshots.size();
  j["final_t"] = traj.snapshots.empty() ? 0.0 : traj.snapshots.back().state.t;
  if (traj.diagnostic) {
    j["diagnostic"] = {{"step", traj.diagnostic->step}, {"t", traj.diagnostic->t},
                       {"message", traj.diagnostic->message}};
  } else {
    j["diagnostic"] = nullptr;
  }
  return j;
}

IntegratorConfig config_from_json(const json& j) {
  IntegratorConfig c;
  try {
    c.scheme = parse_scheme(j.at("scheme").get<std::string>());
    c.step = j.at("eta").get<double>();
    c.horizon = j.at("horizon").get<double>();
    c.snapshot_stride = j.at("stride").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("sidecar config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const EnergyDrift& d) {
  return {{"initial", d.initial}, {"max_abs", d.max_abs}, {"relative", d.relative}};
}

json to_json(const SeriesSummary& s) {
  return {{"initial", s.initial},         {"min", s.min},
          {"max", s.max},                 {"max_deviation", s.max_deviation},
          {"max_decrease", s.max_decrease}, {"max_increase", s.max_increase},
          {"monotone", s.monotone},       {"samples", s.samples}};
}

json to_json(const MonotoneReport& m) {
  return {{"monotone", m.monotone},
          {"max_decrease", m.max_decrease},
          {"total_increase", m.total_increase},
          {"strictly_increasing_after_first", m.strictly_increasing_after_first},
          {"samples", m.samples}};
}

json to_json(const RecurrenceReport& r) {
  json events = json::array();
  for (const auto& e : r.events) events.push_back({{"t", e.t}, {"distance", e.distance}});
  return {{"epsilon", r.epsilon}, {"warmup", r.warmup}, {"events", events}};
}

json to_json(const BoundaryReport& b) {
  json j = {{"min_coordinate", b.min_coordinate},
            {"time_of_min", b.time_of_min},
            {"window_minima", b.window_minima},
            {"trend_decreasing", b.trend_decreasing}};
  if (b.fenchel_monotone) {
    j["fenchel_monotone"] = *b.fenchel_monotone;
    j["fenchel_max_decrease"] = b.fenchel_max_decrease;
  }
  return j;
}

json to_json(const VolumeReport& v) {
  return {{"ratio", v.ratio},
          {"members", v.members},
          {"dimension", v.dimension},
          {"initial_volume", v.initial_volume},
          {"final_volume", v.final_volume},
          {"note", v.note}};
}

json to_json(const AnalysisReport& report) {
  json j = json::object();
  if (report.energy_drift) j["energy_drift"] = to_json(*report.energy_drift);
  if (report.fenchel) {
    const auto& f = *report.fenchel;
    j["fenchel"] = to_json(f.fenchel_summary);
    j["fenchel"]["half_energy_gap_deviation"] = f.half_energy_gap_deviation;
    j["fenchel"]["pairing_deviation"] = f.pairing_deviation;
    j["bregman"] = to_json(f.bregman_summary);
    j["bregman"]["unavailable"] = f.bregman_unavailable;
    j["bregman"]["equals_fenchel_on_interior"] = f.bregman_equals_fenchel;
    j["bregman"]["max_fenchel_gap"] = f.max_fenchel_bregman_gap;
  }
  if (report.monotone) j["monotone_energy"] = to_json(*report.monotone);
  j["recurrence"] = to_json(report.recurrence);
  j["boundary"] = to_json(report.boundary);
  if (report.volume) j["volume"] = to_json(*report.volume);
  return j;
}

}  // namespace hamgame
