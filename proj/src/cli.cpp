#include "hamgame/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "hamgame/hamiltonian.hpp"

namespace hamgame::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct RunOptions {
  std::string game;
  std::string scheme = "rk4";
  double eta = 1e-3;
  double horizon = 10.0;
  int stride = 10;
  std::uint64_t seed = 0;
  std::string y0;
  std::string ref = "none";
  std::string out;
  int n = 1000;
  double radius = 0.0;
  double epsilon = 1e-3;
  std::vector<std::string> trajectories;
};

std::string join_ids(const std::vector<int>& side, const std::vector<std::string>& ids) {
  std::string s = "{";
  for (std::size_t k = 0; k < side.size(); ++k) s += (k ? "," : "") + ids[side[k]];
  return s + "}";
}

AgentVectors resolve_center(const RunOptions& opt, const LoadedGame& loaded) {
  if (opt.y0.empty()) return loaded.y0;
  if (fs::exists(opt.y0)) {
    std::ifstream in(opt.y0);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParseError(opt.y0 + ": " + e.what());
    }
    return vectors_from_json(j);
  }
  return parse_inline_vectors(opt.y0);
}

AgentVectors resolve_y0(const RunOptions& opt, const LoadedGame& loaded) {
  AgentVectors center = resolve_center(opt, loaded);
  if (opt.radius > 0.0) return sample_ball(center, opt.radius, 1, opt.seed).front();
  return center;
}

/// nullopt for "none" or when solve2x2 finds no interior equilibrium (a note is printed).
std::optional<AgentVectors> resolve_reference(const std::string& ref, const LoadedGame& loaded,
                                              std::ostream& out) {
  if (ref.empty() || ref == "none") return std::nullopt;
  AgentVectors x_star;
  if (ref == "solve2x2") {
    const auto solved = solve_2x2_fully_mixed_nash(loaded.game.payoffs());
    if (!solved.profile) {
      out << "reference: none (" << solved.note << ")\n";
      return std::nullopt;
    }
    x_star = solved.profile->vectors();
  } else {
    x_star = parse_inline_vectors(ref);
  }
  const auto checked = make_reference(loaded.game.payoffs(), loaded.regularizers, x_star);
  return checked.profile.vectors();
}

IntegratorConfig make_config(const RunOptions& opt) {
  IntegratorConfig c;
  c.scheme = parse_scheme(opt.scheme);
  c.step = opt.eta;
  c.horizon = opt.horizon;
  c.snapshot_stride = opt.stride;
  c.validate();
  return c;
}

bool non_bipartite_coordination(const LoadedGame& loaded) {
  return loaded.game.sigma() == Sigma::coordination && !bipartite_partition(loaded.game.payoffs());
}

int cmd_validate(const RunOptions& opt, std::ostream& out) {
  const LoadedGame loaded = load_game(opt.game);
  out << describe_classification(loaded) << "\n";
  if (auto p = bipartite_partition(loaded.game.payoffs())) {
    out << "partition: " << join_ids(p->first, loaded.ids) << " | " << join_ids(p->second, loaded.ids) << "\n";
  }
  int total = 0;
  for (int k : loaded.game.payoffs().strategy_counts()) total += k;
  out << "agents: " << loaded.ids.size() << ", strategies: " << total
      << ", hash: " << game_hash(loaded.game) << "\n";
  return kOk;
}

int cmd_simulate(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const LoadedGame loaded = load_game(opt.game);
  const IntegratorConfig config = make_config(opt);
  const AgentVectors y0 = resolve_y0(opt, loaded);
  const auto ref = resolve_reference(opt.ref, loaded, out);

  const Trajectory traj = simulate(loaded.game, loaded.regularizers, y0, config, ref ? &*ref : nullptr);

  const fs::path dir = opt.out.empty() ? fs::path(".") : fs::path(opt.out);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "trajectory.csv");
    write_trajectory_csv(csv, traj, loaded.ids);
  }
  {
    json meta = trajectory_metadata_json(traj, y0);
    meta["seed"] = opt.seed;
    meta["radius"] = opt.radius;
    meta["game"] = opt.game;
    std::ofstream side(dir / "trajectory.json");
    side << meta.dump(2) << "\n";
  }

  const double t_final = traj.snapshots.back().state.t;
  out << "t_final=" << num(t_final) << " snapshots=" << traj.snapshots.size();
  if (const auto drift = energy_drift(traj)) {
    out << " energy drift " << sci(drift->max_abs) << " (relative " << sci(drift->relative) << ")";
  } else {
    out << " energy unavailable (no sigma tag)";
  }
  out << "\n";
  if (non_bipartite_coordination(loaded)) out << "coordination, non-bipartite: network energy identically zero\n";
  if (config.scheme == Scheme::euler) {
    const auto mono = monotone_energy_check(traj, loaded.regularizers);
    out << "energy non-decreasing: " << (mono.monotone ? "true" : "false") << ", total increase "
        << sci(mono.total_increase) << "\n";
  }
  out << "wrote " << (dir / "trajectory.csv").string() << "\n";
  if (traj.diagnostic) {
    err << "blow-up at step " << traj.diagnostic->step << " (t=" << num(traj.diagnostic->t)
        << "): " << traj.diagnostic->message << "\n";
    return kBlowUp;
  }
  return kOk;
}

fs::path sidecar_of(const std::string& csv) {
  fs::path p(csv);
  p.replace_extension(".json");
  return p;
}

json analyze_one(const std::string& csv_path, const LoadedGame& loaded, const RunOptions& opt,
                 std::ostream& out, bool& failed) {
  std::ifstream side(sidecar_of(csv_path));
  if (!side) throw ParseError(sidecar_of(csv_path).string() + ": missing trajectory metadata");
  json meta;
  try {
    side >> meta;
  } catch (const json::exception& e) {
    throw ParseError(sidecar_of(csv_path).string() + ": " + e.what());
  }
  const std::string hash = game_hash(loaded.game);
  if (meta.value("game_hash", "") != hash) {
    throw StructuralError("game hash mismatch: trajectory " + meta.value("game_hash", "?") + ", game " + hash);
  }
  const IntegratorConfig config = config_from_json(meta.at("config"));
  const AgentVectors y0 = vectors_from_json(meta.at("y0"));

  std::optional<AgentVectors> ref;
  if (opt.ref != "none" && !opt.ref.empty()) {
    ref = resolve_reference(opt.ref, loaded, out);
  } else if (meta.contains("reference") && !meta["reference"].is_null()) {
    ref = vectors_from_json(meta["reference"]);
  }

  // The CSV holds x only; the payoff vectors are recovered by replaying the recorded run.
  const Trajectory traj = simulate(loaded.game, loaded.regularizers, y0, config, ref ? &*ref : nullptr);
  std::ifstream csv(csv_path);
  if (!csv) throw ParseError(csv_path + ": cannot open file");
  const CsvTable table = read_csv(csv);
  if (table.rows.size() != traj.snapshots.size()) {
    throw StructuralError(csv_path + ": row count does not match the replayed run");
  }
  double mismatch = 0.0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::size_t col = 1;
    for (const auto& v : traj.snapshots[r].state.x) {
      for (Eigen::Index s = 0; s < v.size(); ++s) mismatch = std::max(mismatch, std::abs(table.rows[r][col++] - v(s)));
    }
  }
  if (!(mismatch <= 1e-12)) {
    throw StructuralError(csv_path + ": strategies differ from the replayed run by " + sci(mismatch));
  }

  const AnalysisReport report = analyze_trajectory(traj, loaded.regularizers, ref ? &*ref : nullptr, opt.epsilon);
  json j = to_json(report);
  j["trajectory"] = csv_path;
  j["game_hash"] = hash;
  j["scheme"] = to_string(config.scheme);

  json checks = json::array();
  auto check = [&](const std::string& name, double value, double tol, bool pass) {
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
    failed = failed || !pass;
  };
  const bool continuous = config.scheme != Scheme::euler;
  const bool zero_sum = loaded.game.sigma() == Sigma::zero_sum;
  if (continuous && report.energy_drift) {
    check("energy_relative_drift", report.energy_drift->relative, 1e-6, report.energy_drift->relative <= 1e-6);
  }
  if (continuous && zero_sum && report.fenchel) {
    bool interior = true;
    for (const auto& v : *ref) interior = interior && v.minCoeff() > 0.0;
    if (interior) {
      const auto& f = report.fenchel->fenchel_summary;
      const double tol = 1e-6 * std::max(1.0, std::abs(f.initial));
      check("fenchel_max_deviation", f.max_deviation, tol, f.max_deviation <= tol);
    }
  }
  if (!continuous && zero_sum && report.monotone) {
    check("euler_energy_max_decrease", report.monotone->max_decrease, kMonotoneSlack, report.monotone->monotone);
  }
  j["checks"] = checks;
  return j;
}

int cmd_analyze(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const LoadedGame loaded = load_game(opt.game);
  bool failed = false;
  json result;
  if (opt.trajectories.size() == 1) {
    result = analyze_one(opt.trajectories.front(), loaded, opt, out, failed);
  } else {
    result["runs"] = json::array();
    for (const auto& t : opt.trajectories) result["runs"].push_back(analyze_one(t, loaded, opt, out, failed));
  }
  if (opt.out.empty()) {
    out << result.dump(2) << "\n";
  } else {
    std::ofstream f(opt.out);
    f << result.dump(2) << "\n";
    out << "wrote " << opt.out << "\n";
  }
  if (failed) {
    err << "one or more invariant checks failed\n";
    return kUsage;
  }
  return kOk;
}

int cmd_cloud(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.n < 10) {
    err << "cloud needs --n >= 10 (got " << opt.n << ")\n";
    return kUsage;
  }
  const LoadedGame loaded = load_game(opt.game);
  const AgentVectors center = resolve_center(opt, loaded);
  const double radius = opt.radius > 0.0 ? opt.radius : 0.01;
  const auto cloud = sample_ball(center, radius, opt.n, opt.seed);

  std::vector<std::string> schemes;
  {
    std::stringstream ss(opt.scheme);
    std::string s;
    while (std::getline(ss, s, ',')) schemes.push_back(s);
  }
  json result = {{"members", opt.n}, {"radius", radius}, {"seed", opt.seed}, {"horizon", opt.horizon},
                 {"eta", opt.eta}, {"results", json::array()}};
  for (const auto& name : schemes) {
    RunOptions o = opt;
    o.scheme = name;
    const IntegratorConfig config = make_config(o);
    VolumeReport v;
    try {
      v = volume_ratio(loaded.game, loaded.regularizers, cloud, config);
    } catch (const DomainError& e) {
      err << name << ": " << e.what() << "\n";
      return kBlowUp;
    }
    json r = to_json(v);
    r["scheme"] = name;
    result["results"].push_back(r);
    out << name << ": volume ratio " << num(v.ratio) << "\n";
  }
  if (!opt.out.empty()) {
    std::ofstream f(opt.out);
    f << result.dump(2) << "\n";
    out << "wrote " << opt.out << "\n";
  } else {
    out << result.dump(2) << "\n";
  }
  return kOk;
}

}  // namespace

std::string describe_classification(const LoadedGame& loaded) {
  const auto partition = bipartite_partition(loaded.game.payoffs());
  const std::string shape = partition ? "bipartite" : "non-bipartite";
  if (loaded.normalized) {
    std::set<double> cs;
    for (const auto& e : loaded.classification.constants) cs.insert(e.c);
    std::string list;
    for (double c : cs) list += (list.empty() ? "" : ",") + num(c);
    return "constant-sum, normalized to zero-sum (c=" + list + ")";
  }
  switch (loaded.game.sigma()) {
    case Sigma::zero_sum: return "zero-sum, " + shape;
    case Sigma::coordination:
      return partition ? "coordination, bipartite" : "coordination, non-bipartite: network energy identically zero";
    case Sigma::general: break;
  }
  return "general-sum, " + shape + ": no Hamiltonian structure certified";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FTRL learning dynamics on network games, with energy instrumentation"};
  app.require_subcommand(1);
  RunOptions opt;

  auto add_game = [&](CLI::App* sub) { sub->add_option("--game", opt.game, "game JSON file")->required(); };
  auto add_integrator = [&](CLI::App* sub) {
    sub->add_option("--scheme", opt.scheme, "euler, rk4 or leapfrog")->capture_default_str();
    sub->add_option("--eta", opt.eta, "step size")->capture_default_str();
    sub->add_option("--horizon", opt.horizon, "final time T")->capture_default_str();
    sub->add_option("--seed", opt.seed, "seed for random initial payoffs")->capture_default_str();
    sub->add_option("--y0", opt.y0, "initial payoffs: inline '0.2,-0.2;0,0' or JSON file");
  };

  auto* validate = app.add_subcommand("validate", "classify a game file");
  add_game(validate);

  auto* sim = app.add_subcommand("simulate", "run one trajectory, write CSV and JSON metadata");
  add_game(sim);
  add_integrator(sim);
  sim->add_option("--stride", opt.stride, "snapshot every N steps")->capture_default_str();
  sim->add_option("--radius", opt.radius, "draw y0 from a ball of this radius (with --seed)");
  sim->add_option("--ref", opt.ref, "equilibrium reference: inline vectors, solve2x2 or none")->capture_default_str();
  sim->add_option("--out", opt.out, "output directory");

  auto* analyze = app.add_subcommand("analyze", "report on trajectories written by simulate");
  add_game(analyze);
  analyze->add_option("trajectories", opt.trajectories, "trajectory CSV files")->required();
  analyze->add_option("--ref", opt.ref, "equilibrium reference: inline vectors, solve2x2 or none");
  analyze->add_option("--epsilon", opt.epsilon, "recurrence threshold")->capture_default_str();
  analyze->add_option("--out", opt.out, "report file (default: stdout)");

  auto* cloud = app.add_subcommand("cloud", "volume ratio of a cloud of initial conditions");
  add_game(cloud);
  add_integrator(cloud);
  cloud->add_option("--n", opt.n, "cloud size")->capture_default_str();
  cloud->add_option("--radius", opt.radius, "ball radius (default 0.01)");
  cloud->add_option("--out", opt.out, "report file (default: stdout)");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(opt, out);
    if (sim->parsed()) return cmd_simulate(opt, out, err);
    if (analyze->parsed()) return cmd_analyze(opt, out, err);
    if (cloud->parsed()) return cmd_cloud(opt, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace hamgame::cli
