#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "obliqua/conditions.hpp"
#include "obliqua/jump_boundary.hpp"
#include "obliqua/polyhedral.hpp"
#include "obliqua/scenario.hpp"
#include "obliqua/sde_sim.hpp"
#include "obliqua/stats.hpp"

using nlohmann::json;
using obliqua::expr::Vec2;
namespace conditions = obliqua::conditions;
namespace scenario = obliqua::scenario;
namespace sim = obliqua::sim;
namespace stats = obliqua::stats;
namespace polyhedral = obliqua::polyhedral;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInconclusive = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json report_json(const conditions::CheckReport& r) {
  json w = json::array();
  for (const auto& wit : r.witnesses)
    w.push_back({{"point", {wit.point.x1, wit.point.x2}},
                 {"value", wit.value},
                 {"note", wit.note}});
  return {{"id", conditions::to_string(r.id)},
          {"status", conditions::to_string(r.status)},
          {"witnesses", w},
          {"tolerances", r.tolerances},
          {"metrics", r.metrics},
          {"detail", r.detail}};
}

void emit(const json& doc, const std::string& out_path) {
  std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw scenario::ConfigError("cannot write '" + out_path + "'");
    f << text;
  }
}

int verdict_exit(const std::vector<conditions::CheckReport>& reports,
                 bool strict) {
  bool fail = false, inconclusive = false;
  for (const auto& r : reports) {
    if (r.status == conditions::CheckStatus::Fail) fail = true;
    if (r.status == conditions::CheckStatus::Inconclusive) inconclusive = true;
  }
  if (fail) return kExitCheckFail;
  if (inconclusive && strict) return kExitInconclusive;
  return kExitPass;
}

std::map<std::string, double> parse_params(
    const std::vector<std::string>& raw) {
  std::map<std::string, double> out;
  for (const auto& p : raw) {
    auto eq = p.find('=');
    if (eq == std::string::npos)
      throw scenario::ConfigError("--param expects name=value, got '" + p + "'");
    out[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
  }
  return out;
}

json provenance(const scenario::Scenario& sc) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(sc.content_hash));
  return {{"scenario", sc.name},
          {"scenario_hash", hash},
          {"seed", sc.seed},
          {"tolerances",
           {{"boundary_tol", sc.domain.tol().boundary_tol},
            {"corner_tol", sc.domain.tol().corner_tol},
            {"cusp_tol", sc.domain.tol().cusp_tol},
            {"angle_tol", sc.domain.tol().angle_tol},
            {"grad_floor", sc.domain.tol().grad_floor}}}};
}

std::vector<conditions::CheckReport> run_checks(const scenario::Scenario& sc) {
  return conditions::run_all_checks(sc.domain, sc.coeff.b, sc.coeff.sigma,
                                    sc.check_cfg);
}

json checks_json(const std::vector<conditions::CheckReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr;
}

std::string path_csv(const sim::PathRecord& p, std::uint64_t thin) {
  std::string out = "t,x1,x2,lambda,gamma1,gamma2,boundary_flag\n";
  for (std::size_t k = 0; k < p.t.size(); ++k) {
    if (thin > 1 && k % thin != 0 && k + 1 != p.t.size()) continue;
    out += fmt(p.t[k]) + "," + fmt(p.x[k].x1) + "," + fmt(p.x[k].x2) + "," +
           fmt(p.lambda[k]) + "," + fmt(p.gamma[k].x1) + "," +
           fmt(p.gamma[k].x2) + "," + std::to_string(int(p.boundary_flag[k])) +
           "\n";
  }
  return out;
}

struct Terminal {
  double x1 = 0.0, x2 = 0.0, lambda = 0.0;
  bool truncated = false;
};

struct RunSettings {
  std::string construction = "direct";
  std::uint64_t paths = 0;     // 0 = scenario default
  std::uint64_t seed = 0;
  bool seed_set = false;
  double dt = 0.0;             // 0 = scenario default
  double horizon = 0.0;
  double r0 = 0.25;
  unsigned workers = 1;
  std::uint64_t csv_cap = 0;   // how many leading paths get CSV files
  std::uint64_t thin = 1;
};

sim::PathRecord make_path(const scenario::Scenario& sc, const RunSettings& rs,
                          const sim::SimContext& ctx, std::uint64_t seed,
                          double T, double dt, std::uint64_t pid) {
  Vec2 x0 = sc.draw_initial(pid);
  if (rs.construction == "direct")
    return sim::simulate_path(ctx, x0, seed, pid, T, dt);
  if (rs.construction == "controlled") {
    // control clock runs at most 4x slower than real time here
    auto cp = sim::simulate_controlled(ctx, x0, seed, pid, 4.0 * T, dt);
    return sim::time_change(cp, dt, T);
  }
  if (rs.construction == "localized")
    return sim::localized_simulate(ctx, x0, rs.r0, seed, pid, T, dt);
  throw scenario::ConfigError("unknown construction '" + rs.construction + "'");
}

// Streams paths through workers; keeps only terminals plus capped CSV text.
void run_paths(const scenario::Scenario& sc, const RunSettings& rs,
               std::map<std::uint64_t, Terminal>& terminals,
               std::vector<std::string>* csvs) {
  sim::SimContext ctx(sc.domain, sc.coeff);
  std::uint64_t n = rs.paths ? rs.paths : sc.paths;
  std::uint64_t seed = rs.seed_set ? rs.seed : sc.seed;
  double dt = rs.dt > 0.0 ? rs.dt : sc.dt;
  double T = rs.horizon > 0.0 ? rs.horizon : sc.T;
  unsigned workers = std::max(1u, rs.workers);

  std::vector<std::map<std::uint64_t, Terminal>> partial(workers);
  if (csvs) csvs->assign(std::min<std::uint64_t>(rs.csv_cap, n), "");
  std::vector<std::string> errors(workers);

  auto body = [&](unsigned w) {
    try {
      for (std::uint64_t pid = w; pid < n; pid += workers) {
        sim::PathRecord p = make_path(sc, rs, ctx, seed, T, dt, pid);
        Terminal t{p.x.back().x1, p.x.back().x2, p.lambda.back(), p.truncated};
        partial[w][pid] = t;
        if (csvs && pid < csvs->size()) (*csvs)[pid] = path_csv(p, rs.thin);
      }
    } catch (const std::exception& e) {
      errors[w] = e.what();
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  for (auto& part : partial)
    for (auto& [pid, t] : part) terminals[pid] = t;
}

json summary_block(const std::map<std::uint64_t, Terminal>& terminals) {
  std::map<std::uint64_t, double> x1, x2, lam;
  std::uint64_t truncated = 0;
  for (const auto& [pid, t] : terminals) {
    x1[pid] = t.x1;
    x2[pid] = t.x2;
    lam[pid] = t.lambda;
    if (t.truncated) ++truncated;
  }
  auto block = [](const stats::SampleSummary& s) {
    return json{{"n", s.n},
                {"mean", s.mean},
                {"standard_error", s.standard_error},
                {"min", s.min},
                {"max", s.max}};
  };
  return {{"terminal_x1", block(stats::mc_estimate(x1))},
          {"terminal_x2", block(stats::mc_estimate(x2))},
          {"terminal_lambda", block(stats::mc_estimate(lam))},
          {"truncated_paths", truncated}};
}

std::vector<double> functional_values(
    const std::map<std::uint64_t, Terminal>& terminals,
    const std::string& functional) {
  std::vector<double> v;
  v.reserve(terminals.size());
  for (const auto& [pid, t] : terminals) {
    if (functional == "terminal_x1")
      v.push_back(t.x1);
    else if (functional == "terminal_x2")
      v.push_back(t.x2);
    else if (functional == "terminal_lambda")
      v.push_back(t.lambda);
    else
      throw scenario::ConfigError("unknown functional '" + functional + "'");
  }
  return v;
}

int cmd_check(const std::string& path, const std::string& out, bool strict,
              const std::vector<std::string>& params) {
  scenario::Scenario sc = scenario::load_scenario_file(path, parse_params(params));
  auto reports = run_checks(sc);
  json doc = provenance(sc);
  doc["command"] = "check";
  doc["checks"] = checks_json(reports);
  int code = verdict_exit(reports, strict);
  doc["exit_code"] = code;
  emit(doc, out);
  return code;
}

int cmd_simulate(const std::string& path, const std::string& out_dir,
                 const RunSettings& rs, bool strict, bool force,
                 const std::vector<std::string>& params, bool emit_samples) {
  scenario::Scenario sc = scenario::load_scenario_file(path, parse_params(params));
  json doc = provenance(sc);
  doc["command"] = "simulate";
  doc["construction"] = rs.construction;
  if (!force) {
    auto reports = run_checks(sc);
    doc["checks"] = checks_json(reports);
    int code = verdict_exit(reports, strict);
    if (code != kExitPass) {
      doc["exit_code"] = code;
      emit(doc, out_dir.empty() ? "" : out_dir + "/summary.json");
      return code;
    }
  }

  std::map<std::uint64_t, Terminal> terminals;
  std::vector<std::string> csvs;
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  run_paths(sc, rs, terminals, out_dir.empty() ? nullptr : &csvs);
  for (std::size_t pid = 0; pid < csvs.size(); ++pid) {
    char name[64];
    std::snprintf(name, sizeof(name), "path_%06llu.csv",
                  static_cast<unsigned long long>(pid));
    std::ofstream f(out_dir + "/" + name, std::ios::binary);
    f << csvs[pid];
  }

  doc["run"] = {{"paths", rs.paths ? rs.paths : sc.paths},
                {"dt", rs.dt > 0.0 ? rs.dt : sc.dt},
                {"horizon", rs.horizon > 0.0 ? rs.horizon : sc.T},
                {"seed", rs.seed_set ? rs.seed : sc.seed}};
  doc["summary"] = summary_block(terminals);
  if (emit_samples) {
    json s = json::array();
    for (const auto& [pid, t] : terminals) s.push_back({t.x1, t.x2, t.lambda});
    doc["terminal_samples"] = s;
  }
  doc["exit_code"] = kExitPass;
  emit(doc, out_dir.empty() ? "" : out_dir + "/summary.json");
  return kExitPass;
}

int cmd_compare(const std::string& path, const std::string& out,
                RunSettings rs_a, RunSettings rs_b,
                const std::string& functional, double threshold,
                const std::vector<std::string>& params) {
  scenario::Scenario sc = scenario::load_scenario_file(path, parse_params(params));
  std::map<std::uint64_t, Terminal> ta, tb;
  run_paths(sc, rs_a, ta, nullptr);
  run_paths(sc, rs_b, tb, nullptr);
  double ks = stats::ks_statistic(functional_values(ta, functional),
                                  functional_values(tb, functional));
  bool pass = ks < threshold;
  json doc = provenance(sc);
  doc["command"] = "compare";
  doc["functional"] = functional;
  doc["constructions"] = {rs_a.construction, rs_b.construction};
  doc["seeds"] = {rs_a.seed_set ? rs_a.seed : sc.seed,
                  rs_b.seed_set ? rs_b.seed : sc.seed};
  doc["n"] = {ta.size(), tb.size()};
  doc["ks"] = ks;
  doc["threshold"] = threshold;
  doc["verdict"] = pass ? "pass" : "fail";
  doc["exit_code"] = pass ? kExitPass : kExitCheckFail;
  emit(doc, out);
  return pass ? kExitPass : kExitCheckFail;
}

int cmd_dw(const std::string& path, const std::string& out, bool strict) {
  std::ifstream in(path);
  if (!in) throw scenario::ConfigError("cannot read polygon file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw scenario::ConfigError(std::string("invalid JSON: ") + e.what());
  }
  polyhedral::PolygonSpec poly;
  try {
    for (const auto& v : j.at("normals"))
      poly.normals.push_back({v[0].get<double>(), v[1].get<double>()});
    for (const auto& v : j.at("offsets")) poly.offsets.push_back(v.get<double>());
    for (const auto& v : j.at("directions"))
      poly.directions.push_back({v[0].get<double>(), v[1].get<double>()});
  } catch (const std::exception& e) {
    throw scenario::ConfigError(e.what());
  }
  if (poly.normals.size() != poly.offsets.size() ||
      poly.normals.size() != poly.directions.size())
    throw scenario::ConfigError("normals, offsets, directions must have equal length");

  json doc;
  doc["command"] = "dw";
  doc["name"] = j.value("name", "polygon");
  bool fail = false;
  try {
    auto minimal = polyhedral::check_minimal_representation(poly);
    doc["minimal"] = minimal.minimal;
    if (minimal.redundant_index) {
      doc["redundant_index"] = *minimal.redundant_index;
      fail = true;
    }
    auto maximal = polyhedral::maximal_sets(poly);
    doc["maximal_sets"] = maximal;
    json smat = json::array();
    for (const auto& K : maximal) {
      auto sub = polyhedral::reflection_submatrix(poly, K);
      bool s = polyhedral::is_completely_S(sub);
      smat.push_back({{"index_set", K}, {"completely_S", s}});
      if (!s) fail = true;
    }
    doc["completely_S"] = smat;
    auto dw = polyhedral::check_DW_assumption(poly);
    doc["dw_pass"] = dw.pass;
    doc["dw_failing_sets"] = dw.failing_sets;
    if (!dw.pass) fail = true;
    auto eq = polyhedral::equivalence_test(poly);
    doc["equivalence"] = {{"dw_pass", eq.dw_pass},
                          {"g2_pass", eq.g2_pass},
                          {"agree", eq.agree}};
    if (!eq.agree && strict) {
      doc["exit_code"] = kExitInconclusive;
      emit(doc, out);
      return kExitInconclusive;
    }
  } catch (const polyhedral::UnboundedOrEmpty& e) {
    throw scenario::ConfigError(e.what());
  }
  doc["exit_code"] = fail ? kExitCheckFail : kExitPass;
  emit(doc, out);
  return fail ? kExitCheckFail : kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"condition checks and reflected-diffusion simulation"};
  app.require_subcommand(1);

  std::string in_path, out_path;
  bool strict = false, force = false, emit_samples = false;
  std::vector<std::string> params;
  RunSettings rs, rs_b;
  std::string functional = "terminal_x2";
  double threshold = 0.015;
  std::string construction_b = "controlled";
  std::uint64_t seed_b = 0;
  bool seed_b_set = false;

  CLI::App* check = app.add_subcommand("check", "run condition checks on a scenario");
  check->add_option("scenario", in_path)->required();
  check->add_option("--out", out_path);
  check->add_flag("--strict", strict);
  check->add_option("--param", params);

  CLI::App* simulate = app.add_subcommand("simulate", "simulate paths");
  simulate->add_option("scenario", in_path)->required();
  simulate->add_option("--out", out_path);
  simulate->add_option("--seed", rs.seed)->each([&](const std::string&) { rs.seed_set = true; });
  simulate->add_option("--paths", rs.paths);
  simulate->add_option("--dt", rs.dt);
  simulate->add_option("--horizon", rs.horizon);
  simulate->add_option("--construction", rs.construction)
      ->check(CLI::IsMember({"direct", "controlled", "localized"}));
  simulate->add_option("--r0", rs.r0);
  simulate->add_option("--workers", rs.workers);
  simulate->add_option("--csv-paths", rs.csv_cap, "paths written as CSV")
      ->default_val(100);
  simulate->add_option("--thin", rs.thin);
  simulate->add_flag("--strict", strict);
  simulate->add_flag("--force", force);
  simulate->add_flag("--emit-samples", emit_samples);
  simulate->add_option("--param", params);

  CLI::App* compare = app.add_subcommand("compare", "two-construction comparison");
  compare->add_option("scenario", in_path)->required();
  compare->add_option("--out", out_path);
  compare->add_option("--construction-a", rs.construction)
      ->check(CLI::IsMember({"direct", "controlled", "localized"}));
  compare->add_option("--construction-b", construction_b)
      ->check(CLI::IsMember({"direct", "controlled", "localized"}));
  compare->add_option("--seed", rs.seed)->each([&](const std::string&) { rs.seed_set = true; });
  compare->add_option("--seed-b", seed_b)->each([&](const std::string&) { seed_b_set = true; });
  compare->add_option("--paths", rs.paths);
  compare->add_option("--dt", rs.dt);
  compare->add_option("--horizon", rs.horizon);
  compare->add_option("--r0", rs.r0);
  compare->add_option("--workers", rs.workers);
  compare->add_option("--functional", functional)
      ->check(CLI::IsMember({"terminal_x1", "terminal_x2", "terminal_lambda"}));
  compare->add_option("--threshold", threshold);
  compare->add_option("--param", params);

  CLI::App* dw = app.add_subcommand("dw", "polyhedral Dai-Williams checks");
  dw->add_option("polygon", in_path)->required();
  dw->add_option("--out", out_path);
  dw->add_flag("--strict", strict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (check->parsed()) return cmd_check(in_path, out_path, strict, params);
    if (simulate->parsed())
      return cmd_simulate(in_path, out_path, rs, strict, force, params,
                          emit_samples);
    if (compare->parsed()) {
      rs_b = rs;
      rs_b.construction = construction_b;
      rs_b.seed = seed_b_set ? seed_b : rs.seed + 1;
      rs_b.seed_set = seed_b_set || rs.seed_set;
      if (!rs.seed_set && !seed_b_set) {
        rs_b.seed_set = true;
        // distinct default seeds keep the two runs independent
        rs_b.seed = 1;
      }
      return cmd_compare(in_path, out_path, rs, rs_b, functional, threshold,
                         params);
    }
    if (dw->parsed()) return cmd_dw(in_path, out_path, strict);
  } catch (const scenario::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFail;
  }
  return kExitConfig;
}
