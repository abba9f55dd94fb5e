// Acceptance suite: one verdict line per criterion, exit code = #failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "obliqua/conditions.hpp"
#include "obliqua/jump_boundary.hpp"
#include "obliqua/polyhedral.hpp"
#include "obliqua/rng.hpp"
#include "obliqua/scenario.hpp"
#include "obliqua/sde_sim.hpp"
#include "obliqua/stats.hpp"

namespace fs = std::filesystem;
using obliqua::expr::Vec2;
using obliqua::stats::ks_statistic;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string g_scenario_dir;
std::string g_bin;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

obliqua::scenario::Scenario load(const std::string& file,
                                 const std::map<std::string, double>& ov = {}) {
  return obliqua::scenario::load_scenario_file(g_scenario_dir + "/" + file, ov);
}

// Parallel sweep over path ids; the first worker exception is rethrown here.
template <typename F>
void over_paths_void(std::uint64_t n, F&& body) {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  std::mutex mu;
  std::string error;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t pid = w; pid < n; pid += workers) body(pid);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(mu);
        if (error.empty()) error = ex.what();
      }
    });
  for (auto& t : pool) t.join();
  if (!error.empty()) throw std::runtime_error(error);
}

template <typename F>
std::vector<double> over_paths(std::uint64_t n, F&& body) {
  std::vector<double> out(n);
  over_paths_void(n, [&](std::uint64_t pid) { out[pid] = body(pid); });
  return out;
}

// ---------------------------------------------------------------- criterion 1

Verdict criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  using namespace obliqua::conditions;
  auto overall = [&](double theta) {
    auto sc = load("half_disc.json", {{"theta", theta}});
    auto rs = run_all_checks(sc.domain, sc.coeff.b, sc.coeff.sigma, sc.check_cfg);
    bool g1_fail = false, any_fail = false;
    for (const auto& r : rs) {
      if (r.status == CheckStatus::Fail) {
        any_fail = true;
        if (r.id == ConditionId::G_i) g1_fail = true;
      }
    }
    return std::pair{any_fail, g1_fail};
  };
  bool ok = true;
  for (double theta : {kPi / 4.0, kPi / 3.0, 0.45 * kPi})
    if (overall(theta).first) ok = false;
  auto at_right_angle = overall(kPi / 2.0);
  if (!at_right_angle.first || !at_right_angle.second) ok = false;
  double dt = seconds_since(t0);
  if (dt > 4 * 5.0) ok = false;
  return {ok, fmt("theta sweep pass/pass/pass + G1 fail at pi/2, %.1f s", dt)};
}

// ------------------------------------------------------- criteria 2 and 4

std::vector<obliqua::polyhedral::PolygonSpec> random_polygons(int count,
                                                             std::uint64_t seed) {
  using obliqua::polyhedral::PolygonSpec;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> off(-1.0, -0.3);
  std::vector<PolygonSpec> out;
  while (static_cast<int>(out.size()) < count) {
    int n = 3 + static_cast<int>(rng() % 6);
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(ang(rng));
    std::sort(angles.begin(), angles.end());
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      double next = (i + 1 < n) ? angles[i + 1] : angles[0] + 2.0 * kPi;
      if (next - angles[i] >= kPi - 0.05 || next - angles[i] < 0.1) ok = false;
    }
    if (!ok) continue;
    PolygonSpec p;
    for (double a : angles) {
      p.normals.push_back({std::cos(a), std::sin(a)});
      p.offsets.push_back(off(rng));
      double da = ang(rng);
      p.directions.push_back({std::cos(da), std::sin(da)});
    }
    out.push_back(p);
  }
  return out;
}

Verdict criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  auto polys = random_polygons(200, 0x3737ull);
  int agree = 0;
  for (const auto& p : polys)
    if (obliqua::polyhedral::equivalence_test(p).agree) ++agree;
  double dt = seconds_since(t0);
  bool ok = agree == 200 && dt < 30.0;
  return {ok, fmt("DW vs Condition-G agreement %d/200, %.1f s", agree, dt)};
}

Verdict criterion_4() {
  auto t0 = std::chrono::steady_clock::now();
  using namespace obliqua::polyhedral;
  auto polys = random_polygons(200, 0x3737ull);
  int match = 0;
  for (const auto& p : polys) {
    // subset-definition oracle from the naive vertex enumeration
    std::vector<Vertex> vs;
    int n = p.size();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double det = p.normals[i].x1 * p.normals[j].x2 -
                     p.normals[i].x2 * p.normals[j].x1;
        if (std::fabs(det) < 1e-10) continue;
        Vec2 x{(p.offsets[i] * p.normals[j].x2 - p.offsets[j] * p.normals[i].x2) / det,
               (p.normals[i].x1 * p.offsets[j] - p.normals[j].x1 * p.offsets[i]) / det};
        bool feas = true;
        std::vector<int> active;
        for (int k = 0; k < n; ++k) {
          double slack = x.dot(p.normals[k]) - p.offsets[k];
          if (slack < -1e-10) feas = false;
          if (std::fabs(slack) <= 1e-10) active.push_back(k);
        }
        if (!feas) continue;
        bool dup = false;
        for (const auto& v : vs)
          if ((v.point - x).norm() < 1e-8) dup = true;
        if (!dup) vs.push_back({x, active});
      }
    std::vector<std::vector<int>> want;
    for (const auto& v : vs) want.push_back(v.active);
    for (int i = 0; i < n; ++i) {
      int touching = 0;
      for (const auto& v : vs)
        if (std::find(v.active.begin(), v.active.end(), i) != v.active.end())
          ++touching;
      if (touching >= 2) want.push_back({i});  // face with positive length
    }
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    if (maximal_sets(p) == want) ++match;
  }
  double dt = seconds_since(t0);
  return {match == 200, fmt("fast enumeration == subset oracle on %d/200 polygons, %.1f s",
                            match, dt)};
}

// ---------------------------------------------------------------- criterion 3

Verdict criterion_3() {
  auto t0 = std::chrono::steady_clock::now();
  using obliqua::polyhedral::is_completely_S;
  using obliqua::polyhedral::ReflectionSubmatrix;
  std::mt19937_64 rng(0x5eedull);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  auto draw = [&]() {
    ReflectionSubmatrix M;
    M.index_set = {0, 1};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) M.m[r][c] = u(rng);
    return M;
  };
  auto transposed = [](ReflectionSubmatrix M) {
    std::swap(M.m[0][1], M.m[1][0]);
    return M;
  };
  int sym_bad = 0;
  for (int k = 0; k < 100000; ++k) {
    auto M = draw();
    if (is_completely_S(M) != is_completely_S(transposed(M))) ++sym_bad;
  }
  auto grid_oracle = [](const ReflectionSubmatrix& M) {
    if (M.m[0][0] <= 0.0 || M.m[1][1] <= 0.0) return false;
    for (int k = 1; k < 1000000; ++k) {
      double a = 0.5 * kPi * k / 1000000.0;
      double x1 = std::cos(a), x2 = std::sin(a);
      if (M.m[0][0] * x1 + M.m[0][1] * x2 > 0.0 &&
          M.m[1][0] * x1 + M.m[1][1] * x2 > 0.0)
        return true;
    }
    return false;
  };
  int oracle_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    auto M = draw();
    if (is_completely_S(M) != grid_oracle(M)) ++oracle_bad;
  }
  double dt = seconds_since(t0);
  bool ok = sym_bad == 0 && oracle_bad == 0 && dt < 60.0;
  return {ok, fmt("transpose mismatches %d/100000, oracle mismatches %d/1000, %.1f s",
                  sym_bad, oracle_bad, dt)};
}

// ---------------------------------------------------------------- criterion 5

Verdict criterion_5() {
  auto t0 = std::chrono::steady_clock::now();
  using namespace obliqua::sim;
  struct Batch {
    std::string file;
    std::uint64_t paths;
    double T, dt;
    bool localized;
  };
  std::vector<Batch> batches = {
      {"half_plane.json", 200, 1.0, 1e-3, false},
      {"half_disc.json", 200, 1.0, 1e-3, false},
      {"half_disc.json", 100, 1.0, 1e-3, true},
      {"cusp.json", 50, 0.1, 1e-4, false},
  };
  std::uint64_t checked = 0;
  bool ok = true;
  std::string first_bad;
  for (const auto& b : batches) {
    auto sc = load(b.file);
    SimContext ctx(sc.domain, sc.coeff);
    std::vector<int> bad(b.paths, 0);
    over_paths_void(b.paths, [&](std::uint64_t pid) {
      Vec2 x0 = sc.draw_initial(pid);
      PathRecord p = b.localized
                         ? localized_simulate(ctx, x0, 0.25, sc.seed, pid, b.T, b.dt)
                         : simulate_path(ctx, x0, sc.seed, pid, b.T, b.dt);
      auto r = verify_path_invariants(ctx, p, 1e-9);
      if (!r.in_closure || !r.lambda_monotone || !r.lambda_support) bad[pid] = 1;
    });
    for (std::uint64_t pid = 0; pid < b.paths; ++pid) {
      ++checked;
      if (bad[pid] && ok) {
        ok = false;
        first_bad = fmt(" first violation %s path %llu", b.file.c_str(),
                        static_cast<unsigned long long>(pid));
      }
    }
  }
  double dt = seconds_since(t0);
  return {ok, fmt("support + closure invariants on %llu paths%s, %.1f s",
                  static_cast<unsigned long long>(checked), first_bad.c_str(), dt)};
}

// ---------------------------------------------------------------- criterion 6

Verdict criterion_6() {
  auto t0 = std::chrono::steady_clock::now();
  using namespace obliqua::sim;
  auto sc = load("half_plane.json");
  SimContext ctx(sc.domain, sc.coeff);
  const std::uint64_t n = 100000;
  std::vector<double> sim = over_paths(n, [&](std::uint64_t pid) {
    return simulate_path(ctx, {0.0, 1.0}, sc.seed, pid, 1.0, 1e-3).x.back().x2;
  });
  // oracle sampler: |1 + N(0, 1)|
  const std::uint64_t m = 1000000;
  std::vector<double> oracle(m);
  for (std::uint64_t k = 0; k < m / 2; ++k) {
    auto [z1, z2] = obliqua::rng::Counter{777, 0, 0}.gauss_pair(k);
    oracle[2 * k] = std::fabs(1.0 + z1);
    oracle[2 * k + 1] = std::fabs(1.0 + z2);
  }
  double ks = ks_statistic(sim, oracle);

  auto summarize = [](const std::vector<double>& v) {
    std::map<std::uint64_t, double> by;
    for (std::uint64_t i = 0; i < v.size(); ++i) by[i] = v[i];
    return obliqua::stats::mc_estimate(by);
  };
  auto ssim = summarize(sim);
  auto sorc = summarize(oracle);
  double se = std::hypot(ssim.standard_error, sorc.standard_error);
  bool mean_ok = std::fabs(ssim.mean - sorc.mean) <= 3.0 * se;
  double dt = seconds_since(t0);
  bool ok = ks < 0.01 && mean_ok && dt < 120.0;
  return {ok, fmt("KS %.5f (< 0.01 required), mean %.5f vs %.5f (+- %.5f), %.1f s",
                  ks, ssim.mean, sorc.mean, 3.0 * se, dt)};
}

// ---------------------------------------------------------------- criterion 7

Verdict criterion_7() {
  auto t0 = std::chrono::steady_clock::now();
  using namespace obliqua::sim;
  const std::uint64_t n = 100000;
  const double T = 1.0, dt = 4e-3, S = 4.0;
  bool ok = true;
  std::string detail;
  for (const char* file : {"half_plane.json", "half_disc.json"}) {
    auto sc = load(file);
    SimContext ctx(sc.domain, sc.coeff);
    std::vector<double> d1(n), d2(n), c1(n), c2(n);
    over_paths_void(n, [&](std::uint64_t pid) {
      Vec2 x0 = sc.draw_initial(pid);
      PathRecord direct = simulate_path(ctx, x0, sc.seed, pid, T, dt);
      d1[pid] = direct.x.back().x1;
      d2[pid] = direct.x.back().x2;
      auto cp = simulate_controlled(ctx, x0, sc.seed + 1, pid, S, dt);
      PathRecord tc = time_change(cp, dt, T);
      c1[pid] = tc.x.back().x1;
      c2[pid] = tc.x.back().x2;
    });
    double ks1 = ks_statistic(d1, c1);
    double ks2 = ks_statistic(d2, c2);
    if (ks1 >= 0.015 || ks2 >= 0.015) ok = false;
    detail += fmt("%s KS (x1, x2) = (%.4f, %.4f); ", file, ks1, ks2);
  }
  double el = seconds_since(t0);
  if (el > 300.0) ok = false;
  return {ok, detail + fmt("%.0f s", el)};
}

// ---------------------------------------------------------------- criterion 8

Verdict criterion_8() {
  auto t0 = std::chrono::steady_clock::now();
  using namespace obliqua::sim;
  const std::uint64_t n = 100000;
  const double T = 1.0, dt = 4e-3;
  auto sc = load("half_disc.json");
  SimContext ctx(sc.domain, sc.coeff);
  std::vector<double> d1(n), d2(n), l1(n), l2(n);
  over_paths_void(n, [&](std::uint64_t pid) {
    Vec2 x0 = sc.draw_initial(pid);
    PathRecord direct = simulate_path(ctx, x0, sc.seed, pid, T, dt);
    d1[pid] = direct.x.back().x1;
    d2[pid] = direct.x.back().x2;
    PathRecord local = localized_simulate(ctx, x0, 0.25, sc.seed, pid, T, dt);
    l1[pid] = local.x.back().x1;
    l2[pid] = local.x.back().x2;
  });
  double ks1 = ks_statistic(d1, l1);
  double ks2 = ks_statistic(d2, l2);

  // pasted clocks accumulate in exact arithmetic
  bool paste_exact = true;
  for (std::uint64_t pid = 0; pid < 16; ++pid) {
    PathRecord head_full = simulate_path(ctx, {1.0, 0.5}, 91, pid, 0.5, 1e-3);
    StoppedPath head =
        stop_at_exit(head_full, [](const Vec2& x) { return x.x1 < 1.6; });
    if (head.exit_time == kNoExit) continue;
    PathRecord cont = simulate_path(ctx, head.record.x[head.exit_index], 91,
                                    1000 + pid, 0.5, 1e-3);
    PathRecord glued = paste(head, cont);
    double lam0 = head.record.lambda[head.exit_index];
    for (std::size_t j = 1; j < cont.t.size(); ++j)
      if (glued.lambda[head.exit_index + j] != lam0 + cont.lambda[j])
        paste_exact = false;
  }
  double el = seconds_since(t0);
  bool ok = ks1 < 0.015 && ks2 < 0.015 && paste_exact;
  return {ok, fmt("localized vs direct KS (x1, x2) = (%.4f, %.4f), paste clocks %s, %.0f s",
                  ks1, ks2, paste_exact ? "bit-exact" : "MISMATCH", el)};
}

// ---------------------------------------------------------------- criterion 9

Verdict criterion_9() {
  auto t0 = std::chrono::steady_clock::now();
  using namespace obliqua::jump;
  auto sc = load("jump_disc.json");
  JumpScenario js{sc.domain, sc.coeff, UniformDiscKernel{{0.0, 0.0}, 0.5}};

  // hold durations against Exp(1)
  const double ds = 0.002;
  const std::uint64_t hold_paths = 128;
  std::vector<std::vector<double>> per_path(hold_paths);
  over_paths_void(hold_paths, [&](std::uint64_t pid) {
    auto cp = simulate_jump_controlled(js, sc.seed, pid, 200.0, ds);
    per_path[pid] = hold_durations(cp, ds);
  });
  std::vector<double> holds;
  for (const auto& h : per_path) holds.insert(holds.end(), h.begin(), h.end());
  std::vector<double> exp_oracle(200000);
  for (std::uint64_t k = 0; k < exp_oracle.size(); ++k)
    exp_oracle[k] = obliqua::rng::Counter{555, 0, 3}.exponential(k);
  double ks_hold = holds.empty() ? 1.0 : ks_statistic(holds, exp_oracle);

  // constrained vs time-changed controlled terminal marginals
  const std::uint64_t n = 10000;
  const double T = 1.0, dt = 2e-3;
  std::vector<double> a1(n), a2(n), b1(n), b2(n);
  over_paths_void(n, [&](std::uint64_t pid) {
    PathRecord cons = simulate_jump_constrained(js, sc.seed, pid, T, dt);
    a1[pid] = cons.x.back().x1;
    a2[pid] = cons.x.back().x2;
    // holds spend Exp(1) stretches of control time, so the control horizon
    // must dominate T plus the summed holds or the time change truncates
    auto cp = simulate_jump_controlled(js, sc.seed + 1, pid, 16.0, dt);
    PathRecord tc = obliqua::sim::time_change(cp, dt, T);
    b1[pid] = tc.x.back().x1;
    b2[pid] = tc.x.back().x2;
  });
  double ks1 = ks_statistic(a1, b1);
  double ks2 = ks_statistic(a2, b2);
  double el = seconds_since(t0);
  bool ok = holds.size() >= 10000 && ks_hold < 0.02 && ks1 < 0.02 &&
            ks2 < 0.02 && el < 120.0;
  return {ok, fmt("%zu holds KS %.4f vs Exp(1); constructions KS (x1, x2) = (%.4f, %.4f), %.0f s",
                  holds.size(), ks_hold, ks1, ks2, el)};
}

// --------------------------------------------------------------- criterion 10

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion_10() {
  auto t0 = std::chrono::steady_clock::now();
  if (g_bin.empty()) return {false, "OBLIQUA_BIN not set"};
  fs::path base = fs::temp_directory_path() / "obliqua_acceptance_det";
  fs::remove_all(base);
  std::vector<fs::path> outs = {base / "w1", base / "w4", base / "w1b"};
  std::vector<std::string> workers = {"1", "4", "1"};
  for (std::size_t i = 0; i < outs.size(); ++i) {
    fs::create_directories(outs[i]);
    std::string cmd = g_bin + " simulate " + g_scenario_dir +
                      "/half_disc.json --paths 20 --csv-paths 20 --horizon 0.2 "
                      "--seed 12 --workers " + workers[i] + " --out " +
                      outs[i].string() + " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "simulate invocation failed"};
  }
  bool ok = true;
  for (int p = 0; p < 20 && ok; ++p) {
    char name[32];
    std::snprintf(name, sizeof(name), "path_%06d.csv", p);
    std::string ref = slurp(outs[0] / name);
    if (ref.empty() || ref != slurp(outs[1] / name) || ref != slurp(outs[2] / name))
      ok = false;
  }
  std::string sum = slurp(outs[0] / "summary.json");
  if (sum.empty() || sum != slurp(outs[1] / "summary.json") ||
      sum != slurp(outs[2] / "summary.json"))
    ok = false;
  fs::remove_all(base);
  double el = seconds_since(t0);
  return {ok, fmt("byte-identical CSV + JSON across --workers {1, 4} and reruns, %.1f s", el)};
}

// --------------------------------------------------------------- criterion 11

Verdict criterion_11() {
  auto t0 = std::chrono::steady_clock::now();
  using namespace obliqua::geometry;
  auto sc = load("cusp.json");
  Corner c = sc.domain.classify_corner({0.0, 0.0});
  bool kind_ok = c.kind == CornerKind::CuspPoint;
  bool tau_ok = c.tau.has_value() && std::fabs(c.tau->x1 - 1.0) <= 1e-9 &&
                std::fabs(c.tau->x2) <= 1e-9;
  bool L_ok = c.cusp_limit_L.has_value() &&
              std::fabs(*c.cusp_limit_L - (-1.0)) <= 1e-3;

  // C^2 variant: psi1 = x2 - x1^2, tangential second derivative -2 exactly
  using obliqua::expr::parse;
  DomainPiece lower{"lower", parse("x2 - x1^2"),
                    {parse("0.7071067811865475"), parse("0.7071067811865475")}};
  DomainPiece upper{"upper", parse("2*x1^2 - x2"),
                    {parse("0.7071067811865475"), parse("-0.7071067811865475")}};
  Domain c2({lower, upper}, {{{0.0, 0.0}, 0, 1}}, {-0.4, -0.05, 0.4, 0.35});
  Corner cc = c2.classify_corner({0.0, 0.0});
  auto rep = obliqua::conditions::check_cusp_hessian(c2, cc);
  double qf = rep.metrics.count("quadratic_form") ? rep.metrics.at("quadratic_form")
                                                  : std::nan("");
  bool hess_ok = rep.status == obliqua::conditions::CheckStatus::Pass &&
                 std::fabs(std::fabs(qf) - 2.0) <= 1e-9;
  double el = seconds_since(t0);
  bool ok = kind_ok && tau_ok && L_ok && hess_ok;
  return {ok, fmt("kind %s, tau (%.2g, %.2g), L %.6f, Hessian form %.12g, %.1f s",
                  kind_ok ? "CuspPoint" : "WRONG", c.tau ? c.tau->x1 : 0.0,
                  c.tau ? c.tau->x2 : 0.0, c.cusp_limit_L.value_or(0.0), qf, el)};
}

}  // namespace

int main() {
  const char* sdir = std::getenv("OBLIQUA_SCENARIOS");
  if (!sdir) {
    std::fprintf(stderr, "OBLIQUA_SCENARIOS must point at the scenario directory\n");
    return 64;
  }
  g_scenario_dir = sdir;
  if (const char* b = std::getenv("OBLIQUA_BIN")) g_bin = b;

  struct Entry {
    int num;
    const char* title;
    std::function<Verdict()> run;
  };
  std::vector<Entry> entries = {
      {1, "condition checker theta sweep", criterion_1},
      {2, "DW / Condition-G equivalence on random polygons", criterion_2},
      {3, "completely-S transpose symmetry and grid oracle", criterion_3},
      {4, "maximal sets vs subset-definition oracle", criterion_4},
      {5, "local-time support and closure invariants", criterion_5},
      {6, "half-plane RBM terminal law vs |1+N(0,1)|", criterion_6},
      {7, "direct vs time-changed controlled construction", criterion_7},
      {8, "localized vs direct simulation, paste clocks", criterion_8},
      {9, "jump boundary holds and construction agreement", criterion_9},
      {10, "seeded determinism across worker counts", criterion_10},
      {11, "cusp classification, limit, Hessian form", criterion_11},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Verdict v;
    try {
      v = e.run();
    } catch (const std::exception& ex) {
      v = {false, std::string("exception: ") + ex.what()};
    }
    if (!v.pass) ++failures;
    std::printf("criterion %2d [%s]: %s (%s)\n", e.num, v.pass ? "PASS" : "FAIL",
                e.title, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
