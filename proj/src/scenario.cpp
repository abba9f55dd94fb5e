#include "obliqua/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace obliqua::scenario {

namespace {

using nlohmann::json;

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Whole-word substitution of parameter names by parenthesized literals.
std::string substitute_params(std::string text,
                              const std::map<std::string, double>& params) {
  for (const auto& [name, value] : params) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.17g)", value);
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text.compare(i, name.size(), name) == 0 &&
          (i == 0 || !ident_char(text[i - 1])) &&
          (i + name.size() >= text.size() || !ident_char(text[i + name.size()]))) {
        out += buf;
        i += name.size();
      } else {
        out += text[i++];
      }
    }
    text = std::move(out);
  }
  return text;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

expr::ScalarField parse_expr(const std::string& raw,
                             const std::map<std::string, double>& params,
                             const std::string& where) {
  try {
    return expr::parse(substitute_params(raw, params));
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Vec2 read_vec(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(where + ": expected [x1, x2]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Vec2 Scenario::draw_initial(std::uint64_t path_id) const {
  if (const auto* p = std::get_if<PointInitial>(&initial)) return p->at;
  const auto& u = std::get<UniformDiscInitial>(initial);
  rng::Counter c{seed, path_id, 9};
  double r = u.radius * std::sqrt(c.uniform(0));
  double a = 2.0 * 3.14159265358979323846 * c.uniform(1);
  return u.center + Vec2{r * std::cos(a), r * std::sin(a)};
}

void apply_tol_profile(const std::string& profile, geometry::Tolerances& tol,
                       conditions::CheckConfig& cfg) {
  if (profile.empty() || profile == "default") return;
  if (profile == "strict") {
    tol.boundary_tol = 1e-12;
    tol.corner_tol = 1e-10;
    cfg.g_dot_n_floor = 1e-8;
    cfg.cusp_spread_tol = 1e-4;
    cfg.boundary_samples = 4096;
  } else if (profile == "loose") {
    tol.boundary_tol = 1e-8;
    tol.corner_tol = 1e-7;
    cfg.cusp_spread_tol = 1e-2;
    cfg.boundary_samples = 512;
  } else {
    throw ConfigError("unknown tolerance profile '" + profile + "'");
  }
}

Scenario load_scenario(const std::string& json_text,
                       const std::map<std::string, double>& overrides) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  std::map<std::string, double> params;
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items())
      params[k] = v.get<double>();
  for (const auto& [k, v] : overrides) params[k] = v;

  geometry::Tolerances tol;
  conditions::CheckConfig cfg;
  if (const char* prof = std::getenv("OBLIQUA_TOL_PROFILE"))
    apply_tol_profile(prof, tol, cfg);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (t.contains("boundary_tol")) tol.boundary_tol = t.at("boundary_tol");
    if (t.contains("corner_tol")) tol.corner_tol = t.at("corner_tol");
    if (t.contains("cusp_tol")) tol.cusp_tol = t.at("cusp_tol");
    if (t.contains("angle_tol")) tol.angle_tol = t.at("angle_tol");
    if (t.contains("grad_floor")) tol.grad_floor = t.at("grad_floor");
    if (t.contains("g_dot_n_floor")) cfg.g_dot_n_floor = t.at("g_dot_n_floor");
    if (t.contains("cusp_spread_tol")) cfg.cusp_spread_tol = t.at("cusp_spread_tol");
    if (t.contains("boundary_samples"))
      cfg.boundary_samples = t.at("boundary_samples").get<int>();
  }

  try {
    if (!j.contains("domain")) throw ConfigError("missing 'domain' block");
    const json& dj = j.at("domain");

    std::vector<geometry::DomainPiece> pieces;
    for (const auto& pj : dj.at("pieces")) {
      geometry::DomainPiece p;
      p.name = pj.value("name", "piece" + std::to_string(pieces.size()));
      p.psi = parse_expr(pj.at("psi").get<std::string>(), params,
                         "domain.pieces[" + p.name + "].psi");
      const json& gj = pj.at("g");
      if (!gj.is_array() || gj.size() != 2)
        throw ConfigError("piece '" + p.name + "': g must be two expressions");
      p.g.u1 = parse_expr(gj[0].get<std::string>(), params,
                          "domain.pieces[" + p.name + "].g[0]");
      p.g.u2 = parse_expr(gj[1].get<std::string>(), params,
                          "domain.pieces[" + p.name + "].g[1]");
      pieces.push_back(std::move(p));
    }

    std::vector<geometry::DeclaredCorner> corners;
    if (dj.contains("corners"))
      for (const auto& cj : dj.at("corners")) {
        geometry::DeclaredCorner c;
        c.location = read_vec(cj.at("at"), "domain.corners.at");
        c.piece_i = cj.at("pieces")[0].get<int>();
        c.piece_j = cj.at("pieces")[1].get<int>();
        corners.push_back(c);
      }

    geometry::BoundingBox box;
    const json& bj = dj.at("box");
    if (!bj.is_array() || bj.size() != 4)
      throw ConfigError("domain.box must be [x1_lo, x2_lo, x1_hi, x2_hi]");
    box.x1_lo = bj[0];
    box.x2_lo = bj[1];
    box.x1_hi = bj[2];
    box.x2_hi = bj[3];

    Scenario sc{
        j.value("name", "scenario"),
        geometry::Domain(std::move(pieces), std::move(corners), box, tol),
        {},
        PointInitial{},
        1.0,
        1e-3,
        1,
        0,
        cfg,
        fnv1a(json_text)};

    const json& cj = j.at("coefficients");
    sc.coeff.b.u1 = parse_expr(cj.at("b")[0].get<std::string>(), params, "coefficients.b[0]");
    sc.coeff.b.u2 = parse_expr(cj.at("b")[1].get<std::string>(), params, "coefficients.b[1]");
    const json& sj = cj.at("sigma");
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        sc.coeff.sigma.entries[r][c] =
            parse_expr(sj[r][c].get<std::string>(), params, "coefficients.sigma");

    const json& ij = j.at("initial");
    std::string itype = ij.at("type").get<std::string>();
    if (itype == "point") {
      PointInitial p{read_vec(ij.at("at"), "initial.at")};
      if (!sc.domain.in_closure(p.at, sc.domain.tol().boundary_tol))
        throw ConfigError("initial point lies outside closure of the domain");
      sc.initial = p;
    } else if (itype == "uniform_disc") {
      UniformDiscInitial u{read_vec(ij.at("center"), "initial.center"),
                           ij.at("radius").get<double>()};
      if (u.radius <= 0.0) throw ConfigError("initial.radius must be positive");
      for (int k = 0; k < 16; ++k) {
        double a = 2.0 * 3.14159265358979323846 * k / 16.0;
        Vec2 rim = u.center + Vec2{std::cos(a), std::sin(a)} * u.radius;
        if (!sc.domain.in_closure(rim, sc.domain.tol().boundary_tol))
          throw ConfigError("initial disc is not contained in closure of the domain");
      }
      sc.initial = u;
    } else {
      throw ConfigError("initial.type must be 'point' or 'uniform_disc'");
    }

    if (j.contains("run")) {
      const json& rj = j.at("run");
      sc.T = rj.value("T", sc.T);
      sc.dt = rj.value("dt", sc.dt);
      sc.paths = rj.value("paths", sc.paths);
      sc.seed = rj.value("seed", sc.seed);
    }
    if (sc.T <= 0.0 || sc.dt <= 0.0 || sc.dt > sc.T)
      throw ConfigError("run block needs 0 < dt <= T");
    return sc;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

Scenario load_scenario_file(const std::string& path,
                            const std::map<std::string, double>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str(), overrides);
}

}  // namespace obliqua::scenario
