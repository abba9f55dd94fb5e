#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "obliqua/conditions.hpp"
#include "obliqua/sde_sim.hpp"

namespace obliqua::scenario {

using expr::Vec2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PointInitial {
  Vec2 at;
};
struct UniformDiscInitial {
  Vec2 center;
  double radius = 0.0;
};

struct Scenario {
  std::string name;
  geometry::Domain domain;
  sim::Coefficients coeff;
  std::variant<PointInitial, UniformDiscInitial> initial;
  double T = 1.0;
  double dt = 1e-3;
  std::uint64_t paths = 1;
  std::uint64_t seed = 0;
  conditions::CheckConfig check_cfg;
  std::uint64_t content_hash = 0;  // of the file bytes, for provenance

  // Initial state for one path; uniform-disc draws use stream 9.
  Vec2 draw_initial(std::uint64_t path_id) const;
};

// Parses a scenario JSON document. `overrides` substitutes numeric parameters
// referenced by name inside expression strings (the file's own "params" block
// provides defaults). Throws ConfigError with a human-readable message.
Scenario load_scenario(const std::string& json_text,
                       const std::map<std::string, double>& overrides = {});

Scenario load_scenario_file(const std::string& path,
                            const std::map<std::string, double>& overrides = {});

// Tolerance preset selected by OBLIQUA_TOL_PROFILE: "default", "strict"
// (tighter floors), or "loose" (for exploratory runs).
void apply_tol_profile(const std::string& profile, geometry::Tolerances& tol,
                       conditions::CheckConfig& cfg);

}  // namespace obliqua::scenario
