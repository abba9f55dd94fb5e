#pragma once

#include <map>
#include <string>
#include <vector>

#include "obliqua/geometry.hpp"

namespace obliqua::conditions {

using expr::MatrixField;
using expr::Vec2;
using expr::VectorField;
using geometry::Corner;
using geometry::Domain;
using geometry::Sector;

enum class ConditionId { D_i, D_ii, D_iii, G_i, G_ii, A_i, A_ii, C2cusp, ExitCompat };
enum class CheckStatus { Pass, Fail, Inconclusive };

std::string to_string(ConditionId id);
std::string to_string(CheckStatus s);

struct Witness {
  Vec2 point;
  double value = 0.0;
  std::string note;
};

struct CheckReport {
  ConditionId id = ConditionId::D_i;
  CheckStatus status = CheckStatus::Pass;
  std::vector<Witness> witnesses;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> metrics;
  std::string detail;
};

struct CheckConfig {
  double g_dot_n_floor = 1e-6;
  double det_floor = 1e-9;
  double hessian_tol = 1e-9;
  double limsup_cap = 1e6;
  double cusp_spread_tol = 1e-3;  // relative spread of the last extrapolants
  int boundary_samples = 2048;
  int minimality_grid = 96;
  int g2_boundary_samples = 256;
  std::uint64_t grid_jitter_seed = 0x9e3779b97f4a7c15ull;
};

// Condition on the representation: dropping any piece strictly enlarges D.
CheckReport check_minimality(const Domain& d, const CheckConfig& cfg = {});

// Curvature-type limsup bounds at a cone point; cusp-limit convergence at a
// cusp point.
CheckReport check_corner_regularity(const Domain& d, const Corner& corner,
                                    const CheckConfig& cfg = {});

// Second-order sufficient test at a C^2 cusp.
CheckReport check_cusp_hessian(const Domain& d, const Corner& corner,
                               const CheckConfig& cfg = {});

// inf over each piece boundary of g.n, plus a sampled Lipschitz estimate.
CheckReport check_G1(const Domain& d, const CheckConfig& cfg = {});

// Existence of a unit e in the normal cone with e.g > 0 for all generators,
// decided exactly with angular intervals. Returns the witness on Pass.
CheckReport check_G2(const Domain& d, const Vec2& x0, const CheckConfig& cfg = {});

// Nonsingular dispersion at corners; sampled Lipschitz estimates for b, sigma.
CheckReport check_A(const Domain& d, const VectorField& b, const MatrixField& sigma,
                    const CheckConfig& cfg = {});

// Full battery used by the CLI: D(i)-(iii), cusp Hessian where applicable,
// G(i)-(ii) (corners plus sampled smooth boundary points), A(i)-(ii).
std::vector<CheckReport> run_all_checks(const Domain& d, const VectorField& b,
                                        const MatrixField& sigma,
                                        const CheckConfig& cfg = {});

}  // namespace obliqua::conditions
