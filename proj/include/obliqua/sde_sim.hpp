#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "obliqua/expr.hpp"
#include "obliqua/geometry.hpp"
#include "obliqua/rng.hpp"

namespace obliqua::sim {

using expr::Mat2;
using expr::MatrixField;
using expr::Vec2;
using expr::VectorField;

struct ProjectionFailure : std::runtime_error {
  std::uint64_t step;
  explicit ProjectionFailure(std::uint64_t k)
      : std::runtime_error("pushback did not converge at step " +
                           std::to_string(k)),
        step(k) {}
};
struct SeamMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CoverGap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Coefficients {
  VectorField b;
  MatrixField sigma;
};

// Reflected-Euler trajectory on a uniform grid.
struct PathRecord {
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t path_id = 0;
  std::vector<double> t;
  std::vector<Vec2> x;
  std::vector<double> lambda;          // cumulative, nondecreasing
  std::vector<Vec2> gamma;             // valid where boundary_flag is set
  std::vector<std::uint8_t> boundary_flag;
  std::vector<Vec2> dW;                // per step, dW[k] drives x[k] -> x[k+1]
  bool truncated = false;              // time change ran out of interior clock
};

struct Lambda1Atom {
  double s = 0.0;
  Vec2 point;
  Vec2 direction;
  double mass = 0.0;
};

// Controlled process in the control clock: interior clock lambda0 plus
// boundary clock lambda1, with the boundary control measure as atoms.
struct ControlledPathRecord {
  double ds = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t path_id = 0;
  std::vector<double> s;
  std::vector<Vec2> y;
  std::vector<double> lambda0;
  std::vector<double> lambda1;
  std::vector<Lambda1Atom> atoms;
};

inline constexpr double kNoExit = std::numeric_limits<double>::infinity();

struct StoppedPath {
  PathRecord record;
  double exit_time = kNoExit;          // tau^U, +inf sentinel when no exit
  std::size_t exit_index = 0;
};

struct StoppedControlledPath {
  ControlledPathRecord record;
  double exit_time = kNoExit;          // theta^U
  std::size_t exit_index = 0;
};

// Precomputed per-domain simulation state (gradients, corner push data).
class SimContext {
 public:
  SimContext(const geometry::Domain& domain, Coefficients coeff);

  const geometry::Domain& domain() const { return *domain_; }
  const Coefficients& coeff() const { return coeff_; }
  Vec2 grad_psi(int piece, const Vec2& x) const;

  // unit direction in G(corner) with positive inner product against both
  // normals, when one exists (used as corner pushback fallback and as the
  // boundary control direction at corners)
  std::optional<Vec2> corner_push(int corner_index) const;
  // nearest declared corner within `band`, if any
  std::optional<int> nearest_corner(const Vec2& x, double band) const;

  int max_push_iters = 64;
  double corner_band = 1e-6;

 private:
  const geometry::Domain* domain_;
  Coefficients coeff_;
  std::vector<VectorField> grads_;
  std::vector<std::optional<Vec2>> corner_push_;
};

struct StepResult {
  Vec2 x_next;
  double dlambda = 0.0;
  std::optional<Vec2> gamma;
};

// One reflected Euler step: propose, then push back along the reflection
// directions of the violated pieces until the state re-enters closure(D).
StepResult euler_reflect_step(const SimContext& ctx, const Vec2& x, double dt,
                              const Vec2& dW, std::uint64_t step_index = 0);

PathRecord simulate_path(const SimContext& ctx, const Vec2& x0,
                         std::uint64_t seed, std::uint64_t path_id, double T,
                         double dt);

ControlledPathRecord simulate_controlled(const SimContext& ctx, const Vec2& y0,
                                         std::uint64_t seed,
                                         std::uint64_t path_id, double S,
                                         double ds);

// X(t) = Y(lambda0^{-1}(t)) via the right-continuous generalized inverse;
// boundary control mass between interior-clock levels becomes local-time
// increments with the mass-weighted mean direction.
PathRecord time_change(const ControlledPathRecord& cp, double dt_out,
                       double horizon);

using RegionPredicate = std::function<bool(const Vec2&)>;

StoppedPath stop_at_exit(const PathRecord& p, const RegionPredicate& in_U);
StoppedControlledPath stop_at_exit(const ControlledPathRecord& p,
                                   const RegionPredicate& in_U);

// Concatenate a stopped head with a continuation starting at the exit state;
// clocks accumulate across the seam.
PathRecord paste(const StoppedPath& head, const PathRecord& continuation);

// Cover-aware simulation: corner balls of radius r0 plus the remainder away
// from corners; the stream is re-keyed at every cover exit (paste semantics).
PathRecord localized_simulate(const SimContext& ctx, const Vec2& x0,
                              double r0, std::uint64_t seed,
                              std::uint64_t path_id, double T, double dt);

// Consistency helpers used by tests and the acceptance suite.
struct PathInvariantReport {
  bool in_closure = true;
  bool lambda_monotone = true;
  bool lambda_support = true;  // sum of interior-step dlambda is exactly 0
  double worst_psi = 0.0;
};
PathInvariantReport verify_path_invariants(const SimContext& ctx,
                                           const PathRecord& p,
                                           double psi_slack = 1e-9);

}  // namespace obliqua::sim
