#pragma once

#include <cstdint>
#include <variant>

#include "obliqua/conditions.hpp"
#include "obliqua/sde_sim.hpp"

namespace obliqua::jump {

using expr::ScalarField;
using expr::Vec2;
using sim::ControlledPathRecord;
using sim::PathRecord;

struct KernelEscape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Jump kernel p(x, .): either a point mass at an interior point or the
// uniform distribution over a disc contained in E0. Both have p(x, E0) = 1.
struct PointMassKernel {
  Vec2 target;
};
struct UniformDiscKernel {
  Vec2 center;
  double radius = 0.0;
};
using JumpKernel = std::variant<PointMassKernel, UniformDiscKernel>;

// Diffusion in a smooth (single-piece) domain E0 with jump boundary
// conditions: the ambient box stands in for the larger state space E.
struct JumpScenario {
  geometry::Domain domain;  // single piece, E0 = {psi > 0}
  sim::Coefficients coeff;
  JumpKernel kernel;

  // Samples the kernel for the visit with index `visit` on this path.
  Vec2 sample_kernel(std::uint64_t seed, std::uint64_t path_id,
                     std::uint64_t visit) const;
};

// Controlled construction: diffuse while interior (interior clock runs),
// hold at the exit point for an Exp(1) stretch of the boundary clock, then
// jump to a kernel sample and resume.
ControlledPathRecord simulate_jump_controlled(const JumpScenario& js,
                                              std::uint64_t seed,
                                              std::uint64_t path_id, double S,
                                              double ds);

// Constrained construction: same dynamics with instantaneous jumps; a state
// on the boundary at one grid instant is redistributed at the next.
PathRecord simulate_jump_constrained(const JumpScenario& js,
                                     std::uint64_t seed,
                                     std::uint64_t path_id, double T,
                                     double dt);

// Hold durations (boundary-clock stretches between exit and jump), in visit
// order; convenience for distribution tests against Exp(1).
std::vector<double> hold_durations(const ControlledPathRecord& cp, double ds);

// Surface-measure compatibility of an exit region U = {psi_u > 0} with E0:
// samples the boundary of E0 and estimates the arclength lying on the
// boundary of U; Pass iff no sampled arc (isolated transversal crossings
// are fine and are reported with their crossing angles).
conditions::CheckReport check_exit_compatibility(const JumpScenario& js,
                                                 const ScalarField& psi_u,
                                                 int samples = 4096);

}  // namespace obliqua::jump
