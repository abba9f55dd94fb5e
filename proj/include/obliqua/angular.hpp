#pragma once

#include <optional>
#include <vector>

#include "obliqua/expr.hpp"

namespace obliqua::angular {

// Closed arc [lo, hi] of directions, hi >= lo, hi - lo <= 2*pi.
struct Arc {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Intersect a union of arcs with the open half-plane of directions having
// positive inner product with the unit vector at angle phi. The open edges
// are kept as closed endpoints here; strictness is enforced by the caller
// when it verifies a concrete witness.
std::vector<Arc> intersect_open_halfplane(const std::vector<Arc>& arcs,
                                          double phi);

// Direction at the midpoint of the widest arc, if any arc has positive width.
// Zero-width arcs are admitted only if `allow_degenerate`.
std::optional<expr::Vec2> widest_midpoint(const std::vector<Arc>& arcs,
                                          bool allow_degenerate = false);

}  // namespace obliqua::angular
