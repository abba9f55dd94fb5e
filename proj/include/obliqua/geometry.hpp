#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "obliqua/expr.hpp"

namespace obliqua::geometry {

using expr::Mat2;
using expr::ScalarField;
using expr::Vec2;
using expr::VectorField;

struct NotOnBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AmbiguousTangent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double boundary_tol = 1e-10;
  double corner_tol = 1e-9;
  double cusp_tol = 1e-8;
  double angle_tol = 1e-9;
  double grad_floor = 1e-6;
};

struct BoundingBox {
  double x1_lo = -1.0, x2_lo = -1.0, x1_hi = 1.0, x2_hi = 1.0;
  double width() const { return x1_hi - x1_lo; }
  double height() const { return x2_hi - x2_lo; }
};

// One smooth piece D^i = {psi > 0} with its direction field g^i.
struct DomainPiece {
  std::string name;
  ScalarField psi;
  VectorField g;
};

struct DeclaredCorner {
  Vec2 location;
  int piece_i = 0;
  int piece_j = 0;
};

enum class CornerKind { ConePoint, CuspPoint };

struct Corner {
  Vec2 location;
  int piece_i = 0;
  int piece_j = 0;
  CornerKind kind = CornerKind::ConePoint;
  Vec2 normal_i, normal_j;  // unit inward normals at the corner
  std::optional<Vec2> tau;  // cusp tangent, cusp points only
  std::optional<double> cusp_limit_L;
  double cusp_limit_spread = 0.0;  // spread of the last extrapolants
};

// Closed convex cone stored as an angular interval [angle_lo, angle_hi],
// width in [0, pi]. Degenerate (width 0) represents a single ray.
struct Sector {
  double angle_lo = 0.0;
  double angle_hi = 0.0;
  bool degenerate_half_plane = false;  // width exactly pi (flagged)

  double width() const { return angle_hi - angle_lo; }
  bool contains(const Vec2& u, double angle_tol = 1e-9) const;
  Vec2 midpoint_direction() const;
  static Sector from_ray(const Vec2& u);
  // Minimal sector containing all generators; throws if they span > pi + tol.
  static Sector spanning(const std::vector<Vec2>& generators, double angle_tol = 1e-9);
  static Sector half_plane(const Vec2& tau);  // {u : u . tau >= 0}
};

struct SpanTooWide : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Domain {
 public:
  Domain(std::vector<DomainPiece> pieces, std::vector<DeclaredCorner> corners,
         BoundingBox box, Tolerances tol = {});

  const std::vector<DomainPiece>& pieces() const { return pieces_; }
  const std::vector<DeclaredCorner>& declared_corners() const { return corners_; }
  const BoundingBox& bounding_box() const { return box_; }
  const Tolerances& tol() const { return tol_; }

  // All psi^i > -slack (slack = 0 gives the closure exactly up to fp noise).
  bool in_closure(const Vec2& x, double slack = 0.0) const;
  bool in_open(const Vec2& x) const;
  double min_psi(const Vec2& x) const;

  std::set<int> index_set(const Vec2& x, double tol) const;
  Vec2 unit_normal(int piece_index, const Vec2& x) const;
  Corner classify_corner(const Vec2& x0) const;
  Sector normal_cone(const Vec2& x0) const;
  Sector direction_cone(const Vec2& x0) const;
  std::vector<Vec2> boundary_sample(int piece_index, int count) const;

  // Newton projection of x onto {psi^i = 0} along the gradient.
  std::optional<Vec2> project_to_piece(int piece_index, Vec2 x,
                                       int max_iters = 50) const;

 private:
  const DeclaredCorner* find_declared(const Vec2& x0) const;

  std::vector<DomainPiece> pieces_;
  std::vector<DeclaredCorner> corners_;
  BoundingBox box_;
  Tolerances tol_;
};

// Connectivity heuristic for D ∩ B_r(x0), by flood fill on a local grid.
struct ConnectivityReport {
  bool connected = false;
  double radius = 0.0;
  int components = 0;
  int cells_inside = 0;
};
ConnectivityReport local_connectivity(const Domain& d, const Vec2& x0,
                                      double radius, int grid = 64);

}  // namespace obliqua::geometry
