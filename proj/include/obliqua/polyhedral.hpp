#pragma once

#include <optional>
#include <vector>

#include "obliqua/conditions.hpp"
#include "obliqua/expr.hpp"
#include "obliqua/geometry.hpp"

namespace obliqua::polyhedral {

using expr::Vec2;

struct UnboundedOrEmpty : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Convex polygon D = inter_i {x . n^i > b_i} with constant unit reflection
// direction g^i on each side.
struct PolygonSpec {
  std::vector<Vec2> normals;    // distinct unit vectors
  std::vector<double> offsets;  // b_i
  std::vector<Vec2> directions; // g^i, unit
  int size() const { return static_cast<int>(normals.size()); }
};

struct Vertex {
  Vec2 point;
  std::vector<int> active;  // sorted active constraint indices
};

// All vertices with their active sets; throws UnboundedOrEmpty.
std::vector<Vertex> enumerate_vertices(const PolygonSpec& poly,
                                       double tie_tol = 1e-10);

struct MinimalityResult {
  bool minimal = true;
  std::optional<int> redundant_index;
};
MinimalityResult check_minimal_representation(const PolygonSpec& poly,
                                              double tie_tol = 1e-10);

// { I(x0) : x0 in boundary(D) }: singletons of nonvacuous faces plus the
// active sets at vertices; deduplicated, sorted.
std::vector<std::vector<int>> maximal_sets(const PolygonSpec& poly,
                                           double tie_tol = 1e-10);

// Entries (n^i . g^j) restricted to an index set of size 1 or 2.
struct ReflectionSubmatrix {
  std::vector<int> index_set;
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // top-left |K| x |K| block used
  int dim() const { return static_cast<int>(index_set.size()); }
};
ReflectionSubmatrix reflection_submatrix(const PolygonSpec& poly,
                                         const std::vector<int>& K);

// Every principal submatrix admits x > 0 with Mx > 0 (exact sign analysis).
bool is_completely_S(const ReflectionSubmatrix& M);

struct DWCheck {
  bool pass = true;
  std::vector<std::vector<int>> failing_sets;
  // per maximal set: the feasibility witness e, when one exists
  std::vector<std::pair<std::vector<int>, Vec2>> witnesses;
};
// For each maximal K: a nonnegative combination e of {n^i, i in K} with
// e . g^j > 0 for all j in K, decided by angular-interval arithmetic.
DWCheck check_DW_assumption(const PolygonSpec& poly, double tie_tol = 1e-10);

// Encode the polygon as an implicit-piece Domain with affine psi and
// constant g.
geometry::Domain as_domain(const PolygonSpec& poly, double tie_tol = 1e-10);

struct EquivalenceResult {
  bool dw_pass = false;
  bool g2_pass = false;
  bool agree = false;
};
// Cross-check the DW assumption against the Condition-G checker run on the
// same polygon encoded as an implicit domain.
EquivalenceResult equivalence_test(const PolygonSpec& poly,
                                   double tie_tol = 1e-10);

}  // namespace obliqua::polyhedral
