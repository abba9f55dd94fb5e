#include "obliqua/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "obliqua/angular.hpp"

namespace obliqua::polyhedral {

namespace {

double angle_of(const Vec2& u) { return std::atan2(u.x2, u.x1); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Feasible t-interval of the line x = b_j n^j + t (n^j)^perp under the other
// constraints. Returns {lo, hi}; an empty face comes back with hi < lo.
std::pair<double, double> face_interval(const PolygonSpec& poly, int j,
                                        double tie_tol) {
  Vec2 n = poly.normals[j];
  Vec2 p = n * poly.offsets[j];
  Vec2 dir = n.perp();
  double lo = -1e18, hi = 1e18;
  for (int k = 0; k < poly.size(); ++k) {
    if (k == j) continue;
    double a = dir.dot(poly.normals[k]);
    double c = poly.offsets[k] - p.dot(poly.normals[k]);
    if (std::fabs(a) < 1e-14) {
      if (c > tie_tol) return {1.0, 0.0};
    } else if (a > 0.0) {
      lo = std::max(lo, c / a);
    } else {
      hi = std::min(hi, c / a);
    }
  }
  return {lo, hi};
}

}  // namespace

std::vector<Vertex> enumerate_vertices(const PolygonSpec& poly, double tie_tol) {
  if (poly.size() < 3) throw UnboundedOrEmpty("fewer than 3 half-planes");
  // bounded iff the normals do not all fit in a closed half-plane
  try {
    (void)geometry::Sector::spanning(poly.normals);
    throw UnboundedOrEmpty("polygon is unbounded (normals in a half-plane)");
  } catch (const geometry::SpanTooWide&) {
    // normals span more than pi: bounded, proceed
  }

  std::vector<Vertex> out;
  for (int i = 0; i < poly.size(); ++i) {
    for (int j = i + 1; j < poly.size(); ++j) {
      const Vec2& ni = poly.normals[i];
      const Vec2& nj = poly.normals[j];
      double det = ni.x1 * nj.x2 - ni.x2 * nj.x1;
      if (std::fabs(det) < 1e-12) continue;
      Vec2 x{(poly.offsets[i] * nj.x2 - poly.offsets[j] * ni.x2) / det,
             (ni.x1 * poly.offsets[j] - nj.x1 * poly.offsets[i]) / det};
      bool feasible = true;
      for (int k = 0; k < poly.size() && feasible; ++k)
        if (x.dot(poly.normals[k]) < poly.offsets[k] - tie_tol) feasible = false;
      if (!feasible) continue;
      bool dup = false;
      for (const Vertex& v : out)
        if ((v.point - x).norm() < 1e-9) dup = true;
      if (dup) continue;
      Vertex v;
      v.point = x;
      for (int k = 0; k < poly.size(); ++k)
        if (std::fabs(x.dot(poly.normals[k]) - poly.offsets[k]) <= tie_tol)
          v.active.push_back(k);
      out.push_back(v);
    }
  }
  if (out.empty()) throw UnboundedOrEmpty("no feasible vertex: empty polygon");
  return out;
}

MinimalityResult check_minimal_representation(const PolygonSpec& poly,
                                              double tie_tol) {
  for (int j = 0; j < poly.size(); ++j) {
    auto [lo, hi] = face_interval(poly, j, tie_tol);
    if (hi - lo <= tie_tol) return {false, j};
  }
  return {true, std::nullopt};
}

std::vector<std::vector<int>> maximal_sets(const PolygonSpec& poly,
                                           double tie_tol) {
  std::set<std::vector<int>> sets;
  for (const Vertex& v : enumerate_vertices(poly, tie_tol)) sets.insert(v.active);
  for (int j = 0; j < poly.size(); ++j) {
    auto [lo, hi] = face_interval(poly, j, tie_tol);
    if (hi - lo <= tie_tol) continue;  // vacuous face
    // midpoint of the face is a relative-interior boundary point: I = {j}
    sets.insert({j});
  }
  return {sets.begin(), sets.end()};
}

ReflectionSubmatrix reflection_submatrix(const PolygonSpec& poly,
                                         const std::vector<int>& K) {
  if (K.empty() || K.size() > 2)
    throw std::invalid_argument("index set must have size 1 or 2");
  ReflectionSubmatrix M;
  M.index_set = K;
  for (std::size_t r = 0; r < K.size(); ++r)
    for (std::size_t c = 0; c < K.size(); ++c)
      M.m[r][c] = poly.normals[K[r]].dot(poly.directions[K[c]]);
  return M;
}

bool is_completely_S(const ReflectionSubmatrix& M) {
  if (M.dim() == 1) return M.m[0][0] > 0.0;
  const double a = M.m[0][0], b = M.m[0][1], c = M.m[1][0], d = M.m[1][1];
  if (a <= 0.0 || d <= 0.0) return false;  // 1x1 principal submatrices
  if (b >= 0.0 || c >= 0.0) return true;
  return a * d > b * c;
}

DWCheck check_DW_assumption(const PolygonSpec& poly, double tie_tol) {
  DWCheck result;
  for (const std::vector<int>& K : maximal_sets(poly, tie_tol)) {
    if (K.size() == 1) {
      int i = K[0];
      if (poly.normals[i].dot(poly.directions[i]) > 0.0)
        result.witnesses.push_back({K, poly.normals[i]});
      else {
        result.pass = false;
        result.failing_sets.push_back(K);
      }
      continue;
    }
    // pair: e ranges over the cone spanned by the two normals
    std::vector<angular::Arc> feasible;
    try {
      geometry::Sector N =
          geometry::Sector::spanning({poly.normals[K[0]], poly.normals[K[1]]});
      feasible = {{N.angle_lo, N.angle_hi}};
    } catch (const geometry::SpanTooWide&) {
      result.pass = false;
      result.failing_sets.push_back(K);
      continue;
    }
    for (int j : K)
      feasible =
          angular::intersect_open_halfplane(feasible, angle_of(poly.directions[j]));
    auto e = angular::widest_midpoint(feasible, /*allow_degenerate=*/true);
    bool ok = static_cast<bool>(e);
    if (ok)
      for (int j : K) ok = ok && e->dot(poly.directions[j]) > 1e-12;
    if (ok) {
      result.witnesses.push_back({K, *e});
    } else {
      result.pass = false;
      result.failing_sets.push_back(K);
    }
  }
  return result;
}

geometry::Domain as_domain(const PolygonSpec& poly, double tie_tol) {
  std::vector<Vertex> verts = enumerate_vertices(poly, tie_tol);
  std::vector<geometry::DomainPiece> pieces;
  for (int i = 0; i < poly.size(); ++i) {
    geometry::DomainPiece p;
    p.name = "side" + std::to_string(i);
    p.psi = expr::parse("(" + fmt(poly.normals[i].x1) + ")*x1 + (" +
                        fmt(poly.normals[i].x2) + ")*x2 - (" +
                        fmt(poly.offsets[i]) + ")");
    p.g.u1 = expr::parse(fmt(poly.directions[i].x1));
    p.g.u2 = expr::parse(fmt(poly.directions[i].x2));
    pieces.push_back(std::move(p));
  }
  std::vector<geometry::DeclaredCorner> corners;
  geometry::BoundingBox box;
  box.x1_lo = box.x2_lo = 1e18;
  box.x1_hi = box.x2_hi = -1e18;
  for (const Vertex& v : verts) {
    if (v.active.size() == 2)
      corners.push_back({v.point, v.active[0], v.active[1]});
    box.x1_lo = std::min(box.x1_lo, v.point.x1);
    box.x1_hi = std::max(box.x1_hi, v.point.x1);
    box.x2_lo = std::min(box.x2_lo, v.point.x2);
    box.x2_hi = std::max(box.x2_hi, v.point.x2);
  }
  double margin = 0.25 * std::max(box.x1_hi - box.x1_lo, box.x2_hi - box.x2_lo) + 0.5;
  box.x1_lo -= margin;
  box.x2_lo -= margin;
  box.x1_hi += margin;
  box.x2_hi += margin;
  return geometry::Domain(std::move(pieces), std::move(corners), box);
}

EquivalenceResult equivalence_test(const PolygonSpec& poly, double tie_tol) {
  EquivalenceResult res;
  res.dw_pass = check_DW_assumption(poly, tie_tol).pass;

  geometry::Domain dom = as_domain(poly, tie_tol);
  res.g2_pass = true;
  for (const std::vector<int>& K : maximal_sets(poly, tie_tol)) {
    Vec2 point;
    if (K.size() == 1) {
      auto [lo, hi] = face_interval(poly, K[0], tie_tol);
      double t = 0.5 * (lo + hi);
      point = poly.normals[K[0]] * poly.offsets[K[0]] +
              poly.normals[K[0]].perp() * t;
    } else {
      bool found = false;
      for (const Vertex& v : enumerate_vertices(poly, tie_tol)) {
        if (v.active == K) {
          point = v.point;
          found = true;
          break;
        }
      }
      if (!found) continue;
    }
    conditions::CheckReport r = conditions::check_G2(dom, point);
    if (r.status != conditions::CheckStatus::Pass) res.g2_pass = false;
  }
  res.agree = res.dw_pass == res.g2_pass;
  return res;
}

}  // namespace obliqua::polyhedral
