#include "obliqua/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace obliqua::geometry {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_2pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

double angle_of(const Vec2& u) { return std::atan2(u.x2, u.x1); }

}  // namespace

bool Sector::contains(const Vec2& u, double angle_tol) const {
  double delta = wrap_2pi(angle_of(u) - angle_lo);
  return delta <= width() + angle_tol || delta >= 2.0 * kPi - angle_tol;
}

Vec2 Sector::midpoint_direction() const {
  double mid = angle_lo + 0.5 * width();
  return {std::cos(mid), std::sin(mid)};
}

Sector Sector::from_ray(const Vec2& u) {
  double a = angle_of(u.unit());
  return {a, a, false};
}

Sector Sector::spanning(const std::vector<Vec2>& generators, double angle_tol) {
  if (generators.empty()) throw SpanTooWide("no generators");
  std::vector<double> angles;
  angles.reserve(generators.size());
  for (const Vec2& g : generators) angles.push_back(angle_of(g.unit()));

  // Minimal enclosing arc: try each generator as the low edge.
  double best_lo = angles[0], best_width = 4.0 * kPi;
  for (double lo : angles) {
    double w = 0.0;
    for (double a : angles) w = std::max(w, wrap_2pi(a - lo));
    if (w < best_width) {
      best_width = w;
      best_lo = lo;
    }
  }
  if (best_width > kPi + angle_tol)
    throw SpanTooWide("generators span an angle greater than pi");
  Sector s;
  s.angle_lo = best_lo;
  s.angle_hi = best_lo + std::min(best_width, kPi);
  s.degenerate_half_plane = best_width >= kPi - angle_tol;
  return s;
}

Sector Sector::half_plane(const Vec2& tau) {
  double a = angle_of(tau.unit());
  Sector s;
  s.angle_lo = a - 0.5 * kPi;
  s.angle_hi = a + 0.5 * kPi;
  s.degenerate_half_plane = true;
  return s;
}

Domain::Domain(std::vector<DomainPiece> pieces,
               std::vector<DeclaredCorner> corners, BoundingBox box,
               Tolerances tol)
    : pieces_(std::move(pieces)), corners_(std::move(corners)), box_(box),
      tol_(tol) {
  if (pieces_.empty()) throw std::invalid_argument("domain needs >= 1 piece");
  for (const DeclaredCorner& c : corners_) {
    if (c.piece_i < 0 || c.piece_j < 0 ||
        c.piece_i >= static_cast<int>(pieces_.size()) ||
        c.piece_j >= static_cast<int>(pieces_.size()) || c.piece_i == c.piece_j)
      throw std::invalid_argument("corner references invalid piece pair");
    double ri = std::fabs(pieces_[c.piece_i].psi.eval(c.location));
    double rj = std::fabs(pieces_[c.piece_j].psi.eval(c.location));
    if (ri > tol_.corner_tol || rj > tol_.corner_tol)
      throw std::invalid_argument(
          "declared corner does not lie on both declared pieces");
    // |I(x0)| = 2 at every corner
    if (index_set(c.location, tol_.corner_tol).size() != 2)
      throw std::invalid_argument("corner has |I(x0)| != 2");
  }
}

bool Domain::in_closure(const Vec2& x, double slack) const {
  for (const DomainPiece& p : pieces_)
    if (p.psi.eval(x) < -slack) return false;
  return true;
}

bool Domain::in_open(const Vec2& x) const {
  for (const DomainPiece& p : pieces_)
    if (p.psi.eval(x) <= 0.0) return false;
  return true;
}

double Domain::min_psi(const Vec2& x) const {
  double m = pieces_[0].psi.eval(x);
  for (std::size_t i = 1; i < pieces_.size(); ++i)
    m = std::min(m, pieces_[i].psi.eval(x));
  return m;
}

std::set<int> Domain::index_set(const Vec2& x, double tol) const {
  std::set<int> out;
  for (int i = 0; i < static_cast<int>(pieces_.size()); ++i)
    if (std::fabs(pieces_[i].psi.eval(x)) <= tol) out.insert(i);
  return out;
}

Vec2 Domain::unit_normal(int piece_index, const Vec2& x) const {
  const DomainPiece& p = pieces_.at(piece_index);
  if (std::fabs(p.psi.eval(x)) > tol_.boundary_tol)
    throw NotOnBoundary("point is not on the piece boundary");
  Vec2 grad = expr::gradient(p.psi).eval(x);
  if (grad.norm() <= tol_.grad_floor)
    throw DegenerateGradient("gradient below grad_floor on boundary");
  return grad.unit();
}

std::optional<Vec2> Domain::project_to_piece(int piece_index, Vec2 x,
                                             int max_iters) const {
  const DomainPiece& p = pieces_.at(piece_index);
  VectorField grad = expr::gradient(p.psi);
  for (int it = 0; it < max_iters; ++it) {
    double v = p.psi.eval(x);
    if (std::fabs(v) <= tol_.boundary_tol) return x;
    Vec2 g = grad.eval(x);
    double g2 = g.dot(g);
    if (g2 <= tol_.grad_floor * tol_.grad_floor) return std::nullopt;
    x = x - g * (v / g2);
  }
  if (std::fabs(p.psi.eval(x)) <= tol_.boundary_tol) return x;
  return std::nullopt;
}

std::vector<Vec2> Domain::boundary_sample(int piece_index, int count) const {
  const int grid = std::max(48, static_cast<int>(std::ceil(2.0 * std::sqrt(
                                     static_cast<double>(count)))));
  std::vector<Vec2> converged;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      Vec2 seed{box_.x1_lo + box_.width() * (i + 0.5) / grid,
                box_.x2_lo + box_.height() * (j + 0.5) / grid};
      auto proj = project_to_piece(piece_index, seed);
      if (!proj) continue;
      if (!in_closure(*proj, 1e-9)) continue;
      converged.push_back(*proj);
    }
  }
  if (converged.empty())
    throw EmptyBoundary("no boundary seed converged inside closure(D)");
  if (static_cast<int>(converged.size()) <= count) return converged;

  // Greedy farthest-point thinning: quasi-uniform spacing in arclength.
  std::vector<Vec2> picked;
  std::vector<double> dist(converged.size(),
                           std::numeric_limits<double>::infinity());
  picked.push_back(converged[0]);
  for (std::size_t k = 0; k < converged.size(); ++k)
    dist[k] = (converged[k] - picked[0]).norm();
  while (static_cast<int>(picked.size()) < count) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < converged.size(); ++k)
      if (dist[k] > dist[best]) best = k;
    picked.push_back(converged[best]);
    for (std::size_t k = 0; k < converged.size(); ++k)
      dist[k] = std::min(dist[k], (converged[k] - picked.back()).norm());
  }
  return picked;
}

const DeclaredCorner* Domain::find_declared(const Vec2& x0) const {
  for (const DeclaredCorner& c : corners_)
    if ((c.location - x0).norm() <= 10.0 * tol_.corner_tol) return &c;
  return nullptr;
}

namespace {

// Smallest-|s| root of psi along p + s*n, searched over a geometric grid,
// then refined by bisection.
std::optional<double> nearest_root_along(const ScalarField& psi, const Vec2& p,
                                         const Vec2& n, double s_max,
                                         double tol) {
  auto f = [&](double s) { return psi.eval(p + n * s); };
  double prev_s = 0.0, prev_v = f(0.0);
  if (prev_v == 0.0) return 0.0;
  double lo = 0.0, hi = 0.0;
  bool found = false;
  // expand outward, alternating sides, geometric radii
  for (double r = s_max * 1e-8; r <= s_max && !found; r *= 1.3) {
    for (double s : {r, -r}) {
      double v = f(s);
      double base = f(0.0);
      if (v == 0.0) return s;
      if ((v > 0) != (base > 0)) {
        lo = std::min(0.0, s);
        hi = std::max(0.0, s);
        found = true;
        break;
      }
    }
    prev_s = r;
    (void)prev_s;
    (void)prev_v;
  }
  if (!found) return std::nullopt;
  (void)tol;
  for (int it = 0; it < 220; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = f(mid);
    // relative bracket width governs the stop: the cusp-limit ratios need
    // the root location itself to high relative accuracy
    if (v == 0.0 || hi - lo < 1e-9 * std::max(std::fabs(mid), 1e-30)) return mid;
    if ((v > 0) == (f(lo) > 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Corner Domain::classify_corner(const Vec2& x0) const {
  const DeclaredCorner* dc = find_declared(x0);
  if (!dc) throw std::invalid_argument("point is not a declared corner");

  Corner c;
  c.location = dc->location;
  c.piece_i = dc->piece_i;
  c.piece_j = dc->piece_j;
  {
    // normals from the symbolic gradient, unitized (corner is on both pieces)
    Vec2 gi = expr::gradient(pieces_[c.piece_i].psi).eval(c.location);
    Vec2 gj = expr::gradient(pieces_[c.piece_j].psi).eval(c.location);
    if (gi.norm() <= tol_.grad_floor || gj.norm() <= tol_.grad_floor)
      throw DegenerateGradient("degenerate gradient at declared corner");
    c.normal_i = gi.unit();
    c.normal_j = gj.unit();
  }

  if ((c.normal_i + c.normal_j).norm() > tol_.cusp_tol) {
    c.kind = CornerKind::ConePoint;
    return c;
  }
  c.kind = CornerKind::CuspPoint;

  // Cusp tangent: the unit vector perpendicular to n^i along which points of
  // D cluster as x -> x0. Points of D need not lie on the tangent ray itself
  // (the domain pinches), so we scan directions of nearby in-D points.
  Vec2 cand1 = c.normal_i.perp();
  Vec2 cand2 = -cand1;
  double best1 = -2.0, best2 = -2.0;
  const int n_angles = 8192;
  for (double eps : {1e-2, 3e-3, 1e-3}) {
    double s1 = -2.0, s2 = -2.0;
    for (int k = 0; k < n_angles; ++k) {
      double a = 2.0 * kPi * k / n_angles;
      Vec2 dir{std::cos(a), std::sin(a)};
      if (!in_open(c.location + dir * eps)) continue;
      s1 = std::max(s1, dir.dot(cand1));
      s2 = std::max(s2, dir.dot(cand2));
    }
    best1 = std::max(best1, s1);
    best2 = std::max(best2, s2);
  }
  const double accept = std::cos(0.15);  // ~8.6 degrees
  bool ok1 = best1 >= accept, ok2 = best2 >= accept;
  if (!ok1 && !ok2)
    throw AmbiguousTangent("no tangent candidate has nearby interior points");
  Vec2 tau;
  if (ok1 && ok2) {
    // both sides populated (connectivity is violated; reported separately):
    // deterministic tie-break on the dot scores, then lexicographic
    if (std::fabs(best1 - best2) > 1e-12)
      tau = best1 > best2 ? cand1 : cand2;
    else
      tau = (cand1.x1 > cand2.x1 ||
             (cand1.x1 == cand2.x1 && cand1.x2 > cand2.x2))
                ? cand1
                : cand2;
  } else {
    tau = ok1 ? cand1 : cand2;
  }
  c.tau = tau;

  // Cusp limit L: boundary pairs aligned along n^i at tau-abscissae 2^-k.
  const Vec2 n = c.normal_i;
  std::vector<double> ratios;
  for (int k = 6; k <= 20; ++k) {
    double t = std::ldexp(1.0, -k);
    Vec2 p = c.location + tau * t;
    auto sx = nearest_root_along(pieces_[c.piece_i].psi, p, n, 0.5,
                                 tol_.boundary_tol * 1e-3);
    auto sz = nearest_root_along(pieces_[c.piece_j].psi, p, n, 0.5,
                                 tol_.boundary_tol * 1e-3);
    if (!sx || !sz) continue;
    Vec2 x = p + n * (*sx);
    Vec2 z = p + n * (*sz);
    double denom = (x - z).dot(n);
    if (std::fabs(denom) < 1e-300) continue;
    ratios.push_back((x - c.location).dot(n) / denom);
  }
  if (ratios.size() >= 5) {
    // first-order Richardson across consecutive dyadic levels
    std::vector<double> extrap;
    for (std::size_t k = 0; k + 1 < ratios.size(); ++k)
      extrap.push_back(2.0 * ratios[k + 1] - ratios[k]);
    c.cusp_limit_L = extrap.back();
    std::size_t tail = std::min<std::size_t>(4, extrap.size());
    double lo = extrap[extrap.size() - tail], hi = lo;
    for (std::size_t k = extrap.size() - tail; k < extrap.size(); ++k) {
      lo = std::min(lo, extrap[k]);
      hi = std::max(hi, extrap[k]);
    }
    double scale = std::max(1e-12, std::fabs(*c.cusp_limit_L));
    c.cusp_limit_spread = (hi - lo) / scale;
  }
  return c;
}

Sector Domain::normal_cone(const Vec2& x0) const {
  std::set<int> active = index_set(x0, tol_.corner_tol);
  if (active.empty()) throw NotOnBoundary("point is interior or outside");
  if (active.size() == 1) return Sector::from_ray(unit_normal(*active.begin(), x0));
  Corner c = classify_corner(x0);
  if (c.kind == CornerKind::CuspPoint) return Sector::half_plane(*c.tau);
  return Sector::spanning({c.normal_i, c.normal_j}, tol_.angle_tol);
}

Sector Domain::direction_cone(const Vec2& x0) const {
  std::set<int> active = index_set(x0, tol_.corner_tol);
  if (active.empty()) throw NotOnBoundary("point is interior or outside");
  std::vector<Vec2> gens;
  for (int i : active) gens.push_back(pieces_[i].g.eval(x0).unit());
  return Sector::spanning(gens, tol_.angle_tol);
}

ConnectivityReport local_connectivity(const Domain& d, const Vec2& x0,
                                      double radius, int grid) {
  ConnectivityReport rep;
  rep.radius = radius;
  std::vector<char> inside(static_cast<std::size_t>(grid) * grid, 0);
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * grid + j; };
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      Vec2 p{x0.x1 - radius + 2.0 * radius * (i + 0.5) / grid,
             x0.x2 - radius + 2.0 * radius * (j + 0.5) / grid};
      if ((p - x0).norm() > radius) continue;
      if (d.in_open(p)) {
        inside[idx(i, j)] = 1;
        ++rep.cells_inside;
      }
    }
  }
  std::vector<char> seen(inside.size(), 0);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      if (!inside[idx(i, j)] || seen[idx(i, j)]) continue;
      ++rep.components;
      std::queue<std::pair<int, int>> q;
      q.push({i, j});
      seen[idx(i, j)] = 1;
      while (!q.empty()) {
        auto [a, b] = q.front();
        q.pop();
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int na = a + di[k], nb = b + dj[k];
          if (na < 0 || nb < 0 || na >= grid || nb >= grid) continue;
          if (!inside[idx(na, nb)] || seen[idx(na, nb)]) continue;
          seen[idx(na, nb)] = 1;
          q.push({na, nb});
        }
      }
    }
  }
  rep.connected = rep.components == 1;
  return rep;
}

}  // namespace obliqua::geometry
