#include "obliqua/angular.hpp"

#include <cmath>

namespace obliqua::angular {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<Arc> intersect_open_halfplane(const std::vector<Arc>& arcs,
                                          double phi) {
  std::vector<Arc> out;
  for (const Arc& a : arcs) {
    // unwrap the arc start relative to phi into [-pi, pi)
    double da = std::fmod(a.lo - phi, 2.0 * kPi);
    if (da < -kPi) da += 2.0 * kPi;
    if (da >= kPi) da -= 2.0 * kPi;
    double db = da + a.width();
    // positive-cos windows in offset coordinates over [-pi, 3pi]
    const double windows[2][2] = {{-0.5 * kPi, 0.5 * kPi},
                                  {1.5 * kPi, 2.5 * kPi}};
    for (const auto& w : windows) {
      double lo = std::max(da, w[0]);
      double hi = std::min(db, w[1]);
      if (hi >= lo) {
        // map back to absolute angles, preserving the original branch
        double shift = (a.lo - phi) - da;
        out.push_back({phi + lo + shift, phi + hi + shift});
      }
    }
  }
  return out;
}

std::optional<expr::Vec2> widest_midpoint(const std::vector<Arc>& arcs,
                                          bool allow_degenerate) {
  const Arc* best = nullptr;
  for (const Arc& a : arcs)
    if (!best || a.width() > best->width()) best = &a;
  if (!best) return std::nullopt;
  if (best->width() <= 0.0 && !allow_degenerate) return std::nullopt;
  double mid = 0.5 * (best->lo + best->hi);
  return expr::Vec2{std::cos(mid), std::sin(mid)};
}

}  // namespace obliqua::angular
