#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "obliqua/angular.hpp"

using namespace obliqua::angular;
using obliqua::expr::Vec2;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("quarter arc against an aligned half-plane") {
  // directions in [0, pi/2], half-plane of phi = 0: everything survives
  auto out = intersect_open_halfplane({{0.0, 0.5 * kPi}}, 0.0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].lo == doctest::Approx(0.0));
  CHECK(out[0].hi == doctest::Approx(0.5 * kPi));
}

TEST_CASE("arc clipped by an orthogonal half-plane") {
  // [0, pi] against phi = 0 keeps [0, pi/2]
  auto out = intersect_open_halfplane({{0.0, kPi}}, 0.0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].lo == doctest::Approx(0.0));
  CHECK(out[0].hi == doctest::Approx(0.5 * kPi));
}

TEST_CASE("opposed half-plane empties the arc up to the boundary ray") {
  // [0, pi/4] against phi = pi: only the zero-width boundary ray remains
  auto out = intersect_open_halfplane({{0.0, 0.25 * kPi}}, kPi);
  double total = 0.0;
  for (const Arc& a : out) total += a.width();
  CHECK(total <= 1e-12);
}

TEST_CASE("empty input stays empty") {
  CHECK(intersect_open_halfplane({}, 1.0).empty());
  CHECK(!widest_midpoint({}).has_value());
}

TEST_CASE("widest midpoint picks the larger arc") {
  auto w = widest_midpoint({{0.0, 0.1}, {1.0, 2.0}});
  REQUIRE(w.has_value());
  CHECK(std::atan2(w->x2, w->x1) == doctest::Approx(1.5));
}

TEST_CASE("degenerate arcs only admitted on request") {
  CHECK(!widest_midpoint({{1.0, 1.0}}).has_value());
  auto w = widest_midpoint({{1.0, 1.0}}, true);
  REQUIRE(w.has_value());
  CHECK(w->x1 == doctest::Approx(std::cos(1.0)));
}

TEST_CASE("randomized membership agreement") {
  // every direction in the clipped arcs has nonnegative dot with phi-hat,
  // and interior directions of the input with positive dot survive
  std::mt19937_64 rng(0xa27ull);
  std::uniform_real_distribution<double> ang(-2.0 * kPi, 2.0 * kPi);
  std::uniform_real_distribution<double> wid(0.0, kPi);
  for (int trial = 0; trial < 500; ++trial) {
    double lo = ang(rng);
    Arc arc{lo, lo + wid(rng)};
    double phi = ang(rng);
    Vec2 e{std::cos(phi), std::sin(phi)};
    auto out = intersect_open_halfplane({arc}, phi);
    for (const Arc& a : out) {
      CHECK(a.lo >= arc.lo - 1e-9);
      CHECK(a.hi <= arc.hi + 1e-9);
      for (double t : {0.0, 0.5, 1.0}) {
        double th = a.lo + t * a.width();
        CHECK(Vec2{std::cos(th), std::sin(th)}.dot(e) >= -1e-9);
      }
    }
    // probe interior points of the input arc
    for (double t : {0.1, 0.37, 0.62, 0.9}) {
      double th = arc.lo + t * arc.width();
      if (Vec2{std::cos(th), std::sin(th)}.dot(e) > 1e-9) {
        bool covered = false;
        for (const Arc& a : out)
          if (th >= a.lo - 1e-9 && th <= a.hi + 1e-9) covered = true;
        CHECK(covered);
      }
    }
  }
}
