#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "obliqua/geometry.hpp"

using namespace obliqua::geometry;
using obliqua::expr::parse;
using obliqua::expr::Vec2;

namespace {

DomainPiece piece(const std::string& name, const std::string& psi,
                  const std::string& g1, const std::string& g2) {
  return {name, parse(psi), {parse(g1), parse(g2)}};
}

// Unit disc centered at the origin, normal reflection.
Domain unit_disc() {
  return Domain({piece("disc", "1 - x1^2 - x2^2", "-x1", "-x2")}, {},
                {-1.2, -1.2, 1.2, 1.2});
}

// Upper half of the unit disc centered at (1, 0): two pieces, two corners.
Domain half_disc() {
  return Domain(
      {piece("disc", "1 - (x1 - 1)^2 - x2^2", "1 - x1", "-x2"),
       piece("upper", "x2", "0", "1")},
      {{{0.0, 0.0}, 0, 1}, {{2.0, 0.0}, 0, 1}}, {-0.25, -0.25, 2.25, 1.25});
}

// Cusp wedge {x1 |x1| < x2 < 2 x1 |x1|}; tangent (1, 0), cusp limit -1.
Domain cusp_wedge() {
  return Domain(
      {piece("lower", "x2 - x1*abs(x1)", "0.7071067811865475", "0.7071067811865475"),
       piece("upper", "2*x1*abs(x1) - x2", "0.7071067811865475", "-0.7071067811865475")},
      {{{0.0, 0.0}, 0, 1}}, {-0.05, -0.05, 0.4, 0.35});
}

// C^2 variant {x1^2 < x2 < 2 x1^2}: same cusp but smooth psi and two wings.
Domain cusp_wedge_c2() {
  return Domain(
      {piece("lower", "x2 - x1^2", "0.7071067811865475", "0.7071067811865475"),
       piece("upper", "2*x1^2 - x2", "0.7071067811865475", "-0.7071067811865475")},
      {{{0.0, 0.0}, 0, 1}}, {-0.4, -0.05, 0.4, 0.35});
}

}  // namespace

TEST_CASE("closure and membership") {
  Domain d = unit_disc();
  CHECK(d.in_open({0.0, 0.0}));
  CHECK(!d.in_open({1.0, 0.0}));
  CHECK(d.in_closure({1.0, 0.0}, 1e-12));
  CHECK(!d.in_closure({1.1, 0.0}));
  CHECK(d.min_psi({0.0, 0.0}) == 1.0);
}

TEST_CASE("unit normal is inward") {
  Domain d = unit_disc();
  Vec2 n = d.unit_normal(0, {1.0, 0.0});
  CHECK(n.x1 == doctest::Approx(-1.0));
  CHECK(n.x2 == doctest::Approx(0.0).epsilon(1e-12));
  Vec2 p{std::sqrt(0.5), std::sqrt(0.5)};
  Vec2 n2 = d.unit_normal(0, p);
  CHECK(n2.dot(p) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(d.unit_normal(0, {0.5, 0.0}), NotOnBoundary);
}

TEST_CASE("Newton projection onto a piece") {
  Domain d = unit_disc();
  auto p = d.project_to_piece(0, {2.0, 0.0});
  REQUIRE(p.has_value());
  CHECK(p->x1 == doctest::Approx(1.0));
  CHECK(std::fabs(1.0 - p->x1 * p->x1 - p->x2 * p->x2) <= 1e-12);
  auto q = d.project_to_piece(0, {0.3, 0.4});
  REQUIRE(q.has_value());
  CHECK(q->norm() == doctest::Approx(1.0));
}

TEST_CASE("boundary sampling lands on the boundary inside closure") {
  Domain d = half_disc();
  for (int i : {0, 1}) {
    auto pts = d.boundary_sample(i, 128);
    CHECK(pts.size() >= 64);
    for (const Vec2& p : pts) {
      CHECK(std::fabs(d.pieces()[i].psi.eval(p)) <= 1e-8);
      CHECK(d.min_psi(p) >= -1e-8);
    }
  }
}

TEST_CASE("declared corner validation") {
  CHECK_THROWS(Domain({piece("disc", "1 - x1^2 - x2^2", "-x1", "-x2"),
                       piece("upper", "x2", "0", "1")},
                      {{{0.5, 0.5}, 0, 1}},  // not on either zero set
                      {-1.2, -1.2, 1.2, 1.2}));
}

TEST_CASE("cone point classification at half-disc corners") {
  Domain d = half_disc();
  Corner c = d.classify_corner({0.0, 0.0});
  CHECK(c.kind == CornerKind::ConePoint);
  CHECK(c.normal_i.x1 == doctest::Approx(1.0));
  CHECK(c.normal_i.x2 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(c.normal_j.x1 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(c.normal_j.x2 == doctest::Approx(1.0));

  Corner c2 = d.classify_corner({2.0, 0.0});
  CHECK(c2.kind == CornerKind::ConePoint);
  CHECK(c2.normal_i.x1 == doctest::Approx(-1.0));
  CHECK_THROWS(d.classify_corner({1.0, 1.0}));
}

TEST_CASE("cusp classification, tangent and limit") {
  Domain d = cusp_wedge();
  Corner c = d.classify_corner({0.0, 0.0});
  CHECK(c.kind == CornerKind::CuspPoint);
  REQUIRE(c.tau.has_value());
  // tangent (1, 0): in-domain directions converge to it from above
  CHECK(std::fabs(c.tau->x1 - 1.0) <= 1e-9);
  CHECK(std::fabs(c.tau->x2) <= 1e-9);
  REQUIRE(c.cusp_limit_L.has_value());
  // hand value: ratio t^2 / (t^2 - 2 t^2) = -1 for every t
  CHECK(std::fabs(*c.cusp_limit_L - (-1.0)) <= 1e-3);
  CHECK(c.cusp_limit_spread <= 1e-3);
}

TEST_CASE("C^2 cusp variant classifies as cusp with tangent ambiguity handled") {
  Domain d = cusp_wedge_c2();
  Corner c = d.classify_corner({0.0, 0.0});
  CHECK(c.kind == CornerKind::CuspPoint);
  REQUIRE(c.tau.has_value());
  // two wings: the scan picks one of the two antipodal tangents
  CHECK(std::fabs(std::fabs(c.tau->x1) - 1.0) <= 1e-9);
}

TEST_CASE("local connectivity distinguishes the two cusp wedges") {
  Domain one_sided = cusp_wedge();
  ConnectivityReport a = local_connectivity(one_sided, {0.0, 0.0}, 1e-2, 96);
  CHECK(a.connected);
  CHECK(a.components == 1);

  Domain two_sided = cusp_wedge_c2();
  ConnectivityReport b = local_connectivity(two_sided, {0.0, 0.0}, 1e-2, 96);
  CHECK(!b.connected);
  CHECK(b.components == 2);
}

TEST_CASE("normal cone shapes") {
  Domain d = half_disc();
  // smooth point: a ray
  Sector ray = d.normal_cone({1.0, 1.0});
  CHECK(ray.width() == doctest::Approx(0.0));
  CHECK(ray.contains({0.0, -1.0}, 1e-6));
  // cone corner: sector spanned by the two normals
  Sector corner = d.normal_cone({0.0, 0.0});
  CHECK(corner.width() == doctest::Approx(3.14159265358979 / 2).epsilon(1e-6));
  CHECK(corner.contains(Vec2{1.0, 1.0}.unit()));
  CHECK(!corner.contains(Vec2{-1.0, 0.5}.unit()));

  Domain cw = cusp_wedge();
  Sector half = cw.normal_cone({0.0, 0.0});
  CHECK(half.degenerate_half_plane);
  CHECK(half.contains({0.0, 1.0}, 1e-6));
  CHECK(half.contains({0.0, -1.0}, 1e-6));
  CHECK(half.contains({1.0, 0.0}, 1e-6));
}

TEST_CASE("direction cone at a corner") {
  Domain d = half_disc();
  Sector g = d.direction_cone({0.0, 0.0});
  // normal-ish generators (1,0)-piece g = (1, 0), upper g = (0, 1)
  CHECK(g.contains(Vec2{1.0, 1.0}.unit()));
  CHECK_THROWS_AS(d.direction_cone({1.0, 0.5}), NotOnBoundary);
}

TEST_CASE("sector arithmetic") {
  Sector s = Sector::spanning({Vec2{1.0, 0.0}, Vec2{0.0, 1.0}});
  CHECK(s.width() == doctest::Approx(3.14159265358979 / 2));
  CHECK(s.contains(Vec2{1.0, 1.0}.unit()));
  CHECK(s.midpoint_direction().dot(Vec2{1.0, 1.0}.unit()) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(
      Sector::spanning({Vec2{1.0, 0.0}, Vec2{-1.0, 0.1}.unit(), Vec2{0.0, -1.0}}),
      SpanTooWide);
  Sector hp = Sector::half_plane({1.0, 0.0});
  CHECK(hp.contains({0.0, 1.0}, 1e-6));
  CHECK(hp.contains({0.0, -1.0}, 1e-6));
  CHECK(!hp.contains({-1.0, 0.0}));
}
