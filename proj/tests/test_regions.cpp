#include <doctest.h>

#include "fatoulab/regions.hpp"

using namespace fatoulab;

TEST_CASE("containment and validation") {
  const CompactRegion d = disc_region({1, 1}, 0.5);
  CHECK(contains(d, {1.2, 1.2}));
  CHECK_FALSE(contains(d, {0, 0}));
  const CompactRegion sq = polygon_region({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(contains(sq, {0.5, 0.5}));
  CHECK_FALSE(contains(sq, {1.5, 0.5}));
  CHECK_THROWS_AS(validate(disc_region(0, -1)), InputError);
  // bow tie is not simple
  CHECK_THROWS_AS(validate(polygon_region({{0, 0}, {1, 1}, {1, 0}, {0, 1}})), InputError);
  CHECK(distance_to_boundary(std::get<Polygon>(sq.components[0]), {0.5, 0.25}) == doctest::Approx(0.25));
}

TEST_CASE("boundary samples hit the quarter points exactly") {
  const ComplexList b = sample_boundary(disc_region(0, 2), 8);
  REQUIRE(b.size() == 8);
  CHECK(b[0] == Complex(2, 0));
  CHECK(b[2] == Complex(0, 2));
  CHECK(b[4] == Complex(-2, 0));
  CHECK(b[6] == Complex(0, -2));
}

TEST_CASE("sample phases give disjoint sets") {
  const CompactRegion d = disc_region(0, 1);
  const ComplexList a = sample_region(d, 64, 0.0), b = sample_region(d, 64, 0.5);
  for (auto x : a)
    for (auto y : b) CHECK(std::abs(x - y) > 1e-6);
  for (auto x : b) CHECK(contains(d, x, 1e-12));
}

TEST_CASE("subdivision covers the region with small discs") {
  const CompactRegion d = disc_region({0.3, -0.2}, 0.75);
  const auto parts = subdivide(d, 0.05);
  for (const auto& p : parts) CHECK(p.radius <= 0.05 + 1e-15);
  std::mt19937_64 rng(3);
  for (auto z : sample_uniform(d, 500, rng)) {
    bool hit = false;
    for (const auto& p : parts) hit = hit || std::abs(z - p.center) <= p.radius;
    CHECK(hit);
  }
}

TEST_CASE("image cover of a translation is a translated cover") {
  const MapExpr f = affine(1.0, 2.0);
  const DiscCover c = image_cover(f, disc_region(0, 0.5), 0.05);
  std::mt19937_64 rng(5);
  for (auto z : sample_uniform(disc_region(0, 0.5), 300, rng)) {
    const Complex w = eval(f, z);
    bool hit = false;
    for (const auto& p : c.discs) hit = hit || std::abs(w - p.center) <= p.radius;
    CHECK(hit);
  }
}

TEST_CASE("disjointness margin is the gap between discs") {
  DiscCover a{{{0, 1}}, "a"}, b{{{3, 1}}, "b"};
  const Disjointness d = covers_disjoint(a, b);
  CHECK(d.disjoint);
  CHECK(d.margin == doctest::Approx(1.0));
  DiscCover c{{{1.5, 1}}, "c"};
  CHECK_FALSE(covers_disjoint(a, c).disjoint);
}

TEST_CASE("region specs and JSON") {
  const CompactRegion r = parse_region_spec("disc:0,0,1|polygon:2,0;3,0;3,1|points:5,5;6,6");
  REQUIRE(r.components.size() == 3);
  CHECK(std::get<ClosedDisc>(r.components[0]).radius == 1.0);
  CHECK(std::get<Polygon>(r.components[1]).vertices.size() == 3);
  CHECK(std::get<FiniteSet>(r.components[2]).points.size() == 2);
  const CompactRegion back = region_from_json(region_to_json(r));
  CHECK(region_to_json(back) == region_to_json(r));
  CHECK_THROWS_AS(parse_region_spec("disc:0,0"), ParseError);
  CHECK(r.max_modulus() == doctest::Approx(std::abs(Complex(6, 6))));
}

TEST_CASE("contour validation") {
  CHECK_NOTHROW(validate(Contour{0, 1, 1, 512}));
  CHECK_THROWS_AS(validate(Contour{0, 1, 1, 500}), InputError);
  CHECK_THROWS_AS(validate(Contour{0, 0, 1, 512}), InputError);
}
