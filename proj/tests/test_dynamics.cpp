#include <doctest.h>

#include "fatoulab/dynamics.hpp"
#include "oracles.hpp"

using namespace fatoulab;

namespace {
MapExpr half_map() { return power(mobius(1, 0.5, 0.5, 1), 2); }
MapExpr third_map() { return power(mobius(1, 1.0 / 3, 1.0 / 3, 1), 2); }
}  // namespace

TEST_CASE("fixed points of the one-half map are the cube roots of unity") {
  const auto pts = find_fixed_points(half_map(), disc_region(0, 2), 0.1);
  REQUIRE(pts.size() == 3);
  const Complex w(-0.5, std::sqrt(3.0) / 2);
  CHECK(std::abs(pts[0].z0 - std::conj(w)) < 1e-12);
  CHECK(std::abs(pts[1].z0 - w) < 1e-12);
  CHECK(std::abs(pts[2].z0 - 1.0) < 1e-12);
  CHECK(pts[2].cls == FixedClass::Attracting);
  CHECK(std::abs(pts[2].lambda - oracle::kHalfMapDerivs[1]) < 1e-12);
  CHECK(pts[0].cls == FixedClass::Repelling);
}

TEST_CASE("parabolic point of the one-third map") {
  const FixedPointInfo p = classify_fixed_point(third_map(), 1.0);
  CHECK(p.cls == FixedClass::Parabolic);
  CHECK(std::abs(p.lambda - 1.0) < 1e-12);
  // f(z) - z vanishes to order 3 at 1 (f'' = 0, f''' != 0), so two petals
  CHECK(p.petal_count == 2);
  const auto pts = find_fixed_points(third_map(), disc_region(0, 2), 0.1);
  REQUIRE(pts.size() == 1);
  CHECK(std::abs(pts[0].z0 - 1.0) < 1e-6);
  CHECK(std::abs(pts[0].lambda - 1.0) < 1e-9);
}

TEST_CASE("superattracting and not-fixed") {
  const FixedPointInfo p = classify_fixed_point(poly({0, 0, 0, 1}), 0.0);
  CHECK(p.cls == FixedClass::Superattracting);
  CHECK(p.local_degree == 3);
  CHECK_THROWS_AS(classify_fixed_point(poly({0, 0, 1}), 0.5), NotFixed);
  CHECK(classify_fixed_point(affine({0, 1}, 0), 0.0).cls == FixedClass::IndifferentOther);
}

TEST_CASE("Koenigs coordinate") {
  const MapExpr f = poly({0, 0.5, 0.1});
  const ConjugacyMap phi = koenigs(f, 0.0, 40);
  CHECK(phi.lambda == Complex(0.5));
  CHECK(conjugacy_defect(phi, {0, 0.1}) < 1e-12);
  CHECK_THROWS_AS(koenigs(poly({0, 2}), 0.0, 10), WrongClass);
  // very small multipliers lower N
  CHECK(koenigs(poly({0, 1e-6, 1}), 0.0, 60).capped);  // 300 decades reached at N = 50
}

TEST_CASE("Boettcher coordinate") {
  const ConjugacyMap p = boettcher(poly({0, 0, 1}), 0.0, 20);
  CHECK(p.p == 2);
  CHECK(conjugacy_defect(p, {0, 0.05}) == 0.0);
  CHECK(conjugacy_defect(boettcher(poly({0, 0, 1, 1}), 0.0, 20), {0, 0.05}) < 1e-12);
  CHECK_THROWS_AS(boettcher(poly({0, 0.5}), 0.0, 10), WrongClass);
}

TEST_CASE("Denjoy-Wolff") {
  const DWEstimate in = denjoy_wolff(poly({0, 0.5}));
  CHECK_FALSE(in.boundary_flag);
  CHECK(std::abs(in.p) < 1e-9);
  const DWEstimate b = denjoy_wolff(half_map());
  CHECK(b.boundary_flag);
  CHECK(std::abs(b.p - 1.0) < 1e-6);
  CHECK_THROWS_AS(denjoy_wolff(affine({0, 1}, 0)), NoConvergence);
  CHECK_THROWS_AS(denjoy_wolff(affine(2.0, 0)), NotSelfMap);
}

TEST_CASE("petal membership follows the attracting direction") {
  // z + z^2: one petal, attracting direction pi
  const MapExpr f = poly({0, 1, 1});
  CHECK(petal_member(f, 0.0, -0.1, kPi, kPi / 2));
  CHECK_FALSE(petal_member(f, 0.0, 0.1, kPi, kPi / 2, 2000));
}

TEST_CASE("escape render of z^2") {
  const EscapeGrid g = escape_render(poly({0, 0, 1}), {-2, -2, 2, 2}, 64, 64, 50, 2.0);
  CHECK(g.width == 64);
  // centre pixel never escapes, corners escape at once
  CHECK(g.at(32, 32) == 50);
  CHECK(g.at(0, 0) == 0);
  const Complex c = g.pixel_center(0, 0);
  CHECK(c.real() < -1.9);
  CHECK(c.imag() > 1.9);
  const std::string pgm = to_pgm(g);
  CHECK(pgm.rfind("P5\n64 64\n50\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n64 64\n50\n").size() + 64 * 64);
  CHECK(to_pgm(escape_render(poly({0, 0, 1}), {-2, -2, 2, 2}, 64, 64, 50, 2.0)) == pgm);
  CHECK_THROWS_AS(escape_render(poly({0, 0, 1}), {-2, -2, 2, 2}, 8, 8, 70000, 2.0), InputError);
}
