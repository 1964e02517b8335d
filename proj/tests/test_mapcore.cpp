#include <doctest.h>

#include "fatoulab/ext_complex.hpp"
#include "fatoulab/map_io.hpp"
#include "fatoulab/mapcore.hpp"
#include "oracles.hpp"

using namespace fatoulab;

namespace {
bool near(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("eval of the basic nodes") {
  CHECK(eval(var(), {2, 3}) == Complex(2, 3));
  CHECK(eval(constant({1, -1}), 5.0) == Complex(1, -1));
  CHECK(near(eval(poly({1, 2, 3}), {1, 1}), Complex(1, 0) + 2.0 * Complex(1, 1) + 3.0 * Complex(0, 2), 1e-15));
  CHECK(near(eval(mobius(2, 1, 1, 3), {1, 1}), oracle::kMobiusValue, 1e-15));
  CHECK(near(eval(power(var(), 3), {0, 1}), Complex(0, -1), 1e-15));
  CHECK(near(eval(exp_of(var()), {1, 1}), oracle::kExpOnePlusI, 1e-14));
  CHECK(eval(affine(2.0, {0, 1}), 1.0) == Complex(2, 1));
  CHECK(near(eval(compose(poly({0, 0, 1}), affine(1.0, 1.0)), 2.0), 9.0, 0.0));
  CHECK(near(eval(var() * var() + 1.0, {0, 1}), 0.0, 1e-15));
}

TEST_CASE("blaschke factor matches the closed form") {
  CHECK(near(eval(blaschke_factor({0.3, 0.2}), {0.5, -0.1}), oracle::kBlaschkeValue, 1e-15));
  CHECK(near(eval_deriv(blaschke_factor({0.3, 0.2}), {0.5, -0.1}), oracle::kBlaschkeSlope, 1e-14));
}

TEST_CASE("symbolic derivative against mpmath") {
  CHECK(near(eval_deriv(mobius(2, 1, 1, 3), {1, 1}), oracle::kMobiusDeriv, 1e-15));
  const MapExpr e = mul(exp_of(power(var(), 2)), poly({1, 1}));
  CHECK(near(eval_deriv(e, {0.3, 0.4}), oracle::kExpProdD1, 1e-13));
  CHECK(near(nth_derivative(e, {0.3, 0.4}, 3), oracle::kExpProdD3, 1e-12));
  CHECK(near(eval(derivative(derivative(derivative(e))), {0.3, 0.4}), oracle::kExpProdD3, 1e-12));
}

TEST_CASE("taylor coefficients of exp are exp(z0)/k!") {
  const ComplexList t = taylor(exp_of(var()), {1, 1}, 6);
  double fact = 1.0;
  for (int k = 0; k <= 6; ++k) {
    if (k > 0) fact *= k;
    CHECK(near(t[k], oracle::kExpOnePlusI / fact, 1e-14));
  }
}

TEST_CASE("taylor through a composition of Mobius maps") {
  const MapExpr f = power(mobius(1, 1.0 / 3, 1.0 / 3, 1), 2);
  double fact = 1.0;
  for (int k = 0; k <= 4; ++k) {
    if (k > 0) fact *= k;
    CHECK(near(nth_derivative(f, 1.0, k), oracle::kThirdMapDerivs[k], 1e-12));
  }
}

TEST_CASE("mobius poles and degeneracy") {
  CHECK_THROWS_AS(eval(mobius(1, 0, 1, -0.5), 0.5), PoleError);
  CHECK_THROWS_AS(mobius(1, 2, 2, 4), DomainError);
}

TEST_CASE("iterate reports overflow with the partial orbit") {
  const MapExpr sq = poly({0, 0, 1});
  const ComplexList o = iterate(sq, 0.5, 4);
  REQUIRE(o.size() == 5);
  CHECK(o[4] == Complex(std::pow(0.5, 16)));
  try {
    iterate(sq, 10.0, 20);
    FAIL("expected overflow");
  } catch (const OverflowError& e) {
    CHECK(e.step() > 0);
    CHECK(e.partial().size() == static_cast<std::size_t>(e.step()));
    CHECK(e.partial().front() == Complex(10.0));
  }
}

TEST_CASE("iterate_map agrees with iterate") {
  const MapExpr f = poly({0.1, 0.5, 0.2});
  const MapExpr f5 = iterate_map(f, 5);
  CHECK(near(eval(f5, {0.2, 0.1}), iterate(f, {0.2, 0.1}, 5).back(), 1e-15));
  CHECK(eval(iterate_map(f, 0), 3.0) == Complex(3.0));
}

TEST_CASE("eval_many keeps order") {
  ComplexList zs;
  for (int i = 0; i < 1000; ++i) zs.push_back({i * 0.001, -i * 0.002});
  const ComplexList v = eval_many(poly({1, 0, 1}), zs);
  for (std::size_t i = 0; i < zs.size(); ++i) CHECK(v[i] == eval(poly({1, 0, 1}), zs[i]));
}

TEST_CASE("complex literals") {
  CHECK(parse_complex_literal("2") == Complex(2));
  CHECK(parse_complex_literal("-i") == Complex(0, -1));
  CHECK(parse_complex_literal("1+2i") == Complex(1, 2));
  CHECK(parse_complex_literal("1e-3-2e-3i") == Complex(1e-3, -2e-3));
  CHECK_THROWS_AS(parse_complex_literal("abc"), ParseError);
}

TEST_CASE("map specs and JSON round trip") {
  const MapExpr a = parse_map_spec(R"({"op":"affine","scale":[1,0],"shift":[1,0]})");
  CHECK(eval(a, 2.0) == Complex(3.0));
  CHECK(eval(parse_map_spec("poly:0,0,1"), {0, 2}) == Complex(-4));
  CHECK(near(eval(parse_map_spec("pow:2:mobius:1,0.5,0.5,1"), 0.0), 0.25, 1e-15));
  CHECK(near(eval(parse_map_spec("exp:var"), 0.0), 1.0, 0.0));
  const MapExpr e = add(compose(blaschke_factor({0.2, 0.1}), exp_of(var())), power(mobius(2, 1, 1, 3), 2));
  const MapExpr back = map_from_json(map_to_json(e));
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.3, 0.05)}) CHECK(eval(back, z) == eval(e, z));
  try {
    map_from_json(Json::parse(R"({"op":"add","left":{"op":"var"},"right":{"op":"nope"}})"));
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(std::string(err.what()).find("/right/op") != std::string::npos);
  }
}

TEST_CASE("extended-exponent complex keeps tiny values") {
  const ExtComplex tiny(Complex(1.0, 0.0), -5000);
  const ExtComplex sq = tiny * tiny;
  CHECK(sq.exponent() <= -9999);
  CHECK(sq.log2_abs() == doctest::Approx(-10000.0));
  CHECK((sq / tiny).log2_abs() == doctest::Approx(-5000.0));
  CHECK((tiny + tiny).log2_abs() == doctest::Approx(-4999.0));
  CHECK(tiny.to_complex() == Complex(0.0));
  CHECK_THROWS_AS(tiny / ExtComplex(0.0), PoleError);
}
