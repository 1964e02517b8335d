#include <doctest.h>

#include "fatoulab/map_io.hpp"
#include "fatoulab/regions.hpp"
#include "fatoulab/runge.hpp"

using namespace fatoulab;

namespace {
RungeTarget target(const CompactRegion& r, const MapExpr& h, const std::string& label) {
  RungeTarget t;
  t.label = label;
  t.points = sample_region(r, 64, 0.0);
  t.check_points = sample_region(r, 256, 0.5);
  t.values = eval_many(h, t.points);
  t.check_values = eval_many(h, t.check_points);
  return t;
}
}  // namespace

TEST_CASE("a polynomial target is reproduced at its own degree") {
  RungeRequest req;
  req.targets = {target(disc_region({0.5, 0.2}, 1.0), poly({1, -2, 0, 0.5}), "cubic")};
  req.epsilon = 1e-10;
  const RungeResult r = runge_fit(req);
  CHECK(r.converged);
  CHECK(r.degree == 8);
  CHECK(r.validation_error[0] < 1e-12);
  CHECK(std::abs(eval(r.p, {0.1, 0.3}) - eval(poly({1, -2, 0, 0.5}), {0.1, 0.3})) < 1e-12);
}

TEST_CASE("piecewise data on two discs") {
  RungeRequest req;
  req.targets = {target(disc_region(0, 0.5), constant(0.0), "left"), target(disc_region(3, 0.5), constant(1.0), "right")};
  req.epsilon = 1e-6;
  const RungeResult r = runge_fit(req);
  CHECK(r.converged);
  CHECK(r.validation_error[0] < 1e-6);
  CHECK(r.validation_error[1] < 1e-6);
  CHECK(std::abs(eval(r.p, 3.2) - 1.0) < 1e-6);
}

TEST_CASE("not converged carries the best attempt") {
  RungeRequest req;
  req.targets = {target(disc_region(0, 0.5), constant(0.0), "a"), target(disc_region(1.2, 0.5), constant(1.0), "b")};
  req.epsilon = 1e-12;
  req.degree_cap = 16;
  try {
    runge_fit(req);
    FAIL("expected NotConverged");
  } catch (const NotConverged& e) {
    CHECK_FALSE(e.best().converged);
    CHECK(e.best().degree <= 16);
    CHECK(e.best().history.size() == 2);
  }
  req.validation_factor = 2;
  CHECK_THROWS_AS(runge_fit(req), InputError);
}

TEST_CASE("fitted node: derivative and JSON round trip") {
  RungeRequest req;
  req.targets = {target(disc_region(0, 1), exp_of(var()), "exp")};
  req.epsilon = 1e-12;
  const RungeResult r = runge_fit(req);
  REQUIRE(r.converged);
  const Complex z(0.2, -0.4);
  CHECK(std::abs(eval_deriv(r.p, z) - std::exp(z)) < 1e-9);
  CHECK(std::abs(nth_derivative(r.p, z, 2) - std::exp(z)) < 1e-7);
  const MapExpr back = map_from_json(map_to_json(r.p));
  CHECK(eval(back, z) == eval(r.p, z));
  CHECK(sup_error(r.p, {z}, {std::exp(z)}) < 1e-12);
}

TEST_CASE("zero and one on separated discs stays below degree 40") {
  RungeRequest req;
  req.targets = {target(disc_region(0, 0.75), constant(0.0), "zero"), target(disc_region(4, 0.5), constant(1.0), "one")};
  req.epsilon = 1e-2;
  const RungeResult r = runge_fit(req);
  CHECK(r.converged);
  CHECK(r.degree <= 40);
  // dense grid
  double worst = 0.0;
  for (int i = -60; i <= 60; ++i)
    for (int j = -60; j <= 60; ++j) {
      const Complex z(i / 80.0, j / 80.0);
      if (std::abs(z) <= 0.75) worst = std::max(worst, std::abs(eval(r.p, z)));
      if (std::abs(z) <= 0.5) worst = std::max(worst, std::abs(eval(r.p, z + 4.0) - 1.0));
    }
  CHECK(worst < 1.25e-2);
}
