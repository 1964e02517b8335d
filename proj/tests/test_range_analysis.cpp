#include <doctest.h>

#include <random>

#include "fatoulab/range_analysis.hpp"

using namespace fatoulab;

namespace {
// monic polynomial with the given roots, ascending coefficients
ComplexList from_roots(const ComplexList& roots) {
  ComplexList c{1.0};
  for (auto r : roots) {
    ComplexList n(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      n[i + 1] += c[i];
      n[i] -= r * c[i];
    }
    c = n;
  }
  return c;
}
}  // namespace

TEST_CASE("zero counts of z^3 - 1 and exp") {
  const MapExpr p = poly({-1, 0, 0, 1});
  CHECK(count_zeros(p, {0, 2}).count == 3);
  CHECK(count_zeros(p, {1, 0.5}).count == 1);
  CHECK(count_zeros(p, {-3, 0.5}).count == 0);
  CHECK(count_zeros(exp_of(var()), {0, 10}).count == 0);
  CHECK_THROWS_AS(count_zeros(p, {0, 1}), BoundaryZero);
  CHECK(count_zeros(mobius(1, 0, 1, -0.2), {0, 1}).count == 0);  // one zero, one pole
  CHECK_THROWS_AS(count_zeros(mobius(0, 1, 1, -0.2), {0, 1}), DomainError);
}

TEST_CASE("zero counts of random polynomials with known roots") {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> u(-1.5, 1.5), rad(0.3, 2.0);
  std::uniform_int_distribution<int> deg(1, 8);
  int done = 0;
  while (done < 50) {
    ComplexList roots;
    const int d = deg(rng);
    for (int i = 0; i < d; ++i) roots.push_back({u(rng), u(rng)});
    const ClosedDisc disc{{u(rng) / 2, u(rng) / 2}, rad(rng)};
    int inside = 0;
    bool clear = true;
    for (auto r : roots) {
      const double dist = std::abs(r - disc.center) - disc.radius;
      clear = clear && std::abs(dist) >= 0.05;
      inside += dist < 0;
    }
    if (!clear) continue;
    const ZeroCountReport z = count_zeros(poly(from_roots(roots)), disc, 1024);
    CHECK(z.count == inside);
    CHECK(z.winding_residual < 0.01);
    ++done;
  }
}

TEST_CASE("full range: contraction toward 0") {
  std::vector<int> sched;
  for (int n = 0; n <= 20; ++n) sched.push_back(n);
  const FullRangeReport r = full_range_probe(affine(0.5, 0.0), var(), Complex(0.0), 1.0, disc_region(0.5, 0.1),
                                             {0.001}, sched);
  REQUIRE(r.targets.size() == 1);
  CHECK(r.targets[0].attained);
  CHECK(r.targets[0].witness_n == 9);  // 0.001 * 2^9 = 0.512 lies in D(0.5, 0.09)
  CHECK(r.targets[0].zero_count == 1);
  // doubling the nodes keeps the count
  const MapExpr F = add(compose(var(), iterate_map(affine(0.5, 0.0), 9)), constant(-0.001));
  CHECK(count_zeros(F, r.targets[0].witness_disc, 2048).count >= 1);
}

TEST_CASE("full range: constant candidate") {
  const FullRangeReport r =
      full_range_probe(affine(0.5, 0.0), constant(5.0), Complex(0.0), 1.0, disc_region(0.5, 0.1), {5.0, 6.0}, {0, 1, 2});
  CHECK(r.targets[0].attained);
  CHECK(r.targets[0].witness_n == 0);
  CHECK(r.targets[0].identically);
  CHECK_FALSE(r.targets[1].attained);
  CHECK_THROWS_AS(full_range_probe(affine(2.0, 0.0), var(), Complex(0.0), 0.1, disc_region(0.5, 0.1), {0.0}, {1, 2}),
                  ConvergenceNotObserved);
}

TEST_CASE("essential singularity probe") {
  ComplexList grid;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) grid.push_back({0.5 * i, 0.5 * j});
  const auto e = essential_singularity_probe(exp_of(mobius(0, 1, 1, 0)), Complex(0.0), {1.0, 0.5, 0.25}, grid, 100000);
  CHECK(e.label == "heuristic");
  CHECK(e.coverage[2] > e.coverage[0]);
  CHECK(e.coverage[2] > 0.75);
  const auto p = essential_singularity_probe(poly({0, 0, 1}), std::nullopt, {10, 20, 40}, grid, 5000);
  CHECK(p.coverage[2] == 0.0);
  const auto id = essential_singularity_probe(var(), Complex(0.0), {0.1}, grid, 5000);
  CHECK(id.coverage[0] < 0.05);
}

TEST_CASE("scaled map of the Julia demo") {
  const JuliaDemo j = julia_not_plane_demo(poly({0, 0, 1}));
  CHECK(j.M == doctest::Approx(2.0));
  CHECK(j.scaled_selfmap_ok);
  CHECK(j.max_scaled <= 0.5 + 1e-12);
  CHECK_THROWS_AS(julia_not_plane_demo(mobius(1, 0, 1, -0.5)), PoleError);
}

TEST_CASE("sector regions") {
  const CompactRegion s = sector_region(0.0, 0.0, kPi / 2, 1.0);
  CHECK(contains(s, 0.5));
  CHECK_FALSE(contains(s, {0, 1}));
  const CompactRegion t = sector_region(1.0, kPi, kPi / 4, 0.3);
  for (auto z : sample_region(t, 128, 0.5)) CHECK(std::abs(z) < 1.0);
  CHECK_THROWS_AS(sector_region(0.0, 0.0, 2 * kPi, 1.0), InputError);
}
