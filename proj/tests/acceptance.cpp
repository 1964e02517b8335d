// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "fatoulab/cli.hpp"
#include "fatoulab/dynamics.hpp"
#include "fatoulab/hyperbolic.hpp"
#include "fatoulab/map_io.hpp"
#include "fatoulab/range_analysis.hpp"
#include "fatoulab/universality.hpp"

using namespace fatoulab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Line {
  bool ok = true;
  std::ostringstream msg;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      msg << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::function<void(Line&)>& body) {
  Line l;
  l.msg.precision(6);
  try {
    body(l);
  } catch (const std::exception& e) {
    l.ok = false;
    l.msg << " [exception: " << e.what() << "]";
  }
  if (!l.ok) ++failures;
  std::cout << "criterion " << id << ": " << (l.ok ? "PASS" : "FAIL") << " -" << l.msg.str() << std::endl;
}

MapExpr half_map() { return power(mobius(1, 0.5, 0.5, 1), 2); }
MapExpr third_map() { return power(mobius(1, 1.0 / 3, 1.0 / 3, 1), 2); }

MapExpr monomial(int k) {
  ComplexList c(k + 1, 0.0);
  c[k] = 1.0;
  return poly(c);
}

double sup_on(const ComplexList& zs, const std::function<Complex(Complex)>& err) {
  double m = 0.0;
  for (auto z : zs) m = std::max(m, std::abs(err(z)));
  return m;
}

// Criterion 6 and 7 share these.
const CompactRegion kK = disc_region(0, 0.75), kL = disc_region(0, 0.5);
const MapExpr kF = affine(1.0, 2.0), kG = poly({0, 0, 1}), kH = constant(1.0);

ComplexList fresh(const CompactRegion& r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_uniform(r, 4096, rng);
}

std::map<std::string, std::string> read_dir(const fs::path& d) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(d)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), d).string()] = s.str();
  }
  return out;
}

}  // namespace

int main() {
  std::cout.precision(6);
  const auto t_all = Clock::now();

  report(1, [](Line& l) {
    const Complex c = critical_point(0.5);
    const double dev = std::abs(c - (2.0 - std::sqrt(3.0)));
    const double slope = std::abs(eval_deriv(blaschke_factor(0.5), c));
    double worst = 0.0;
    int count = 0;
    for (int i = 1; i <= 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const Complex a = std::polar(0.98 * i / 20.0, kTwoPi * j / 20.0 + 0.1);
        worst = std::max(worst, std::abs(param_for_critical(critical_point(a)) - a));
        ++count;
      }
    l.msg << " |c(0.5) - (2 - sqrt 3)| = " << dev << ", |b'(c)| = " << slope << ", round trip max " << worst << " over "
          << count << " points";
    l.check(dev < 1e-10, "critical point value");
    l.check(slope < 1e-9, "slope at c");
    l.check(count == 400 && worst < 1e-10, "round trip");
  });

  report(2, [](Line& l) {
    const FixedPointInfo a = classify_fixed_point(half_map(), 1.0);
    const double crit = std::abs(eval_deriv(half_map(), -0.5));
    const FixedPointInfo p = classify_fixed_point(third_map(), 1.0);
    const auto found = find_fixed_points(third_map(), disc_region(0, 2), 0.1);
    l.msg << " half map at 1: " << fixed_class_name(a.cls) << " lambda=" << a.lambda.real() << "; |f'(-1/2)| = " << crit
          << "; third map at 1: " << fixed_class_name(p.cls) << " |lambda-1|=" << std::abs(p.lambda - 1.0)
          << " petals=" << p.petal_count << "; search found " << found.size() << " fixed point(s)";
    l.check(a.cls == FixedClass::Attracting && std::abs(a.lambda - 2.0 / 3.0) <= 1e-9, "attracting, lambda 2/3");
    l.check(crit < 1e-12, "critical point -1/2");
    l.check(p.cls == FixedClass::Parabolic && std::abs(p.lambda - 1.0) <= 1e-9, "parabolic, lambda 1");
    l.check(found.size() == 1 && found[0].cls == FixedClass::Parabolic && std::abs(found[0].lambda - 1.0) <= 1e-9,
            "search finds the parabolic point");
  });

  report(3, [](Line& l) {
    const auto t0 = Clock::now();
    const std::vector<std::pair<Complex, Complex>> pairs = {
        {0.1, {0, -0.3}}, {{0.2, 0.2}, {-0.4, 0.1}}, {{-0.5, 0.3}, {0.6, 0.1}}};
    const auto h = classify_sequence(harmonic_sequence(5000), pairs, 5000);
    const auto g = classify_sequence(geometric_sequence(5000), pairs, 5000);
    const auto i = classify_sequence(automorphism_sequence(5000), pairs, 5000);
    const double dt = seconds_since(t0);
    l.msg << " 1-1/(n+1): " << verdict_name(h.verdict) << "; 1-2^-n: " << verdict_name(g.verdict)
          << "; automorphisms: " << verdict_name(i.verdict) << "; " << dt << " s";
    l.check(h.verdict == Verdict::Contracting, "harmonic");
    l.check(g.verdict == Verdict::SemiContracting, "geometric");
    l.check(i.verdict == Verdict::EventuallyIsometric, "automorphisms");
    l.check(dt < 10.0, "runtime");
  });

  report(4, [](Line& l) {
    const NoninjectiveSequence s = build_noninjective_sequence(disc_exhaustion(400), 50);
    double worst_double = 0.0, worst_rel_log2 = -INFINITY;
    for (std::size_t n = 1; n < s.params.size(); ++n) {
      // as stated: eval_deriv of b_{n+1} at B_n(k) in double precision
      worst_double =
          std::max(worst_double, std::abs(eval_deriv(s.sequence.factor_map(n + 1), s.targets[n - 1].to_complex())));
      // scale-free version in extended exponent arithmetic
      const ExtComplex slope = blaschke_slope(s.params[n], s.targets[n - 1]);
      worst_rel_log2 = std::max(worst_rel_log2, slope.log2_abs() - s.params[n].log2_abs());
    }
    l.msg << " length " << s.params.size() << ", max |b'_{n+1}(B_n(k))| = " << worst_double
          << ", max relative slope 2^" << worst_rel_log2;
    l.check(s.params.size() == 50, "length");
    l.check(worst_double < 1e-9, "double slope");
    l.check(worst_rel_log2 < -30.0, "relative slope");
  });

  report(5, [](Line& l) {
    const SeparationWitness r = find_runaway_N(affine(1.0, 1.0), disc_region(0, 1), 100);
    const SeparationWitness s = find_separation_m(kF, kK, kL, 100);
    l.msg << " run-away N=" << r.m << " margin " << r.margin << "; separation m=" << s.m << " margin " << s.margin;
    l.check(r.m == 3 && r.margin >= 0.9, "run-away");
    l.check(s.m == 1 && s.margin >= 0.7, "separation");
    l.check(reverify(r, affine(1.0, 1.0), disc_region(0, 1), disc_region(0, 1)) && reverify(s, kF, kK, kL),
            "re-verification at half mesh");
  });

  StepResult step6;
  bool have6 = false;
  report(6, [&](Line& l) {
    const auto t0 = Clock::now();
    step6 = universal_step(kF, kK, kG, kL, kH, 1e-2, 100);
    have6 = true;
    const double dt = seconds_since(t0);
    const MapExpr& p = step6.fit.p;
    const double eK = sup_on(fresh(kK, 61), [&](Complex z) { return eval(p, z) - z * z; });
    const double eL = sup_on(fresh(kL, 62), [&](Complex w) { return eval(p, w + 2.0) - 1.0; });
    l.msg << " converged=" << step6.fit.converged << " degree " << step6.fit.degree << "; fresh 4096-point errors K "
          << eK << ", L " << eL << "; " << dt << " s";
    l.check(step6.fit.converged, "converged");
    l.check(step6.fit.degree <= 40, "degree <= 40");
    l.check(eK < 1.25e-2 && eL < 1.25e-2, "fresh validation");
    l.check(dt < 5.0, "runtime");
  });

  report(7, [&](Line& l) {
    if (!have6) throw std::runtime_error("criterion 6 produced no result");
    const StepResult one = weighted_universal_step(kF, constant(1.0), kK, kG, kL, kH, 1e-2, 100);
    const bool same = map_to_json(one.fit.p).dump() == map_to_json(step6.fit.p).dump() &&
                      one.error_K == step6.error_K && one.error_L == step6.error_L &&
                      one.fit.history == step6.fit.history && one.witness.margin == step6.witness.margin;
    const StepResult two = weighted_universal_step(kF, constant(2.0), kK, kG, kL, kH, 1e-2, 100);
    const double eL = sup_on(fresh(kL, 71), [&](Complex w) { return 2.0 * eval(two.fit.p, w + 2.0) - 1.0; });
    const double eK = sup_on(fresh(kK, 72), [&](Complex z) { return eval(two.fit.p, z) - z * z; });
    l.msg << " omega=1 bit-identical: " << (same ? "yes" : "no") << "; omega=2 degree " << two.fit.degree
          << ", fresh |2 p(f) - h|_L = " << eL << ", |p - g|_K = " << eK;
    l.check(same, "bit-identical");
    l.check(eL < 1e-2, "weighted validation on L");
  });

  PartialUniversal pu;
  bool have8 = false;
  report(8, [&](Line& l) {
    const double eps = 1e-2;
    std::vector<UniversalTask> tasks;
    const ComplexList targets = {0.0, 1.0, Complex(0, 1)};
    for (Complex c : targets) tasks.push_back({kL, add(var(), constant(c))});
    pu = build_partial_universal(kF, tasks, eps, 100);
    have8 = true;
    bool errors_ok = true;
    std::vector<int> ns;
    l.msg << " tasks:";
    for (std::size_t k = 0; k < pu.tasks.size(); ++k) {
      const TaskRecord& t = pu.tasks[k];
      const double fresh_err = sup_on(fresh(kL, 80 + k), [&](Complex w) {
        return eval(pu.g, iterate(kF, w, t.n).back()) - eval(t.h, w);
      });
      errors_ok = errors_ok && t.final_error <= 2 * t.eps && fresh_err <= 2 * t.eps;
      ns.push_back(t.n);
      l.msg << " (n=" << t.n << ", err " << t.final_error << " fresh " << fresh_err << " vs 2eps_k " << 2 * t.eps << ")";
    }
    std::vector<std::pair<CompactRegion, MapExpr>> dens;
    for (const auto& t : tasks) dens.push_back({t.L, t.h});
    const auto d = orbit_density(kF, pu.g, dens, 100);
    bool density_ok = true;
    for (std::size_t k = 0; k < d.size(); ++k) density_ok = density_ok && d[k].best_n == ns[k];
    const FullRangeReport fr = full_range_probe(kF, pu.g, std::nullopt, 1.0, kL, targets, ns);
    bool range_ok = true;
    for (std::size_t k = 0; k < fr.targets.size(); ++k) {
      const auto& o = fr.targets[k];
      range_ok = range_ok && o.attained && o.zero_count >= 1 && o.witness_n == ns[k];
      if (o.attained) {
        // re-verify at doubled nodes
        const MapExpr F = add(compose(pu.g, iterate_map(kF, o.witness_n)), constant(-o.c));
        range_ok = range_ok && count_zeros(F, o.witness_disc, 2048).count >= 1;
      }
    }
    l.msg << "; orbit_density n =";
    for (const auto& e : d) l.msg << " " << e.best_n;
    l.msg << "; full range attained =";
    for (const auto& o : fr.targets) l.msg << " " << o.attained << "(zeros " << o.zero_count << ")";
    l.check(pu.tasks.size() == 3 && errors_ok, "final errors <= 2 eps_k");
    l.check(density_ok, "orbit_density recovers n_k");
    l.check(range_ok, "full range probe");
  });

  report(9, [](Line& l) {
    const MapExpr p = poly({-1, 0, 0, 1});
    const ZeroCountReport a = count_zeros(p, {0, 2}, 1024), b = count_zeros(p, {1, 0.5}, 1024);
    double worst = std::max(a.winding_residual, b.winding_residual);
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u(-1.5, 1.5), rad(0.3, 2.0);
    std::uniform_int_distribution<int> deg(1, 8);
    int exact = 0, tried = 0;
    while (tried < 50) {
      ComplexList roots;
      for (int i = deg(rng); i > 0; --i) roots.push_back({u(rng), u(rng)});
      const ClosedDisc disc{{u(rng) / 2, u(rng) / 2}, rad(rng)};
      int inside = 0;
      bool clear = true;
      for (auto r : roots) {
        const double dist = std::abs(r - disc.center) - disc.radius;
        clear = clear && std::abs(dist) >= 0.05;
        inside += dist < 0;
      }
      if (!clear) continue;
      ComplexList c{1.0};
      for (auto r : roots) {
        ComplexList n(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
          n[i + 1] += c[i];
          n[i] -= r * c[i];
        }
        c = n;
      }
      const ZeroCountReport z = count_zeros(poly(c), disc, 1024);
      exact += z.count == inside;
      worst = std::max(worst, z.winding_residual);
      ++tried;
    }
    l.msg << " z^3-1: " << a.count << " on D(0,2), " << b.count << " on D(1,0.5); random polynomials exact " << exact
          << "/50; worst residual " << worst;
    l.check(a.count == 3 && b.count == 1, "z^3 - 1");
    l.check(exact == 50, "random polynomials");
    l.check(worst < 0.01, "residual");
  });

  report(10, [](Line& l) {
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k)
      worst = std::max(worst, std::abs(cyclicity_obstruction(monomial(k), {0, 1, 1, 512}, 0.0).integral));
    const double ref = std::abs(cyclicity_obstruction(var(), {0, 1, 1, 512}, 0.0).reference - Complex(0, 2 * kPi));
    l.msg << " max_k |int z^k dz| = " << worst << "; |int dz/z - 2 pi i| = " << ref;
    l.check(worst < 1e-10, "monomials");
    l.check(ref < 1e-8, "reference");
  });

  report(11, [](Line& l) {
    const DWEstimate d = denjoy_wolff(half_map(), 10000);
    bool rotation_flagged = false;
    try {
      denjoy_wolff(affine(Complex(0, 1), 0.0));
    } catch (const NoConvergence&) {
      rotation_flagged = true;
    }
    l.msg << " p = (" << d.p.real() << "," << d.p.imag() << ") boundary=" << d.boundary_flag << " after "
          << d.iterations_used << " iterations; rotation NoConvergence=" << rotation_flagged;
    l.check(d.boundary_flag && std::abs(d.p - 1.0) < 1e-6 && d.iterations_used <= 10000, "boundary point 1");
    l.check(rotation_flagged, "rotation");
  });

  report(12, [](Line& l) {
    const double k = conjugacy_defect(koenigs(poly({0, 0.5, 0.1}), 0.0, 40), {0, 0.1});
    const double b2 = conjugacy_defect(boettcher(poly({0, 0, 1}), 0.0, 20), {0, 0.05});
    const double b3 = conjugacy_defect(boettcher(poly({0, 0, 1, 1}), 0.0, 20), {0, 0.05});
    l.msg << " Koenigs defect " << k << "; Boettcher z^2 " << b2 << ", z^2+z^3 " << b3;
    l.check(k < 1e-8, "Koenigs");
    l.check(b2 == 0.0, "Boettcher z^2 exact");
    l.check(b3 < 1e-6, "Boettcher z^2+z^3");
  });

  report(13, [](Line& l) {
    const WeightedOrbitRecord r = weighted_orbit(affine(1.0, 1.0), var(), constant(1.0), 1.0, 10);
    double fact = 1.0;
    bool exact = r.values.size() == 11;
    for (int n = 0; n <= 10 && exact; ++n) {
      if (n > 0) fact *= n;
      exact = r.values[n] == Complex(fact);
    }
    l.msg << " W^10 = " << r.values.back().real() << (exact ? ", all n! exactly" : ", mismatch");
    l.check(exact, "factorials");
  });

  report(14, [](Line& l) {
    const std::vector<std::vector<std::string>> runs = {
        {"classify", "--preset", "harmonic", "--horizon", "5000"},
        {"noninjective-seq", "--length", "50"},
        {"runaway", "--f", R"({"op":"affine","scale":[1,0],"shift":[1,0]})", "--K", "disc:0,0,1"},
        {"separation", "--f", "affine:1,2", "--K", "disc:0,0,0.75", "--L", "disc:0,0,0.5"},
        {"universal-step", "--f", "affine:1,2", "--K", "disc:0,0,0.75", "--g", "poly:0,0,1", "--L", "disc:0,0,0.5", "--h",
         "const:1", "--eps", "0.01"},
        {"weighted-step", "--f", "affine:1,2", "--omega", "const:2", "--K", "disc:0,0,0.75", "--g", "poly:0,0,1", "--L",
         "disc:0,0,0.5", "--h", "const:1", "--eps", "0.01"},
        {"build-universal", "--f", "affine:1,2", "--targets", "0,1,i", "--eps", "0.01"},
        {"weighted-orbit", "--f", "affine:1,1", "--omega", "var", "--g", "const:1", "--z", "1", "--n", "10"},
        {"count-zeros", "--expr", "poly:-1,0,0,1", "--disc", "disc:0,0,2"},
        {"cyclicity", "--candidate", "pow:3:var"},
        {"dw", "--f", "pow:2:mobius:1,0.5,0.5,1"},
        {"koenigs", "--f", "poly:0,0.5,0.1"},
        {"boettcher", "--f", "poly:0,0,1,1"},
        {"fixed-points", "--f", "pow:2:mobius:1,0.5,0.5,1"},
        {"render", "--f", "poly:0,0,1", "--window", "-2,-2,2,2", "--res", "256"},
        {"ess-sing", "--g", "exp:mobius:0,1,1,0", "--radii", "1,0.5"},
        {"sector-probe", "--vertex", "1", "--axis", "3.141592653589793", "--opening", "0.7853981633974483", "--radius",
         "0.3"},
        {"finite-universal", "--f", "affine:1,1", "--omega", "var", "--g", "const:1", "--E", "1,0;2,0", "--target", "1,2"},
    };
    const fs::path root = fs::path("acceptance_runs");
    fs::remove_all(root);
    int identical = 0, total = 0;
    std::string bad;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      std::string lines[2];
      for (int rep = 0; rep < 2; ++rep) {
        std::vector<std::string> args = runs[i];
        args.push_back("--seed");
        args.push_back("1234");
        args.push_back("--out");
        args.push_back((root / (std::to_string(rep)) / std::to_string(i)).string());
        std::ostringstream out, err;
        cli::run(args, out, err);
        // output paths differ by run directory only
        lines[rep] = out.str();
        const std::string tag = (root / std::to_string(rep)).string();
        for (auto p = lines[rep].find(tag); p != std::string::npos; p = lines[rep].find(tag, p + 1))
          lines[rep].replace(p, tag.size(), "RUN");
      }
      const auto a = read_dir(root / "0" / std::to_string(i)), b = read_dir(root / "1" / std::to_string(i));
      ++total;
      if (a == b && !a.empty() && lines[0] == lines[1] && lines[0].find("\"status\":\"ok\"") != std::string::npos)
        ++identical;
      else
        bad += " " + runs[i][0];
    }
    l.msg << " " << identical << "/" << total << " CLI runs byte-identical on repeat" << (bad.empty() ? "" : ";") << bad;
    l.check(identical == total, "byte-identical outputs");
  });

  std::cout << "total runtime " << seconds_since(t_all) << " s; " << failures << " criterion(s) failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
