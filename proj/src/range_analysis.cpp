#include "fatoulab/range_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fatoulab/parallel.hpp"

namespace fatoulab {

namespace {

ComplexList circle_values(const MapExpr& e, const ClosedDisc& d, int n) {
  ComplexList v(static_cast<std::size_t>(n));
  parallel_for(v.size(), [&](std::size_t j) {
    v[j] = eval(e, d.center + std::polar(d.radius, kTwoPi * static_cast<double>(j) / n));
  });
  return v;
}

ClosedDisc base_disc(const CompactRegion& U) {
  if (U.components.size() != 1) throw InputError("full_range_probe: U_base must be a single disc or polygon");
  if (const auto* d = std::get_if<ClosedDisc>(&U.components[0])) return {d->center, 0.9 * d->radius};
  if (const auto* p = std::get_if<Polygon>(&U.components[0])) {
    Complex c(0.0);
    for (auto v : p->vertices) c += v;
    c /= static_cast<double>(p->vertices.size());
    if (!point_in_polygon(*p, c)) throw InputError("full_range_probe: polygon centroid lies outside the polygon");
    return {c, 0.9 * distance_to_boundary(*p, c)};
  }
  throw InputError("full_range_probe: U_base must be a disc or polygon");
}

}  // namespace

ZeroCountReport count_zeros(const MapExpr& expr, const ClosedDisc& disc, int nodes) {
  if (!(disc.radius > 0.0)) throw InputError("count_zeros: radius must be positive");
  if (nodes < 8) throw InputError("count_zeros: need at least 8 nodes");
  constexpr int kMaxNodes = 1 << 16;
  int n = nodes;
  for (;;) {
    const ComplexList v = circle_values(expr, disc, n);
    double mn = INFINITY;
    for (auto x : v) mn = std::min(mn, std::abs(x));
    if (!(mn > 1e-8)) {
      std::ostringstream s;
      s << "count_zeros: |expr| = " << mn << " on the circle |z - (" << disc.center.real() << "," << disc.center.imag()
        << ")| = " << disc.radius;
      throw BoundaryZero(s.str());
    }
    double total = 0.0, worst = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double step = std::arg(v[(j + 1) % v.size()] / v[j]);
      worst = std::max(worst, std::abs(step));
      total += step;
    }
    if (worst >= kPi / 2 && n < kMaxNodes) {
      n *= 2;
      continue;
    }
    const double w = total / kTwoPi;
    ZeroCountReport rep;
    rep.disc = disc;
    rep.count = static_cast<int>(std::lround(w));
    rep.winding_residual = std::abs(w - rep.count);
    rep.nodes_used = n;
    rep.min_modulus = mn;
    if (rep.count < 0) throw DomainError("count_zeros: negative winding, poles inside the disc");
    return rep;
  }
}

FullRangeReport full_range_probe(const MapExpr& f, const MapExpr& g, FinitePoint z0, double r,
                                 const CompactRegion& U_base, const ComplexList& targets,
                                 const std::vector<int>& schedule) {
  validate(U_base);
  if (!(r > 0.0)) throw InputError("full_range_probe: r must be positive");
  for (int n : schedule)
    if (n < 0) throw InputError("full_range_probe: schedule entries must be >= 0");
  const ClosedDisc base = base_disc(U_base);
  const ComplexList samples = sample_region(U_base, 64, 0.0);

  FullRangeReport rep;
  rep.z0 = z0;
  rep.r = r;
  rep.schedule = schedule;
  for (int n : schedule) {
    bool ok = true;
    for (auto w : samples) {
      Complex x;
      try {
        x = iterate(f, w, n).back();
      } catch (const OverflowError&) {
        ok = ok && !z0;  // escaping counts towards infinity
        continue;
      }
      if (z0 ? !(std::abs(x - *z0) < r) : !(std::abs(x) > r)) ok = false;
    }
    rep.image_ok.push_back(ok);
  }
  if (std::find(rep.image_ok.begin(), rep.image_ok.end(), true) == rep.image_ok.end())
    throw ConvergenceNotObserved("full_range_probe: f^n(U_base) never satisfies the image condition on the schedule");

  rep.targets.resize(targets.size());
  parallel_for(targets.size(), [&](std::size_t t) {
    TargetOutcome& out = rep.targets[t];
    out.c = targets[t];
    std::ostringstream diag;
    for (std::size_t s = 0; s < schedule.size() && !out.attained; ++s) {
      if (!rep.image_ok[s]) continue;
      const int n = schedule[s];
      const MapExpr F = add(compose(g, iterate_map(f, n)), constant(-targets[t]));
      // identically vanishing (constant g hitting the target)
      bool vanishes = true;
      for (auto w : sample_region(disc_region(base.center, base.radius), 16, 0.0))
        if (std::abs(eval(F, w)) > 1e-8) {
          vanishes = false;
          break;
        }
      if (vanishes) {
        out = {targets[t], true, n, base, 0, true, "g o f^n - c vanishes on all samples"};
        return;
      }
      ClosedDisc d = base;
      for (int attempt = 0; attempt < 5; ++attempt) {
        try {
          const ZeroCountReport z = count_zeros(F, d, 1024);
          if (z.count >= 1) {
            out.attained = true;
            out.witness_n = n;
            out.witness_disc = d;
            out.zero_count = z.count;
          } else {
            diag << "n=" << n << ": no zeros; ";
          }
          break;
        } catch (const BoundaryZero&) {
          d.radius *= 0.99;
        } catch (const Error& e) {
          diag << "n=" << n << ": " << e.what() << "; ";
          break;
        }
      }
    }
    if (!out.attained) out.diagnostic = diag.str().empty() ? "no scheduled n meets the image condition" : diag.str();
  });
  return rep;
}

EssentialSingularityReport essential_singularity_probe(const MapExpr& g, FinitePoint z0,
                                                       const std::vector<double>& radii,
                                                       const ComplexList& value_grid, int samples_per_ring,
                                                       double tol) {
  if (samples_per_ring < 16) throw InputError("essential_singularity_probe: need at least 16 samples per ring");
  for (double r : radii)
    if (!(r > 0.0)) throw InputError("essential_singularity_probe: radii must be positive");
  EssentialSingularityReport rep;
  rep.z0 = z0;
  rep.radii = radii;
  rep.tol = tol;

  // bucket the grid values at spacing tol
  std::map<std::pair<long long, long long>, std::vector<int>> buckets;
  auto key = [&](Complex w) {
    return std::make_pair(static_cast<long long>(std::floor(w.real() / tol)),
                          static_cast<long long>(std::floor(w.imag() / tol)));
  };
  for (std::size_t i = 0; i < value_grid.size(); ++i) buckets[key(value_grid[i])].push_back(static_cast<int>(i));

  const int rings = std::max(4, static_cast<int>(std::sqrt(samples_per_ring / 8.0)));
  const int angles = std::max(4, samples_per_ring / rings);
  rep.hit.assign(radii.size(), std::vector<bool>(value_grid.size(), false));
  rep.coverage.assign(radii.size(), 0.0);
  parallel_for(radii.size(), [&](std::size_t k) {
    std::vector<bool>& hit = rep.hit[k];
    const double lo = z0 ? radii[k] / 2 : radii[k], hi = z0 ? radii[k] : 2 * radii[k];
    for (int a = 0; a < rings; ++a) {
      const double rho = lo + (hi - lo) * (a + 0.5) / rings;
      for (int b = 0; b < angles; ++b) {
        const double th = kTwoPi * (b + 0.5 * (a % 2)) / angles;
        const Complex z = (z0 ? *z0 : Complex(0.0)) + std::polar(rho, th);
        Complex w;
        try {
          w = eval(g, z);
        } catch (const Error&) {
          continue;
        }
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
        if (std::abs(w.real()) > 1e15 || std::abs(w.imag()) > 1e15) continue;
        const auto [kx, ky] = key(w);
        for (long long dx = -1; dx <= 1; ++dx)
          for (long long dy = -1; dy <= 1; ++dy) {
            auto it = buckets.find({kx + dx, ky + dy});
            if (it == buckets.end()) continue;
            for (int i : it->second)
              if (!hit[static_cast<std::size_t>(i)] && std::abs(w - value_grid[static_cast<std::size_t>(i)]) <= tol)
                hit[static_cast<std::size_t>(i)] = true;
          }
      }
    }
    const auto c = std::count(hit.begin(), hit.end(), true);
    rep.coverage[k] = value_grid.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(value_grid.size());
  });

  for (std::size_t i = 0; i < value_grid.size(); ++i) {
    bool any = false;
    for (const auto& h : rep.hit) any = any || h[i];
    if (!any) rep.never_approached.push_back(static_cast<int>(i));
  }
  std::ostringstream note;
  note << "sampled evidence only; tolerance " << tol;
  if (rep.never_approached.size() == 1) {
    const Complex v = value_grid[static_cast<std::size_t>(rep.never_approached[0])];
    note << "; exactly one grid value never approached: (" << v.real() << "," << v.imag()
         << "), consistent with a single omitted value";
  }
  rep.note = note.str();
  return rep;
}

JuliaDemo julia_not_plane_demo(const MapExpr& g, int sample_count) {
  if (sample_count < 16) throw InputError("julia_not_plane_demo: need at least 16 samples");
  const int nb = std::max(8, static_cast<int>(std::sqrt(static_cast<double>(sample_count))));
  const ComplexList pts = sample_region(disc_region(0.0, 1.0), nb, 0.0);
  std::vector<double> mod(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Complex w = eval(g, pts[i]);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw PoleError("julia_not_plane_demo: g is not finite on the closed unit disc");
    mod[i] = std::abs(w);
  });
  JuliaDemo out;
  const double mx = *std::max_element(mod.begin(), mod.end());
  out.M = mx > 0.0 ? 2.0 * mx : 1.0;
  out.max_scaled = mx / out.M;
  out.scaled_selfmap_ok = out.max_scaled < 1.0;
  return out;
}

CompactRegion sector_region(Complex vertex, double axis_angle, double opening, double radius) {
  if (!(opening > 0.0 && opening < kTwoPi)) throw InputError("sector_region: opening must lie in (0, 2 pi)");
  if (!(radius > 0.0)) throw InputError("sector_region: radius must be positive");
  ComplexList v{vertex};
  for (int j = 0; j < 64; ++j) {
    const double t = axis_angle - opening / 2 + opening * j / 63.0;
    v.push_back(vertex + std::polar(radius, t));
  }
  return polygon_region(std::move(v));
}

}  // namespace fatoulab
