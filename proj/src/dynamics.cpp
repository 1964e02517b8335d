#include "fatoulab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "fatoulab/parallel.hpp"

namespace fatoulab {

const char* fixed_class_name(FixedClass c) {
  switch (c) {
    case FixedClass::Attracting: return "Attracting";
    case FixedClass::Superattracting: return "Superattracting";
    case FixedClass::Parabolic: return "Parabolic";
    case FixedClass::Repelling: return "Repelling";
    case FixedClass::IndifferentOther: return "IndifferentOther";
  }
  return "?";
}

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void region_box(const CompactRegion& r, double& x0, double& y0, double& x1, double& y1) {
  x0 = y0 = INFINITY;
  x1 = y1 = -INFINITY;
  auto add = [&](Complex z, double pad) {
    x0 = std::min(x0, z.real() - pad);
    y0 = std::min(y0, z.imag() - pad);
    x1 = std::max(x1, z.real() + pad);
    y1 = std::max(y1, z.imag() + pad);
  };
  for (const auto& c : r.components) {
    if (auto d = std::get_if<ClosedDisc>(&c)) add(d->center, d->radius);
    if (auto p = std::get_if<Polygon>(&c))
      for (auto v : p->vertices) add(v, 0.0);
    if (auto s = std::get_if<FiniteSet>(&c))
      for (auto v : s->points) add(v, 0.0);
  }
}

/// Damped Newton for g with derivative dg; nullopt on failure.
std::optional<Complex> newton(const MapExpr& g, const MapExpr& dg, Complex z, int max_iter) {
  Complex gz = eval(g, z);
  for (int it = 0; it < max_iter; ++it) {
    if (gz == Complex(0.0)) return z;
    const Complex d = eval(dg, z);
    if (d == Complex(0.0) || !finite(d)) return std::nullopt;
    Complex step = gz / d;
    Complex zn = z - step;
    Complex gn = eval(g, zn);
    for (int h = 0; h < 30 && !(std::abs(gn) <= std::abs(gz)); ++h) {
      step *= 0.5;
      zn = z - step;
      gn = eval(g, zn);
    }
    if (!finite(zn) || !finite(gn)) return std::nullopt;
    const bool tiny = std::abs(zn - z) <= 1e-15 * (1.0 + std::abs(z));
    z = zn;
    gz = gn;
    if (tiny) break;
  }
  return z;
}

/// For a root of g of multiplicity m > 1, Newton on g^(m-1) converges
/// quadratically; keep the result only if it does not worsen the residual.
Complex polish_multiple(const MapExpr& g, Complex z) {
  ComplexList t;
  try {
    t = taylor(g, z, 8);
  } catch (const Error&) {
    return z;
  }
  int m = 1;
  while (m <= 8 && std::abs(t[static_cast<std::size_t>(m)]) < 1e-3) ++m;
  if (m <= 1 || m > 8) return z;
  MapExpr h = g;
  for (int i = 0; i < m - 1; ++i) h = derivative(h);
  try {
    auto zp = newton(h, derivative(h), z, 40);
    if (!zp) return z;
    if (std::abs(*zp - z) < 1e-3 && std::abs(eval(g, *zp)) <= std::abs(eval(g, z)) * (1.0 + 1e-3) + 1e-15) return *zp;
  } catch (const Error&) {
  }
  return z;
}

}  // namespace

FixedPointInfo classify_fixed_point(const MapExpr& f, Complex z0) {
  const double res = std::abs(eval(f, z0) - z0);
  if (!(res < 1e-8))
    throw NotFixed("not a fixed point: |f(z0) - z0| = " + std::to_string(res));
  FixedPointInfo info;
  info.z0 = z0;
  info.residual = res;
  info.lambda = eval_deriv(f, z0);
  const double m = std::abs(info.lambda);
  if (m < kMultiplierTol) {
    info.cls = FixedClass::Superattracting;
    const ComplexList t = taylor(f, z0, 9);
    info.local_degree = 0;
    double fact = 1.0;
    for (int n = 2; n <= 9; ++n) {
      fact *= n;
      if (fact * std::abs(t[static_cast<std::size_t>(n)]) > kMultiplierTol) {
        info.local_degree = n;
        break;
      }
    }
  } else if (std::abs(info.lambda - 1.0) < kMultiplierTol) {
    // m = min{n : f^(n+1)(z0) != 0}
    const ComplexList t = taylor(f, z0, 9);
    double fact = 1.0;
    info.cls = FixedClass::IndifferentOther;
    for (int n = 2; n <= 9; ++n) {
      fact *= n;
      if (fact * std::abs(t[static_cast<std::size_t>(n)]) > kMultiplierTol) {
        info.cls = FixedClass::Parabolic;
        info.petal_count = n - 1;
        break;
      }
    }
  } else if (m < 1.0 - kMultiplierTol) {
    info.cls = FixedClass::Attracting;
  } else if (m > 1.0 + kMultiplierTol) {
    info.cls = FixedClass::Repelling;
  } else {
    info.cls = FixedClass::IndifferentOther;
  }
  return info;
}

std::vector<FixedPointInfo> find_fixed_points(const MapExpr& f, const CompactRegion& search, double grid_step) {
  if (!(grid_step > 0.0)) throw InputError("grid_step must be positive");
  ComplexList seeds;
  if (search.is_finite()) {
    seeds = sample_boundary(search, 8);
  } else {
    double x0, y0, x1, y1;
    region_box(search, x0, y0, x1, y1);
    const double cells = ((x1 - x0) / grid_step + 1) * ((y1 - y0) / grid_step + 1);
    if (cells > 4e6) throw InputError("grid_step too small for the search region (more than 4e6 seeds)");
    for (double y = y0; y <= y1 + 1e-12; y += grid_step)
      for (double x = x0; x <= x1 + 1e-12; x += grid_step)
        if (contains(search, {x, y}, grid_step * 0.5)) seeds.emplace_back(x, y);
  }
  const MapExpr g = f - var();
  const MapExpr dg = derivative(g);
  std::vector<std::optional<Complex>> roots(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    try {
      auto z = newton(g, dg, seeds[i], 50);
      if (!z) return;
      const Complex zp = polish_multiple(g, *z);
      const double res = std::abs(eval(f, zp) - zp);
      if (res < 1e-10 && contains(search, zp, 1e-8 * (1.0 + std::abs(zp)))) roots[i] = zp;
    } catch (const Error&) {
      // seed dropped
    }
  });
  ComplexList kept;
  for (const auto& r : roots) {
    if (!r) continue;
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](Complex k) { return std::abs(k - *r) < 1e-8; });
    if (!dup) kept.push_back(*r);
  }
  std::sort(kept.begin(), kept.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::vector<FixedPointInfo> out;
  for (auto z : kept) out.push_back(classify_fixed_point(f, z));
  return out;
}

// Conjugacies ---------------------------------------------------------------------

ConjugacyMap koenigs(const MapExpr& f, Complex z0, int N) {
  if (N < 0) throw InputError("koenigs: N must be >= 0");
  const FixedPointInfo info = classify_fixed_point(f, z0);
  if (info.cls != FixedClass::Attracting)
    throw WrongClass(std::string("koenigs needs an attracting fixed point, got ") + fixed_class_name(info.cls));
  ConjugacyMap phi;
  phi.kind = ConjugacyMap::Kind::Koenigs;
  phi.f = f;
  phi.z0 = z0;
  phi.lambda = info.lambda;
  const double decades = -std::log10(std::abs(info.lambda));
  const int cap = static_cast<int>(std::floor(300.0 / decades));
  phi.N = std::min(N, cap);
  phi.capped = phi.N < N;
  return phi;
}

ConjugacyMap boettcher(const MapExpr& f, Complex z0, int N) {
  if (N < 0) throw InputError("boettcher: N must be >= 0");
  const FixedPointInfo info = classify_fixed_point(f, z0);
  if (info.cls != FixedClass::Superattracting || info.local_degree < 2)
    throw WrongClass(std::string("boettcher needs a superattracting fixed point, got ") + fixed_class_name(info.cls));
  ConjugacyMap phi;
  phi.kind = ConjugacyMap::Kind::Boettcher;
  phi.f = f;
  phi.z0 = z0;
  phi.lambda = info.lambda;
  phi.p = info.local_degree;
  phi.N = N;
  return phi;
}

namespace {

Complex ipow(Complex x, int k) {
  Complex r(1.0), b = x;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

Complex boettcher_eval(const ConjugacyMap& phi, Complex z) {
  Complex w = z - phi.z0;
  Complex value = w;
  double pk = 1.0;
  for (int k = 1; k <= phi.N; ++k) {
    if (std::abs(w) < 1e-200 || w == Complex(0.0)) break;
    const Complex fz = eval(phi.f, w + phi.z0);
    const Complex wk = fz - phi.z0;
    const Complex wp = ipow(w, phi.p);
    if (wk == wp) {  // exact power map step, factor 1
      pk *= phi.p;
      w = wk;
      continue;
    }
    const Complex r = wk / wp;
    if (!finite(r)) break;
    if (std::abs(std::abs(std::arg(r)) - kPi) < 1e-12)
      throw BranchAmbiguity("boettcher: ratio on the negative real axis at step " + std::to_string(k));
    pk *= phi.p;
    value *= std::exp(std::log(r) / pk);
    w = wk;
  }
  return value;
}

}  // namespace

Complex ConjugacyMap::operator()(Complex z) const {
  if (kind == Kind::Koenigs) {
    const ComplexList orbit = iterate(f, z, N);
    return (orbit.back() - z0) / ipow(lambda, N);
  }
  try {
    return boettcher_eval(*this, z);
  } catch (const BranchAmbiguity&) {
    return boettcher_eval(*this, z + Complex(1e-12, 1e-12));
  }
}

double conjugacy_defect(const ConjugacyMap& phi, const ClosedDisc& disc, int samples) {
  ComplexList pts{disc.center};
  const int rings = 4;
  for (int r = 1; r <= rings; ++r) {
    const int m = std::max(8, samples * r / (rings * (rings + 1) / 2));
    for (int j = 0; j < m; ++j) pts.push_back(disc.center + std::polar(disc.radius * r / rings, kTwoPi * (j + 0.5) / m));
  }
  std::vector<double> d(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Complex z = pts[i];
    const Complex lhs = phi(eval(phi.f, z));
    const Complex rhs = phi.kind == ConjugacyMap::Kind::Koenigs ? phi.lambda * phi(z) : ipow(phi(z), phi.p);
    d[i] = std::abs(lhs - rhs);
  });
  return *std::max_element(d.begin(), d.end());
}

// Denjoy-Wolff ------------------------------------------------------------------------

DWEstimate denjoy_wolff(const MapExpr& f, int max_iter, double tol) {
  if (max_iter < 1) throw InputError("denjoy_wolff: max_iter must be positive");
  for (int i = 0; i < 20; ++i) {
    const Complex z = std::polar(0.05 + 0.9 * (i % 10) / 9.0, kTwoPi * (i * 0.381966 + 0.1));
    Complex w;
    try {
      w = eval(f, z);
    } catch (const PoleError&) {
      throw NotSelfMap("map has a pole inside the disc");
    }
    if (!(std::abs(w) < 1.0)) throw NotSelfMap("test point " + std::to_string(i) + " is mapped outside the unit disc");
  }
  ComplexList orbit{0.0};
  Complex z = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    const Complex zn = eval(f, z);
    orbit.push_back(zn);
    const double step = std::abs(zn - z);
    z = zn;
    if (1.0 - std::abs(z) < 1e-12) {
      DWEstimate e{z / std::abs(z), true, k, 0.0};
      e.residual = 1.0 - std::abs(z);
      return e;
    }
    if (step < tol) {
      if (1.0 - std::abs(z) < 1e-6) {
        DWEstimate e{z / std::abs(z), true, k, 0.0};
        e.residual = 1.0 - std::abs(z);
        return e;
      }
      const double res = std::abs(eval(f, z) - z);
      const double lam = std::abs(eval_deriv(f, z));
      if (lam >= 1.0 - 1e-9)
        throw NoConvergence("interior fixed point with |f'| = 1: the map is a rotation (excluded)");
      return {z, false, k, res};
    }
  }
  // Late-orbit analysis: modulus creeping up to 1 with a stable direction.
  const std::size_t n = orbit.size();
  const std::size_t q = n - n / 4;
  bool increasing = true;
  for (std::size_t i = q + 1; i < n; ++i)
    if (std::abs(orbit[i]) < std::abs(orbit[i - 1])) increasing = false;
  const Complex u_end = orbit.back() / std::abs(orbit.back());
  const Complex u_q = orbit[q] / std::abs(orbit[q]);
  if (increasing && std::abs(orbit.back()) > 0.9 && std::abs(u_end - u_q) < 1e-3) {
    DWEstimate e{u_end, true, max_iter, 1.0 - std::abs(orbit.back())};
    return e;
  }
  throw NoConvergence("no convergence after " + std::to_string(max_iter) + " iterations (orbit oscillates)");
}

bool petal_member(const MapExpr& f, Complex z0, Complex z, double direction, double opening, int max_iter) {
  Complex w = z;
  int inside = 0;
  for (int k = 0; k < max_iter; ++k) {
    try {
      w = eval(f, w);
    } catch (const Error&) {
      return false;
    }
    if (!finite(w)) return false;
    const double r = std::abs(w - z0);
    if (r < 1e-6) break;
    const double ang = std::remainder(std::arg(w - z0) - direction, kTwoPi);
    inside = std::abs(ang) <= opening / 2 ? inside + 1 : 0;
  }
  return std::abs(w - z0) < 1e-3 && inside > 0;
}

// Escape-time rendering -------------------------------------------------------------------

Complex EscapeGrid::pixel_center(int col, int row) const {
  const double x = window.x0 + (col + 0.5) * (window.x1 - window.x0) / width;
  const double y = window.y1 - (row + 0.5) * (window.y1 - window.y0) / height;
  return {x, y};
}

EscapeGrid escape_render(const MapExpr& f, const Window& w, int width, int height, int max_iter, double escape_radius) {
  if (width < 1 || height < 1 || static_cast<long long>(width) * height > 8192LL * 8192LL)
    throw InputError("render resolution must be between 1x1 and 8192x8192 pixels");
  if (max_iter < 1 || max_iter > 65535) throw InputError("max_iter must be in [1, 65535]");
  if (!(w.x1 > w.x0) || !(w.y1 > w.y0)) throw InputError("render window must have positive extent");
  if (!(escape_radius > 0.0)) throw InputError("escape radius must be positive");
  EscapeGrid g;
  g.width = width;
  g.height = height;
  g.max_iter = max_iter;
  g.window = w;
  g.counts.assign(static_cast<std::size_t>(width) * height, max_iter);
  parallel_for(static_cast<std::size_t>(height), [&](std::size_t row) {
    for (int col = 0; col < width; ++col) {
      Complex z = g.pixel_center(col, static_cast<int>(row));
      std::int32_t n = 0;
      for (; n < max_iter; ++n) {
        if (!finite(z) || std::abs(z) > escape_radius) break;
        try {
          z = eval(f, z);
        } catch (const PoleError&) {
          ++n;
          break;
        }
      }
      g.counts[row * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)] = n;
    }
  });
  return g;
}

std::string to_pgm(const EscapeGrid& g) {
  std::ostringstream out;
  out << "P5\n" << g.width << ' ' << g.height << '\n' << g.max_iter << '\n';
  std::string s = out.str();
  const bool wide = g.max_iter > 255;
  s.reserve(s.size() + g.counts.size() * (wide ? 2 : 1));
  for (auto c : g.counts) {
    if (wide) s.push_back(static_cast<char>((c >> 8) & 0xff));
    s.push_back(static_cast<char>(c & 0xff));
  }
  return s;
}

}  // namespace fatoulab
