#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fatoulab/mapcore.hpp"
#include "fatoulab/regions.hpp"

namespace fatoulab {

enum class FixedClass { Attracting, Superattracting, Parabolic, Repelling, IndifferentOther };
const char* fixed_class_name(FixedClass c);

struct FixedPointInfo {
  Complex z0{};
  Complex lambda{};
  FixedClass cls = FixedClass::IndifferentOther;
  int petal_count = 0;  // Parabolic only
  int local_degree = 1; // Superattracting: first n >= 2 with f^(n)(z0) != 0
  double residual = 0.0;
};

/// Multiplier thresholds.
inline constexpr double kMultiplierTol = 1e-9;

/// Newton on f(z) - z from grid seeds (step grid_step) inside `search`;
/// 50 iterations, step halving when the residual grows; multiple roots are
/// polished on the first non-vanishing derivative. Deduplicated to 1e-8,
/// residual < 1e-10, sorted by (re, im).
std::vector<FixedPointInfo> find_fixed_points(const MapExpr& f, const CompactRegion& search, double grid_step);

/// NotFixed unless |f(z0) - z0| < 1e-8.
FixedPointInfo classify_fixed_point(const MapExpr& f, Complex z0);

struct ConjugacyMap {
  enum class Kind { Koenigs, Boettcher };
  Kind kind = Kind::Koenigs;
  MapExpr f;
  Complex z0{};
  Complex lambda{};
  int p = 1;
  int N = 0;
  bool capped = false;  // Koenigs: N lowered so |lambda|^-N stays finite

  Complex operator()(Complex z) const;
};

ConjugacyMap koenigs(const MapExpr& f, Complex z0, int N);
ConjugacyMap boettcher(const MapExpr& f, Complex z0, int N);

/// sup over `samples` points of the disc (boundary rings and centre) of
/// |phi(f(z)) - lambda phi(z)| (Koenigs) or |phi(f(z)) - phi(z)^p| (Boettcher).
double conjugacy_defect(const ConjugacyMap& phi, const ClosedDisc& disc, int samples = 256);

struct DWEstimate {
  Complex p{};
  bool boundary_flag = false;
  int iterations_used = 0;
  double residual = 0.0;
};

/// Iterates from 0. Interior convergence gives the fixed point; an orbit
/// creeping to the circle gives the limit direction with boundary_flag.
/// NotSelfMap if one of 20 test points leaves the disc; NoConvergence for
/// rotations (|f'(p)| = 1 at an interior fixed point) and for orbits that
/// neither settle nor approach the circle.
DWEstimate denjoy_wolff(const MapExpr& f, int max_iter = 10000, double tol = 1e-10);

/// Orbit-based petal membership: the orbit of z converges to z0 and its late
/// arguments arg(f^n(z) - z0) stay within opening/2 of `direction`.
bool petal_member(const MapExpr& f, Complex z0, Complex z, double direction, double opening, int max_iter = 100000);

struct Window {
  double x0 = -2, y0 = -2, x1 = 2, y1 = 2;
};

struct EscapeGrid {
  int width = 0, height = 0, max_iter = 0;
  Window window;
  std::vector<std::int32_t> counts;  // row-major, row 0 = top (y1)

  std::int32_t at(int col, int row) const { return counts[static_cast<std::size_t>(row) * width + col]; }
  Complex pixel_center(int col, int row) const;
};

/// First n with |f^n(z)| > escape_radius (0 if z is already outside), or
/// max_iter. Poles and overflow count as escape at that step.
EscapeGrid escape_render(const MapExpr& f, const Window& w, int width, int height, int max_iter, double escape_radius);

/// Binary PGM (P5); 16-bit big-endian samples when max_iter > 255.
std::string to_pgm(const EscapeGrid& g);

}  // namespace fatoulab
