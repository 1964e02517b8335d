#pragma once

#include <random>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fatoulab/mapcore.hpp"

namespace fatoulab {

struct ClosedDisc {
  Complex center{};
  double radius = 1.0;
};

/// Simple polygon, vertices in order (either orientation).
struct Polygon {
  ComplexList vertices;
};

struct FiniteSet {
  ComplexList points;
};

using RegionComponent = std::variant<ClosedDisc, Polygon, FiniteSet>;

/// Finite union of closed discs, polygons and finite point sets.
struct CompactRegion {
  std::vector<RegionComponent> components;

  bool empty() const { return components.empty(); }
  /// True when every component is a FiniteSet.
  bool is_finite() const;
  /// Largest |z| over the region.
  double max_modulus() const;
  /// Largest distance from `c` to a point of the region.
  double max_distance_from(Complex c) const;
};

/// Radius used to represent points as discs.
inline constexpr double kPointRadius = 1e-300;

CompactRegion disc_region(Complex center, double radius);
CompactRegion polygon_region(ComplexList vertices);
CompactRegion finite_set_region(ComplexList points);
CompactRegion region_union(const CompactRegion& a, const CompactRegion& b);

/// Validates components (radius > 0, >= 3 vertices, polygon simple, finite
/// sets non-empty); InputError otherwise.
void validate(const CompactRegion& r);

bool contains(const CompactRegion& r, Complex z, double tol = 0.0);
bool point_in_polygon(const Polygon& p, Complex z);
double distance_to_boundary(const Polygon& p, Complex z);

struct DiscCover {
  std::vector<ClosedDisc> discs;
  std::string source;
};

/// A positively oriented circle for trapezoid quadrature.
struct Contour {
  Complex center{};
  double radius = 1.0;
  int orientation = 1;
  int node_count = 512;
};
/// InputError unless radius > 0 and node_count is a power of two >= 64.
void validate(const Contour& c);

/// Equally spaced samples: angle 2 pi j / n on circles (starting at angle 0),
/// equal arc length along polygon edge chains starting at the first vertex;
/// finite sets verbatim.
ComplexList sample_boundary(const CompactRegion& region, int n_per_component);

/// Deterministic fit samples: boundary samples plus interior rings (discs) or
/// interior grid points (polygons); finite sets verbatim. `phase` in [0, 1)
/// shifts every angular/grid parameter, so different phases give disjoint
/// point sets.
ComplexList sample_region(const CompactRegion& region, int n_boundary, double phase = 0.0);

/// Uniform random points in the region (finite sets: random members).
ComplexList sample_uniform(const CompactRegion& region, int count, std::mt19937_64& rng);

/// Subdiscs of radius <= mesh whose union contains the region (discs are
/// subdivided on a square grid; polygons likewise, keeping cells that meet
/// the polygon; finite points become point discs).
std::vector<ClosedDisc> subdivide(const CompactRegion& region, double mesh);

/// Cover of the region itself: discs verbatim, polygons subdivided at mesh,
/// points as point discs.
DiscCover cover(const CompactRegion& region, double mesh = 0.02);

struct ImageCoverOptions {
  double blowup_cap = 1e6;
  int circle_samples = 64;
  double slack = 1.1;
};

/// Certified (up to circle sampling) cover of f(region). Each subdisc D(z, p)
/// contributes D(f(z), slack * max_{|w-z| = 2p} |f(w) - f(z)|), the Cauchy
/// estimate bound for f on D(z, p).
DiscCover image_cover(const MapExpr& f, const CompactRegion& region, double mesh,
                      const ImageCoverOptions& opt = {});

struct Disjointness {
  bool disjoint = false;
  double margin = 0.0;
};

/// min over pairs of |c_a - c_b| - r_a - r_b; disjoint iff that is > 0.
Disjointness covers_disjoint(const DiscCover& a, const DiscCover& b);

// IO -------------------------------------------------------------------------

/// {"discs": [[cx,cy,r],...], "polygons": [[[x,y],...],...], "points": [[x,y],...]}
CompactRegion region_from_json(const nlohmann::json& j, const std::string& where = "");
nlohmann::json region_to_json(const CompactRegion& r);

/// Inline: components joined by '|', each one of
///   disc:cx,cy,r   polygon:x,y;x,y;x,y   points:x,y;x,y
/// or JSON object text, or @file.
CompactRegion parse_region_spec(const std::string& text);

}  // namespace fatoulab
