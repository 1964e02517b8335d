#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fatoulab/mapcore.hpp"
#include "fatoulab/regions.hpp"

namespace fatoulab {

struct ZeroCountReport {
  ClosedDisc disc;
  int count = 0;
  double winding_residual = 0.0;  // |raw winding - count|
  int nodes_used = 0;
  double min_modulus = 0.0;       // min sampled |expr| on the circle
};

/// Argument principle by phase accumulation. Nodes are doubled (up to 2^16)
/// until every step's phase jump is below pi/2. BoundaryZero if the sampled
/// modulus drops to 1e-8; DomainError if the winding is negative (poles).
ZeroCountReport count_zeros(const MapExpr& expr, const ClosedDisc& disc, int nodes = 1024);

/// nullopt stands for infinity.
using FinitePoint = std::optional<Complex>;

struct TargetOutcome {
  Complex c{};
  bool attained = false;
  int witness_n = -1;
  ClosedDisc witness_disc;
  int zero_count = 0;
  bool identically = false;  // g o f^n - c vanished on every sample
  std::string diagnostic;
};

struct FullRangeReport {
  FinitePoint z0;
  double r = 0.0;
  std::vector<int> schedule;
  std::vector<bool> image_ok;  // image condition per schedule entry
  std::vector<TargetOutcome> targets;
};

/// For z0 finite the image condition is f^n(U_base) inside D(z0, r); for
/// z0 = infinity it is |f^n| > r on U_base (r plays the role of M). Checked
/// on samples. For each target the first scheduled n with the image
/// condition and a zero of g o f^n - c in the shrunk base disc (radius
/// 0.9x, for polygons the largest disc about the centroid) is the witness.
/// ConvergenceNotObserved if no scheduled n meets the image condition.
FullRangeReport full_range_probe(const MapExpr& f, const MapExpr& g, FinitePoint z0, double r,
                                 const CompactRegion& U_base, const ComplexList& targets,
                                 const std::vector<int>& schedule);

struct EssentialSingularityReport {
  FinitePoint z0;
  std::vector<double> radii;
  std::vector<double> coverage;  // fraction of value_grid approached, per radius
  std::vector<std::vector<bool>> hit;  // [radius][grid point]
  double tol = 0.1;
  std::vector<int> never_approached;  // grid indices missed at every radius
  std::string label = "heuristic";
  std::string note;
};

/// Samples g on the punctured annuli r/2 <= |z - z0| <= r (z0 finite) or
/// R <= |z| <= 2R (z0 infinite) and records which grid values come within
/// tol of a sampled image.
EssentialSingularityReport essential_singularity_probe(const MapExpr& g, FinitePoint z0,
                                                       const std::vector<double>& radii,
                                                       const ComplexList& value_grid, int samples_per_ring,
                                                       double tol = 0.1);

struct JuliaDemo {
  double M = 0.0;
  double max_scaled = 0.0;  // sampled sup |g / M| on the closed unit disc
  bool scaled_selfmap_ok = false;
};

/// M = 2 * sampled max |g| on the closed unit disc; PoleError on a pole.
JuliaDemo julia_not_plane_demo(const MapExpr& g, int sample_count = 4096);

/// Vertex, the two straight edges and a 64-point arc. InputError unless
/// 0 < opening < 2 pi and radius > 0.
CompactRegion sector_region(Complex vertex, double axis_angle, double opening, double radius);

}  // namespace fatoulab
