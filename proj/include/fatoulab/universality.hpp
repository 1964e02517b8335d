#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fatoulab/mapcore.hpp"
#include "fatoulab/regions.hpp"
#include "fatoulab/runge.hpp"

namespace fatoulab {

inline constexpr double kDefaultMesh = 0.01;

struct SeparationWitness {
  int m = 0;
  double margin = 0.0;
  double mesh = kDefaultMesh;
  std::string method;
};

/// Smallest N <= n_max with cover(K) and image_cover(f^N, K) disjoint.
/// NotFound otherwise.
SeparationWitness find_runaway_N(const MapExpr& f, const CompactRegion& K, int n_max, double mesh = kDefaultMesh);

/// Smallest m in [0, m_max] with cover(K) and image_cover(f^m, L) disjoint.
SeparationWitness find_separation_m(const MapExpr& f, const CompactRegion& K, const CompactRegion& L, int m_max,
                                    double mesh = kDefaultMesh);

/// Re-checks a witness with fresh covers at half the mesh.
bool reverify(const SeparationWitness& w, const MapExpr& f, const CompactRegion& K, const CompactRegion& L);

struct StepOptions {
  double mesh = kDefaultMesh;
  int n_boundary = 128;  // boundary samples per disc for fitting
  int degree_cap = 128;
  int degree_step = 8;
  int validation_factor = 4;
  std::uint64_t seed = 0;
};

struct StepResult {
  SeparationWitness witness;
  RungeResult fit;
  double error_K = 0.0;  // sup over K validation points of |p - g|
  double error_L = 0.0;  // sup over L validation points of |W(p) - h| (W = weighted push-forward)
};

/// One transitivity transition for C_f: p close to g on K and p o f^m close
/// to h on L. Data on f^m(L) are orbit-paired samples (f^m(w), h(w)).
StepResult universal_step(const MapExpr& f, const CompactRegion& K, const MapExpr& g, const CompactRegion& L,
                          const MapExpr& h, double eps, int m_max, const StepOptions& opt = {});

/// Same for W_{omega,f}: data on f^m(L) are (f^m(w), h(w) / prod_{k<m} omega(f^k(w))).
StepResult weighted_universal_step(const MapExpr& f, const MapExpr& omega, const CompactRegion& K, const MapExpr& g,
                                   const CompactRegion& L, const MapExpr& h, double eps, int m_max,
                                   const StepOptions& opt = {});

/// Pairwise distinctness of f^m on the samples; InjectivityViolation names the pair.
void check_injective(const MapExpr& f, int m, const ComplexList& samples, double tol = 1e-10);

// Weighted orbits --------------------------------------------------------------

struct WeightedOrbitRecord {
  Complex z{};
  ComplexList values;            // W^0 .. W^N
  std::vector<double> log10_mag; // log10 |prod_{j<n} omega(f^j z)|
  std::vector<double> phase;     // accumulated argument of the product
};

/// W^n(z) = prod_{j<n} omega(f^j(z)) * g(f^n(z)). OverflowError (partial
/// values attached) when the product leaves 10^{+-300} or the orbit escapes.
WeightedOrbitRecord weighted_orbit(const MapExpr& f, const MapExpr& omega, const MapExpr& g, Complex z, int N);

/// prod_{j<n} (omega o f^j) * (g o f^n) as an expression.
MapExpr weighted_iterate_map(const MapExpr& f, const MapExpr& omega, const MapExpr& g, int n);

// Diagonal builder ---------------------------------------------------------------

struct UniversalTask {
  CompactRegion L;
  MapExpr h;
};

struct BuildOptions {
  double R0 = 2.0;
  std::vector<double> radii;  // optional R_1, R_2, ...; default R0 * 2^k
  /// Also pin each correction to 0 on the disc D(0, R_k).
  bool guard_disc = false;
  StepOptions step;
};

struct TaskRecord {
  CompactRegion L;
  MapExpr h;
  double eps = 0.0;
  int n = 0;
  double R = 0.0;
  double final_error = 0.0;
  int stage_degree = 0;
};

struct PartialUniversal {
  MapExpr g;  // sum of corrections (constant 0 when there are no tasks)
  std::vector<MapExpr> corrections;
  std::vector<TaskRecord> tasks;
  /// sup of the stage-k correction over the earlier image regions.
  std::vector<double> stage_drift;
  std::vector<std::string> notes;
};

/// Stage k: correction q_k ~ h_k - g_{k-1} on f^{n_k}(L_k) and ~ 0 on every
/// other task image, budget eps / 2^k. n_k is the smallest n > n_{k-1} with
/// f^n(L_k) certified outside D(0, R_k); R_k is raised to the extent of the
/// earlier images when that is larger (recorded in notes).
PartialUniversal build_partial_universal(const MapExpr& f, const std::vector<UniversalTask>& tasks, double eps,
                                         int n_max, const BuildOptions& opt = {});

struct DensityEntry {
  int best_n = 0;
  double best_error = INFINITY;
};

/// For each target: smallest n <= n_max minimising sup_M |g(f^n) - h|.
std::vector<DensityEntry> orbit_density(const MapExpr& f, const MapExpr& g,
                                        const std::vector<std::pair<CompactRegion, MapExpr>>& targets, int n_max,
                                        int n_boundary = 64);

// Composition sequences and the cyclicity obstruction ------------------------------

enum class CompositionMode { Left, Right };

/// Left: F_n = f_n o ... o f_1 (z); Right: G_n = f_1 o ... o f_n (z); n = 1..len.
ComplexList composition_sequence_orbit(const std::vector<MapExpr>& maps, CompositionMode mode, Complex z);

struct CyclicityReport {
  Complex integral{};    // trapezoid value of the contour integral of the candidate
  Complex reference{};   // trapezoid value of the contour integral of 1/(z - a)
  Complex exact_reference{0.0, kTwoPi};
  double gap = 0.0;      // |integral - 2 pi i|
  int nodes = 0;
};

CyclicityReport cyclicity_obstruction(const MapExpr& candidate, const Contour& contour, Complex a);

struct FiniteTargetResult {
  int best_n = 0;
  double max_error = INFINITY;
};

struct FiniteUniversalReport {
  std::vector<FiniteTargetResult> results;
  bool evacuating = false;
  std::string evacuation_note;
};

FiniteUniversalReport finite_set_universal_check(const MapExpr& f, const MapExpr& omega, const FiniteSet& E,
                                                 const std::vector<ComplexList>& targets, const MapExpr& g, int n_max);

}  // namespace fatoulab
