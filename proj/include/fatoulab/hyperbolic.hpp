#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fatoulab/ext_complex.hpp"
#include "fatoulab/mapcore.hpp"

namespace fatoulab {

/// Poincare distance on the unit disc, curvature -1:
/// d = log((1 + p) / (1 - p)), p = |z - w| / |1 - conj(w) z|.
double hyp_dist(Complex z, Complex w);

// Blaschke kernels, templated on the scalar so the extended-exponent type can
// run the same formulas. ------------------------------------------------------

inline double abs_double(const Complex& z) { return std::abs(z); }
inline double abs_double(const ExtComplex& z) { return std::sqrt(z.norm_double()); }

/// z (z - a) / (1 - conj(a) z)
template <class C>
C blaschke_apply(const C& a, const C& z) {
  return z * (z - a) / (C(1.0) - conj(a) * z);
}

/// (2z - conj(a) z^2 - a) / (1 - conj(a) z)^2
template <class C>
C blaschke_slope(const C& a, const C& z) {
  const C den = C(1.0) - conj(a) * z;
  return (C(2.0) * z - conj(a) * z * z - a) / (den * den);
}

/// a / (1 + sqrt((1 - |a|)(1 + |a|))), equal to (1 - sqrt(1 - |a|^2)) / conj(a).
template <class C>
C critical_point_of(const C& a) {
  const double t = abs_double(a);
  return a / C(1.0 + std::sqrt((1.0 - t) * (1.0 + t)));
}

/// 2c / (1 + |c|^2), inverse of critical_point_of.
template <class C>
C param_for_critical_of(const C& c) {
  return C(2.0) * c / C(1.0 + norm_double(c));
}

/// Checked versions: DomainError unless 0 < |a| < 1.
Complex critical_point(Complex a);
Complex param_for_critical(Complex c);

// Sequences -------------------------------------------------------------------

/// One self-map of the disc in a composition sequence.
struct DiscFactor {
  enum class Kind { Degree2, Automorphism };
  Kind kind = Kind::Degree2;
  Complex a{};
  /// 1 - |a|, kept separately so parameters closer to the circle than double
  /// resolution still contribute to the tail sum.
  double deficit = 1.0;
  double theta = 0.0;  // rotation, automorphisms only

  static DiscFactor degree2(Complex a);
  static DiscFactor degree2(Complex a, double deficit);
  static DiscFactor automorphism(Complex a, double theta = 0.0);

  Complex apply(Complex z) const;
  MapExpr map() const;
};

struct BlaschkeSequence {
  std::vector<DiscFactor> factors;

  static BlaschkeSequence from_params(const ComplexList& a);
  std::size_t size() const { return factors.size(); }
  Complex param(std::size_t n) const { return factors.at(n - 1).a; }  // 1-based
  /// c_n for Degree2 factors (1-based).
  Complex critical(std::size_t n) const;
  /// B_n(z) = b_n o ... o b_1 (z); B_0 = identity.
  Complex partial(std::size_t n, Complex z) const;
  MapExpr partial_map(std::size_t n) const;
  MapExpr factor_map(std::size_t n) const { return factors.at(n - 1).map(); }
};

/// "re im [deficit]" per line, '#' comments; a line starting with "aut"
/// ("aut re im [theta]") is a disc automorphism.
BlaschkeSequence read_sequence(const std::string& text);
BlaschkeSequence read_sequence_file(const std::string& path);
std::string write_sequence(const BlaschkeSequence& s);

/// Canonical test sequences: a_n = 1 - 1/(n+1), a_n = 1 - 2^-n.
BlaschkeSequence harmonic_sequence(int n);
BlaschkeSequence geometric_sequence(int n);
/// Disc automorphisms in inverse pairs (e^{it} phi_a, then its inverse), so
/// orbits stay bounded away from the circle.
BlaschkeSequence automorphism_sequence(int n);

// Classification ---------------------------------------------------------------

enum class Verdict { Contracting, SemiContracting, EventuallyIsometric, Inconclusive };
const char* verdict_name(Verdict v);

struct ClassifyOptions {
  double divergence_threshold = 20.0;
  /// Divergence is also accepted when the partial sums still grow by this much
  /// over the last half of the horizon.
  double divergence_increment = 0.1;
  double cauchy_tol = 1e-6;
  double contracting_threshold = 1e-3;
  double iso_tol = 1e-9;
};

struct ClassificationReport {
  Verdict verdict = Verdict::Inconclusive;
  double tail_sum = 0.0;
  double tail_increment = 0.0;  // S_H - S_{H/2}
  int horizon = 0;
  /// Smallest N from which every trace is constant to iso_tol; -1 if none.
  int constant_from = -1;
  bool proper_factor_beyond = false;
  std::vector<std::pair<Complex, Complex>> pairs;
  std::vector<std::vector<double>> traces;  // traces[p][n], n = 0..horizon
  /// First n with B_n(z) = B_n(w) exactly, -1 if never; such pairs are
  /// left out of the verdict.
  std::vector<int> collided_at;
  std::string reason;
};

ClassificationReport classify_sequence(const BlaschkeSequence& seq, const std::vector<std::pair<Complex, Complex>>& pairs,
                                       int horizon = 5000, const ClassifyOptions& opt = {});

// Exhaustion and the non-injective construction ---------------------------------

struct ExhaustionDisc {
  Complex center{};
  double radius = 0.5;
  int index = 0;  // position in the underlying list of distinct discs (1-based)
};

/// Revisit schedule 1 | 2 | 1,3 | 1,2,4 | 1,2,3,5 | ... (block j: 1..j-2 then j).
std::vector<int> revisit_schedule(int count);

/// Distinct discs D(k, 1/m) with k in Q + iQ, |k| + 1/m < 1, by height
/// max(m, q, |a|, |b|) for k = (a + bi)/q in lowest terms, then lexicographic
/// in (m, q, a, b).
std::vector<ExhaustionDisc> distinct_discs(int count);

/// Distinct discs in revisit order, `count` entries.
std::vector<ExhaustionDisc> disc_exhaustion(int count);

struct NoninjectiveSequence {
  BlaschkeSequence sequence;             // double parameters (may underflow to 0)
  std::vector<ExtComplex> params;        // a_1..a_len, extended exponent
  std::vector<ExtComplex> targets;       // B_n(k) for n = 1..len-1
  std::vector<Complex> centers;          // k used at step n
  std::vector<int> exhaustion_position;  // index into the exhaustion list used at step n
  std::vector<std::string> skips;
};

NoninjectiveSequence build_noninjective_sequence(const std::vector<ExhaustionDisc>& exhaustion, int length);

/// Extended-precision B_n(z) for the construction's parameters.
ExtComplex partial_ext(const std::vector<ExtComplex>& params, std::size_t n, const ExtComplex& z);

// Wandering model ----------------------------------------------------------------

/// Model domains U_n = t_n + D; on U_n the map is z -> t_{n+1} + b_{n+1}(z - t_n).
struct WanderingModel {
  std::vector<MapExpr> maps;         // b_1, b_2, ...
  std::vector<Complex> translations; // t_0, t_1, ...

  /// InputError if two translated discs are not separated (|t_n - t_m| <= 2).
  void validate() const;
};

WanderingModel make_model(const BlaschkeSequence& seq, const std::vector<Complex>& translations);
WanderingModel make_model(const MapExpr& b, const std::vector<Complex>& translations);

ComplexList model_orbit(const WanderingModel& model, Complex z0, int n);

}  // namespace fatoulab
