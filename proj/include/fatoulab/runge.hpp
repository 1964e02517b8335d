#pragma once

#include <string>
#include <vector>

#include "fatoulab/mapcore.hpp"

namespace fatoulab {

/// One piece of prescribed data: fit samples and a disjoint, denser
/// validation set of the same function.
struct RungeTarget {
  ComplexList points, values;
  ComplexList check_points, check_values;
  std::string label;
};

struct RungeRequest {
  std::vector<RungeTarget> targets;
  double epsilon = 1e-2;
  int degree_cap = 128;
  int degree_step = 8;
  int validation_factor = 4;
};

struct RungeResult {
  MapExpr p;  // ArnoldiPoly node
  int degree = 0;
  std::vector<double> fit_error;         // per target, sup over fit samples
  std::vector<double> validation_error;  // per target, sup over validation samples
  bool converged = false;
  std::vector<std::pair<int, double>> history;  // (degree, worst validation error)
};

/// Best-so-far result when no degree up to the cap meets epsilon.
class NotConverged : public SearchFailure {
 public:
  NotConverged(const std::string& what, RungeResult best) : SearchFailure(what), best_(std::move(best)) {}
  const char* kind() const noexcept override { return "NotConverged"; }
  const RungeResult& best() const noexcept { return best_; }

 private:
  RungeResult best_;
};

/// Least-squares polynomial fit on the union of the targets' samples, in the
/// variable w = (z - mu) / sigma (mu the sample mean, sigma the largest
/// |z - mu|) with the basis orthogonalised by Arnoldi iteration. Degree
/// 8, 16, 24, ... until every validation sup error is <= epsilon.
RungeResult runge_fit(const RungeRequest& req);

/// Sup of |p(z) - v| over paired lists.
double sup_error(const MapExpr& p, const ComplexList& z, const ComplexList& v);

}  // namespace fatoulab
