#include "fatoulab/runge.hpp"

#include <algorithm>
#include <cmath>

#include "fatoulab/parallel.hpp"

namespace fatoulab {

double sup_error(const MapExpr& p, const ComplexList& z, const ComplexList& v) {
  std::vector<double> e(z.size(), 0.0);
  parallel_for(z.size(), [&](std::size_t i) { e[i] = std::abs(eval(p, z[i]) - v[i]); });
  double m = 0.0;
  for (double x : e) m = std::max(m, std::isnan(x) ? INFINITY : x);
  return m;
}

namespace {

struct Basis {
  Complex mu;
  double sigma = 1.0;
  Eigen::MatrixXcd Q;  // M x (n+1), columns with norm sqrt(M)
  Eigen::MatrixXcd H;  // (n+1) x n
  int degree = 0;      // highest degree reached
};

Basis arnoldi(const ComplexList& z, int n) {
  const auto M = static_cast<Eigen::Index>(z.size());
  Basis b;
  Complex mean(0.0);
  for (auto x : z) mean += x;
  b.mu = mean / static_cast<double>(z.size());
  double sigma = 0.0;
  for (auto x : z) sigma = std::max(sigma, std::abs(x - b.mu));
  b.sigma = sigma > 0.0 ? sigma : 1.0;
  Eigen::VectorXcd w(M);
  for (Eigen::Index i = 0; i < M; ++i) w(i) = (z[static_cast<std::size_t>(i)] - b.mu) / b.sigma;
  b.Q = Eigen::MatrixXcd::Zero(M, n + 1);
  b.H = Eigen::MatrixXcd::Zero(n + 1, n);
  b.Q.col(0).setOnes();
  const double sqM = std::sqrt(static_cast<double>(M));
  b.degree = 0;
  for (int k = 1; k <= n; ++k) {
    Eigen::VectorXcd q = w.cwiseProduct(b.Q.col(k - 1));
    // two passes of modified Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < k; ++j) {
        const Complex h = b.Q.col(j).dot(q) / static_cast<double>(M);
        b.H(j, k - 1) += h;
        q -= h * b.Q.col(j);
      }
    const double nq = q.norm() / sqM;
    if (!(nq > 1e-13)) break;  // polynomial space exhausted on these samples
    b.H(k, k - 1) = nq;
    b.Q.col(k) = q / nq;
    b.degree = k;
  }
  return b;
}

}  // namespace

RungeResult runge_fit(const RungeRequest& req) {
  if (req.targets.empty()) throw InputError("runge_fit: no targets");
  if (!(req.epsilon > 0.0)) throw InputError("runge_fit: epsilon must be positive");
  if (req.degree_cap < 0 || req.degree_step < 1) throw InputError("runge_fit: bad degree schedule");
  if (req.validation_factor < 4) throw InputError("runge_fit: validation_factor must be >= 4");
  ComplexList Z, F;
  for (const auto& t : req.targets) {
    if (t.points.size() != t.values.size() || t.check_points.size() != t.check_values.size())
      throw InputError("runge_fit: points and values differ in length");
    if (t.points.empty() || t.check_points.empty()) throw InputError("runge_fit: empty target");
    Z.insert(Z.end(), t.points.begin(), t.points.end());
    F.insert(F.end(), t.values.begin(), t.values.end());
  }
  for (auto v : F)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("runge_fit: non-finite target value");

  const int max_deg = std::min<int>(req.degree_cap, static_cast<int>(Z.size()) - 1);
  const Basis B = arnoldi(Z, std::max(max_deg, 0));
  const auto M = static_cast<Eigen::Index>(Z.size());
  Eigen::VectorXcd rhs(M);
  for (Eigen::Index i = 0; i < M; ++i) rhs(i) = F[static_cast<std::size_t>(i)];

  std::vector<int> schedule;
  for (int d = std::min(req.degree_step, B.degree); d < B.degree; d += req.degree_step) schedule.push_back(d);
  schedule.push_back(B.degree);
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());

  RungeResult best;
  double best_worst = INFINITY;
  std::vector<std::pair<int, double>> history;
  for (int d : schedule) {
    const Eigen::MatrixXcd Qd = B.Q.leftCols(d + 1);
    const Eigen::VectorXcd c = Qd.householderQr().solve(rhs);
    ArnoldiBasis ab;
    ab.center = B.mu;
    ab.scale = B.sigma;
    ab.H = B.H.topLeftCorner(d + 1, d);
    ab.coeffs = c;
    RungeResult r;
    r.p = arnoldi_poly(std::move(ab));
    r.degree = d;
    double worst = 0.0;
    for (const auto& t : req.targets) {
      r.fit_error.push_back(sup_error(r.p, t.points, t.values));
      r.validation_error.push_back(sup_error(r.p, t.check_points, t.check_values));
      worst = std::max(worst, r.validation_error.back());
    }
    history.emplace_back(d, worst);
    r.converged = worst <= req.epsilon;
    if (r.converged) {
      r.history = history;
      return r;
    }
    if (worst < best_worst) {
      best_worst = worst;
      best = r;
    }
  }
  best.history = history;
  throw NotConverged("runge_fit: no degree <= " + std::to_string(req.degree_cap) + " reaches epsilon " +
                         std::to_string(req.epsilon) + " (best validation error " + std::to_string(best_worst) + ")",
                     best);
}

}  // namespace fatoulab
