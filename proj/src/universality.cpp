#include "fatoulab/universality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fatoulab/parallel.hpp"

namespace fatoulab {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string fmt(Complex z) {
  std::ostringstream s;
  s.precision(12);
  s << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return s.str();
}

SeparationWitness separation_search(const MapExpr& f, const CompactRegion& K, const CompactRegion& L, int first,
                                    int last, double mesh, const char* what) {
  validate(K);
  validate(L);
  if (K.empty() || L.empty()) throw InputError(std::string(what) + ": empty region");
  if (last < first) throw InputError(std::string(what) + ": search bound below the first index");
  const DiscCover ck = cover(K, mesh);
  for (int m = first; m <= last; ++m) {
    const DiscCover cl = image_cover(iterate_map(f, m), L, mesh);
    const Disjointness d = covers_disjoint(ck, cl);
    if (d.disjoint) {
      std::ostringstream method;
      method << "certified disc covers (mesh " << mesh << ", " << ck.discs.size() << " x " << cl.discs.size()
             << " discs, Cauchy-estimate image radii)";
      return {m, d.margin, mesh, method.str()};
    }
  }
  throw NotFound(std::string(what) + ": no separating index up to " + std::to_string(last));
}

/// f^m(w) and prod_{k<m} omega(f^k(w)) (1 when omega is null), with the
/// log10-magnitude ledger guarding against overflow.
struct PushForward {
  Complex image;
  Complex weight{1.0, 0.0};
  bool unit_weight = true;  // ledger stayed at exactly (0, 0)
};

PushForward push_forward(const MapExpr& f, const MapExpr* omega, Complex w, int m) {
  PushForward out;
  Complex z = w;
  double log_mag = 0.0, phase = 0.0;
  for (int k = 0; k < m; ++k) {
    if (omega) {
      const Complex om = eval(*omega, z);
      if (!(std::abs(om) > 1e-12)) throw WeightVanishes(w, k);
      log_mag += std::log10(std::abs(om));
      phase += std::arg(om);
      if (std::abs(log_mag) > 300.0)
        throw OverflowError("weight product leaves 10^(+-300) at step " + std::to_string(k), k);
      out.weight *= om;
    }
    z = eval(f, z);
    if (!finite(z) || std::abs(z) > kOverflowModulus) throw OverflowError("orbit escaped at step " + std::to_string(k + 1), k + 1);
  }
  out.image = z;
  out.unit_weight = log_mag == 0.0 && phase == 0.0;
  return out;
}

StepResult step_impl(const MapExpr& f, const MapExpr* omega, const CompactRegion& K, const MapExpr& g,
                     const CompactRegion& L, const MapExpr& h, double eps, int m_max, const StepOptions& opt) {
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  StepResult res;
  res.witness = find_separation_m(f, K, L, m_max, opt.mesh);
  const int m = res.witness.m;

  const int nb = opt.n_boundary, vf = opt.validation_factor;
  const ComplexList Lfit = sample_region(L, nb, 0.0), Lchk = sample_region(L, nb * vf, 0.5);
  check_injective(f, m, Lfit);
  const ComplexList Kfit = sample_region(K, nb, 0.0), Kchk = sample_region(K, nb * vf, 0.5);

  RungeTarget tk;
  tk.label = "K";
  tk.points = Kfit;
  tk.values = eval_many(g, Kfit);
  tk.check_points = Kchk;
  tk.check_values = eval_many(g, Kchk);

  auto push_all = [&](const ComplexList& ws) {
    std::vector<PushForward> out(ws.size());
    parallel_for(ws.size(), [&](std::size_t i) { out[i] = push_forward(f, omega, ws[i], m); });
    return out;
  };
  const std::vector<PushForward> pf_fit = push_all(Lfit), pf_chk = push_all(Lchk);
  const ComplexList h_fit = eval_many(h, Lfit), h_chk = eval_many(h, Lchk);

  RungeTarget tl;
  tl.label = "f^m(L)";
  for (std::size_t i = 0; i < Lfit.size(); ++i) {
    tl.points.push_back(pf_fit[i].image);
    tl.values.push_back(pf_fit[i].unit_weight ? h_fit[i] : h_fit[i] / pf_fit[i].weight);
  }
  for (std::size_t i = 0; i < Lchk.size(); ++i) {
    tl.check_points.push_back(pf_chk[i].image);
    tl.check_values.push_back(pf_chk[i].unit_weight ? h_chk[i] : h_chk[i] / pf_chk[i].weight);
  }

  // the L error is |P| times the fit error on f^m(L)
  double pmax = 1.0;
  for (const auto& pf : pf_chk) pmax = std::max(pmax, std::abs(pf.weight));
  for (const auto& pf : pf_fit) pmax = std::max(pmax, std::abs(pf.weight));

  RungeRequest req;
  req.targets = {tk, tl};
  req.epsilon = pmax > 1.0 ? eps / pmax : eps;
  req.degree_cap = opt.degree_cap;
  req.degree_step = opt.degree_step;
  req.validation_factor = vf;
  res.fit = runge_fit(req);

  res.error_K = res.fit.validation_error[0];
  double eL = 0.0;
  for (std::size_t i = 0; i < Lchk.size(); ++i) {
    const Complex pv = eval(res.fit.p, pf_chk[i].image);
    const Complex wv = pf_chk[i].unit_weight ? pv : pf_chk[i].weight * pv;
    eL = std::max(eL, std::abs(wv - h_chk[i]));
  }
  res.error_L = eL;
  return res;
}

}  // namespace

SeparationWitness find_runaway_N(const MapExpr& f, const CompactRegion& K, int n_max, double mesh) {
  return separation_search(f, K, K, 1, n_max, mesh, "find_runaway_N");
}

SeparationWitness find_separation_m(const MapExpr& f, const CompactRegion& K, const CompactRegion& L, int m_max,
                                    double mesh) {
  return separation_search(f, K, L, 0, m_max, mesh, "find_separation_m");
}

bool reverify(const SeparationWitness& w, const MapExpr& f, const CompactRegion& K, const CompactRegion& L) {
  const double mesh = w.mesh / 2;
  return covers_disjoint(cover(K, mesh), image_cover(iterate_map(f, w.m), L, mesh)).disjoint;
}

void check_injective(const MapExpr& f, int m, const ComplexList& samples, double tol) {
  ComplexList img(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { img[i] = iterate(f, samples[i], m).back(); });
  // sort by real part, compare within a tol window
  std::vector<std::size_t> idx(img.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return img[a].real() != img[b].real() ? img[a].real() < img[b].real() : a < b;
  });
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size() && img[idx[b]].real() - img[idx[a]].real() <= tol; ++b) {
      const std::size_t i = std::min(idx[a], idx[b]), j = std::max(idx[a], idx[b]);
      if (samples[i] == samples[j]) continue;
      if (std::abs(img[i] - img[j]) <= tol)
        throw InjectivityViolation("f^" + std::to_string(m) + " identifies samples " + fmt(samples[i]) + " and " +
                                   fmt(samples[j]) + " (both map to " + fmt(img[i]) + ")");
    }
}

StepResult universal_step(const MapExpr& f, const CompactRegion& K, const MapExpr& g, const CompactRegion& L,
                          const MapExpr& h, double eps, int m_max, const StepOptions& opt) {
  return step_impl(f, nullptr, K, g, L, h, eps, m_max, opt);
}

StepResult weighted_universal_step(const MapExpr& f, const MapExpr& omega, const CompactRegion& K, const MapExpr& g,
                                   const CompactRegion& L, const MapExpr& h, double eps, int m_max,
                                   const StepOptions& opt) {
  return step_impl(f, &omega, K, g, L, h, eps, m_max, opt);
}

// Weighted orbits ---------------------------------------------------------------------

WeightedOrbitRecord weighted_orbit(const MapExpr& f, const MapExpr& omega, const MapExpr& g, Complex z, int N) {
  if (N < 0) throw InputError("weighted_orbit: N must be >= 0");
  WeightedOrbitRecord rec;
  rec.z = z;
  Complex prod(1.0, 0.0);
  double lm = 0.0, ph = 0.0;
  Complex w = z;
  for (int n = 0;; ++n) {
    rec.values.push_back(prod * eval(g, w));
    rec.log10_mag.push_back(lm);
    rec.phase.push_back(ph);
    if (n == N) break;
    const Complex om = eval(omega, w);
    if (om == Complex(0.0)) {
      lm = -INFINITY;
    } else {
      lm += std::log10(std::abs(om));
      ph += std::arg(om);
    }
    prod *= om;
    if (lm > 300.0 || (std::isfinite(lm) && lm < -300.0))
      throw OverflowError("weight product leaves 10^(+-300) after step " + std::to_string(n + 1), n + 1, rec.values);
    w = eval(f, w);
    if (!finite(w) || std::abs(w) > kOverflowModulus)
      throw OverflowError("orbit escaped at step " + std::to_string(n + 1), n + 1, rec.values);
  }
  return rec;
}

MapExpr weighted_iterate_map(const MapExpr& f, const MapExpr& omega, const MapExpr& g, int n) {
  if (n < 0) throw InputError("weighted_iterate_map: n must be >= 0");
  MapExpr out = compose(g, iterate_map(f, n));
  for (int j = n - 1; j >= 0; --j) out = mul(j == 0 ? omega : compose(omega, iterate_map(f, j)), out);
  return n == 0 ? g : out;
}

// Diagonal builder ------------------------------------------------------------------------

PartialUniversal build_partial_universal(const MapExpr& f, const std::vector<UniversalTask>& tasks, double eps,
                                         int n_max, const BuildOptions& opt) {
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  PartialUniversal out;
  out.g = constant(0.0);
  if (tasks.empty()) return out;
  if (!opt.radii.empty() && opt.radii.size() < tasks.size()) throw InputError("fewer guard radii than tasks");
  const StepOptions& so = opt.step;

  // Plan n_k and R_k.
  int n_prev = 0;
  double extent = 0.0, R_prev = 0.0;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    validate(tasks[k].L);
    TaskRecord rec;
    rec.L = tasks[k].L;
    rec.h = tasks[k].h;
    rec.eps = eps / std::ldexp(1.0, static_cast<int>(k) + 1);
    double R = opt.radii.empty() ? opt.R0 * std::ldexp(1.0, static_cast<int>(k) + 1) : opt.radii[k];
    if (!opt.radii.empty() && !(R > R_prev)) throw InputError("guard radii must increase strictly");
    if (R < extent) {
      std::ostringstream note;
      note << "task " << k + 1 << ": R raised from " << R << " to " << extent << " to enclose earlier images";
      out.notes.push_back(note.str());
      R = extent;
    }
    rec.R = R;
    R_prev = R;
    const DiscCover guard = cover(disc_region(0.0, R), so.mesh);
    int found = -1;
    DiscCover img;
    for (int n = n_prev + 1; n <= n_max; ++n) {
      img = image_cover(iterate_map(f, n), rec.L, so.mesh);
      if (covers_disjoint(guard, img).disjoint) {
        found = n;
        break;
      }
    }
    if (found < 0)
      throw NotFound("build_partial_universal: task " + std::to_string(k + 1) + " has no n <= " + std::to_string(n_max) +
                     " with f^n(L) outside D(0, R)");
    rec.n = found;
    n_prev = found;
    for (const auto& d : img.discs) extent = std::max(extent, std::abs(d.center) + d.radius);
    out.tasks.push_back(rec);
  }

  // Samples and their images.
  const std::size_t T = tasks.size();
  std::vector<ComplexList> Lfit(T), Lchk(T), Ifit(T), Ichk(T), Hfit(T), Hchk(T), Gfit(T), Gchk(T);
  for (std::size_t k = 0; k < T; ++k) {
    const TaskRecord& t = out.tasks[k];
    Lfit[k] = sample_region(t.L, so.n_boundary, 0.0);
    Lchk[k] = sample_region(t.L, so.n_boundary * so.validation_factor, 0.5);
    check_injective(f, t.n, Lfit[k]);
    auto push = [&](const ComplexList& ws) {
      ComplexList r(ws.size());
      parallel_for(ws.size(), [&](std::size_t i) { r[i] = iterate(f, ws[i], t.n).back(); });
      return r;
    };
    Ifit[k] = push(Lfit[k]);
    Ichk[k] = push(Lchk[k]);
    Hfit[k] = eval_many(t.h, Lfit[k]);
    Hchk[k] = eval_many(t.h, Lchk[k]);
    Gfit[k].assign(Ifit[k].size(), 0.0);
    Gchk[k].assign(Ichk[k].size(), 0.0);
  }

  for (std::size_t k = 0; k < T; ++k) {
    RungeRequest req;
    req.epsilon = out.tasks[k].eps;
    req.degree_cap = so.degree_cap;
    req.degree_step = so.degree_step;
    req.validation_factor = so.validation_factor;
    for (std::size_t j = 0; j < T; ++j) {
      RungeTarget t;
      t.label = "task " + std::to_string(j + 1);
      t.points = Ifit[j];
      t.check_points = Ichk[j];
      if (j == k) {
        for (std::size_t i = 0; i < Ifit[j].size(); ++i) t.values.push_back(Hfit[j][i] - Gfit[j][i]);
        for (std::size_t i = 0; i < Ichk[j].size(); ++i) t.check_values.push_back(Hchk[j][i] - Gchk[j][i]);
      } else {
        t.values.assign(Ifit[j].size(), 0.0);
        t.check_values.assign(Ichk[j].size(), 0.0);
      }
      req.targets.push_back(std::move(t));
    }
    if (opt.guard_disc) {
      const CompactRegion D = disc_region(0.0, out.tasks[k].R);
      RungeTarget t;
      t.label = "guard disc";
      t.points = sample_region(D, so.n_boundary, 0.0);
      t.check_points = sample_region(D, so.n_boundary * so.validation_factor, 0.5);
      t.values.assign(t.points.size(), 0.0);
      t.check_values.assign(t.check_points.size(), 0.0);
      req.targets.push_back(std::move(t));
    }
    RungeResult fit;
    try {
      fit = runge_fit(req);
    } catch (const NotConverged& e) {
      throw NotConverged("build_partial_universal: stage " + std::to_string(k + 1) + " failed: " + e.what(), e.best());
    }
    out.tasks[k].stage_degree = fit.degree;
    out.corrections.push_back(fit.p);
    double drift = 0.0;
    for (std::size_t j = 0; j < T; ++j) {
      const ComplexList qf = eval_many(fit.p, Ifit[j]), qc = eval_many(fit.p, Ichk[j]);
      for (std::size_t i = 0; i < qf.size(); ++i) Gfit[j][i] += qf[i];
      for (std::size_t i = 0; i < qc.size(); ++i) {
        Gchk[j][i] += qc[i];
        if (j < k) drift = std::max(drift, std::abs(qc[i]));
      }
    }
    out.stage_drift.push_back(drift);
  }

  MapExpr g = out.corrections.front();
  for (std::size_t k = 1; k < out.corrections.size(); ++k) g = add(g, out.corrections[k]);
  out.g = g;
  for (std::size_t k = 0; k < T; ++k) out.tasks[k].final_error = sup_error(g, Ichk[k], Hchk[k]);
  return out;
}

std::vector<DensityEntry> orbit_density(const MapExpr& f, const MapExpr& g,
                                        const std::vector<std::pair<CompactRegion, MapExpr>>& targets, int n_max,
                                        int n_boundary) {
  if (n_max < 0) throw InputError("orbit_density: n_max must be >= 0");
  std::vector<DensityEntry> out(targets.size());
  parallel_for(targets.size(), [&](std::size_t t) {
    const ComplexList pts = sample_region(targets[t].first, n_boundary, 0.0);
    ComplexList hv(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) hv[i] = eval(targets[t].second, pts[i]);
    ComplexList z = pts;
    bool dead = false;
    for (int n = 0; n <= n_max; ++n) {
      double err = 0.0;
      if (!dead) {
        try {
          for (std::size_t i = 0; i < z.size(); ++i) {
            const double e = std::abs(eval(g, z[i]) - hv[i]);
            err = std::max(err, std::isnan(e) ? INFINITY : e);
          }
        } catch (const Error&) {
          err = INFINITY;
        }
      } else {
        err = INFINITY;
      }
      if (err < out[t].best_error) out[t] = {n, err};
      if (!dead && n < n_max) {
        try {
          for (auto& x : z) {
            x = eval(f, x);
            if (!finite(x) || std::abs(x) > kOverflowModulus) dead = true;
          }
        } catch (const Error&) {
          dead = true;
        }
      }
    }
  });
  return out;
}

// Composition sequences ---------------------------------------------------------------------

ComplexList composition_sequence_orbit(const std::vector<MapExpr>& maps, CompositionMode mode, Complex z) {
  ComplexList out;
  auto guard = [&](Complex w, std::size_t n) {
    if (!finite(w) || std::abs(w) > kOverflowModulus)
      throw OverflowError("composition sequence escaped at step " + std::to_string(n), static_cast<int>(n), out);
  };
  if (mode == CompositionMode::Left) {
    Complex w = z;
    for (std::size_t n = 0; n < maps.size(); ++n) {
      w = eval(maps[n], w);
      guard(w, n + 1);
      out.push_back(w);
    }
    return out;
  }
  for (std::size_t n = 1; n <= maps.size(); ++n) {
    Complex w = z;
    for (std::size_t i = n; i-- > 0;) w = eval(maps[i], w);
    guard(w, n);
    out.push_back(w);
  }
  return out;
}

CyclicityReport cyclicity_obstruction(const MapExpr& candidate, const Contour& contour, Complex a) {
  validate(contour);
  if (!(std::abs(a - contour.center) < contour.radius)) throw InputError("cyclicity: a must lie strictly inside the contour");
  const int N = contour.node_count;
  CyclicityReport rep;
  rep.nodes = N;
  Complex s(0.0), r(0.0);
  for (int j = 0; j < N; ++j) {
    const Complex u = std::polar(1.0, kTwoPi * j / N);
    const Complex z = contour.center + contour.radius * u;
    const Complex dz = Complex(0.0, 1.0) * contour.radius * u;  // dz/dtheta
    s += eval(candidate, z) * dz;
    r += dz / (z - a);
  }
  const double w = kTwoPi / N * contour.orientation;
  rep.integral = s * w;
  rep.reference = r * w;
  rep.exact_reference = Complex(0.0, kTwoPi * contour.orientation);
  rep.gap = std::abs(rep.integral - rep.exact_reference);
  return rep;
}

FiniteUniversalReport finite_set_universal_check(const MapExpr& f, const MapExpr& omega, const FiniteSet& E,
                                                 const std::vector<ComplexList>& targets, const MapExpr& g, int n_max) {
  if (E.points.empty()) throw InputError("finite set is empty");
  if (n_max < 0) throw InputError("n_max must be >= 0");
  for (const auto& t : targets)
    if (t.size() != E.points.size()) throw InputError("target vector length differs from |E|");
  const std::size_t P = E.points.size();
  // orbits and weights
  std::vector<ComplexList> orbit(P), W(P);
  for (std::size_t i = 0; i < P; ++i) {
    Complex z = E.points[i];
    for (int n = 0; n <= n_max; ++n) {
      orbit[i].push_back(z);
      if (n < n_max) {
        const Complex om = eval(omega, z);
        if (!(std::abs(om) > 1e-12)) throw WeightVanishes(E.points[i], n);
        z = eval(f, z);
        if (!finite(z) || std::abs(z) > kOverflowModulus) break;
      }
    }
    try {
      W[i] = weighted_orbit(f, omega, g, E.points[i], static_cast<int>(orbit[i].size()) - 1).values;
    } catch (const OverflowError& e) {
      W[i] = e.partial();
    }
  }
  for (int n = 0; n <= n_max; ++n)
    for (std::size_t i = 0; i < P; ++i)
      for (std::size_t j = i + 1; j < P; ++j) {
        if (static_cast<std::size_t>(n) >= orbit[i].size() || static_cast<std::size_t>(n) >= orbit[j].size()) continue;
        if (std::abs(orbit[i][static_cast<std::size_t>(n)] - orbit[j][static_cast<std::size_t>(n)]) < 1e-10)
          throw InjectivityViolation("f^" + std::to_string(n) + " identifies " + fmt(E.points[i]) + " and " +
                                     fmt(E.points[j]));
      }
  FiniteUniversalReport rep;
  for (const auto& t : targets) {
    FiniteTargetResult r;
    for (int n = 0; n <= n_max; ++n) {
      double e = 0.0;
      for (std::size_t i = 0; i < P; ++i) {
        if (static_cast<std::size_t>(n) >= W[i].size()) {
          e = INFINITY;
          break;
        }
        const double d = std::abs(W[i][static_cast<std::size_t>(n)] - t[i]);
        e = std::max(e, std::isnan(d) ? INFINITY : d);
      }
      if (e < r.max_error) r = {n, e};
    }
    rep.results.push_back(r);
  }
  double rad = 0.0;
  for (auto e : E.points) rad = std::max(rad, std::abs(e));
  rad += 1.0;
  bool evac = true;
  for (std::size_t i = 0; i < P; ++i)
    for (std::size_t n = static_cast<std::size_t>(n_max) / 2; n < orbit[i].size(); ++n)
      if (std::abs(orbit[i][n]) <= rad) evac = false;
  rep.evacuating = evac;
  std::ostringstream note;
  note << "orbits " << (evac ? "stay" : "do not stay") << " outside the closed disc of radius " << rad
       << " over steps " << n_max / 2 << ".." << n_max;
  rep.evacuation_note = note.str();
  return rep;
}

}  // namespace fatoulab
