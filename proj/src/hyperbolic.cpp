#include "fatoulab/hyperbolic.hpp"

#include <algorithm>
#include <limits>
#include <fstream>
#include <numeric>
#include <sstream>

namespace fatoulab {

double hyp_dist(Complex z, Complex w) {
  if (!(std::abs(z) < 1.0) || !(std::abs(w) < 1.0)) throw DomainError("hyp_dist: points must lie in the open unit disc");
  const double rho = std::abs(z - w) / std::abs(1.0 - std::conj(w) * z);
  return 2.0 * std::atanh(std::min(rho, 1.0));
}

namespace {

/// Same as hyp_dist but tolerant of rounding onto the circle (returns inf).
double trace_dist(Complex z, Complex w) {
  if (z == w) return 0.0;
  const double rho = std::abs(z - w) / std::abs(1.0 - std::conj(w) * z);
  return rho >= 1.0 ? INFINITY : 2.0 * std::atanh(rho);
}

}  // namespace

Complex critical_point(Complex a) {
  const double t = std::abs(a);
  if (!(t > 0.0 && t < 1.0)) throw DomainError("critical_point: need 0 < |a| < 1");
  return critical_point_of(a);
}

Complex param_for_critical(Complex c) {
  const double t = std::abs(c);
  if (!(t > 0.0 && t < 1.0)) throw DomainError("param_for_critical: need 0 < |c| < 1");
  return param_for_critical_of(c);
}

// DiscFactor ---------------------------------------------------------------------

DiscFactor DiscFactor::degree2(Complex a) { return degree2(a, 1.0 - std::abs(a)); }

DiscFactor DiscFactor::degree2(Complex a, double deficit) {
  if (!(std::abs(a) <= 1.0) || !(deficit > 0.0) || deficit > 1.0)
    throw DomainError("Blaschke parameter must satisfy |a| < 1");
  if (std::abs(a) == 1.0 && deficit == 0.0) throw DomainError("Blaschke parameter on the circle");
  DiscFactor f;
  f.kind = Kind::Degree2;
  f.a = a;
  f.deficit = deficit;
  return f;
}

DiscFactor DiscFactor::automorphism(Complex a, double theta) {
  if (!(std::abs(a) < 1.0)) throw DomainError("automorphism parameter must satisfy |a| < 1");
  DiscFactor f;
  f.kind = Kind::Automorphism;
  f.a = a;
  f.deficit = 0.0;
  f.theta = theta;
  return f;
}

Complex DiscFactor::apply(Complex z) const {
  if (kind == Kind::Degree2) return blaschke_apply(a, z);
  return std::polar(1.0, theta) * (z - a) / (1.0 - std::conj(a) * z);
}

MapExpr DiscFactor::map() const {
  if (kind == Kind::Degree2) return mul(var(), mobius(1.0, -a, -std::conj(a), 1.0));
  return disc_automorphism(a, theta);
}

// BlaschkeSequence ------------------------------------------------------------------

BlaschkeSequence BlaschkeSequence::from_params(const ComplexList& as) {
  BlaschkeSequence s;
  s.factors.reserve(as.size());
  for (auto a : as) {
    if (!(std::abs(a) < 1.0)) throw DomainError("sequence parameter outside the open unit disc");
    s.factors.push_back(DiscFactor::degree2(a));
  }
  return s;
}

Complex BlaschkeSequence::critical(std::size_t n) const {
  const DiscFactor& f = factors.at(n - 1);
  if (f.kind != DiscFactor::Kind::Degree2) throw InputError("critical point requested for an automorphism");
  return critical_point(f.a);
}

Complex BlaschkeSequence::partial(std::size_t n, Complex z) const {
  if (n > factors.size()) throw InputError("partial composition beyond sequence length");
  for (std::size_t i = 0; i < n; ++i) z = factors[i].apply(z);
  return z;
}

MapExpr BlaschkeSequence::partial_map(std::size_t n) const {
  if (n > factors.size()) throw InputError("partial composition beyond sequence length");
  MapExpr g = var();
  for (std::size_t i = 0; i < n; ++i) g = i == 0 ? factors[i].map() : compose(factors[i].map(), g);
  return g;
}

BlaschkeSequence read_sequence(const std::string& text) {
  BlaschkeSequence s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto num = [&](const std::string& t) {
      try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
      } catch (const std::exception&) {
        throw ParseError("sequence line " + std::to_string(lineno) + ": bad number '" + t + "'");
      }
    };
    try {
      if (tok[0] == "aut") {
        if (tok.size() < 3 || tok.size() > 4) throw ParseError("sequence line " + std::to_string(lineno) + ": expected 'aut re im [theta]'");
        s.factors.push_back(DiscFactor::automorphism({num(tok[1]), num(tok[2])}, tok.size() == 4 ? num(tok[3]) : 0.0));
        continue;
      }
      if (tok.size() < 2 || tok.size() > 3) throw ParseError("sequence line " + std::to_string(lineno) + ": expected 're im [deficit]'");
      const Complex a(num(tok[0]), num(tok[1]));
      s.factors.push_back(tok.size() == 3 ? DiscFactor::degree2(a, num(tok[2])) : DiscFactor::degree2(a));
    } catch (const ParseError&) {
      throw;
    } catch (const DomainError& e) {
      throw ParseError("sequence line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (s.factors.empty()) throw ParseError("sequence file holds no parameters");
  return s;
}

BlaschkeSequence read_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sequence file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return read_sequence(ss.str());
}

std::string write_sequence(const BlaschkeSequence& s) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& f : s.factors) {
    if (f.kind == DiscFactor::Kind::Automorphism)
      out << "aut " << f.a.real() << ' ' << f.a.imag() << ' ' << f.theta << '\n';
    else
      out << f.a.real() << ' ' << f.a.imag() << ' ' << f.deficit << '\n';
  }
  return out.str();
}

BlaschkeSequence harmonic_sequence(int n) {
  BlaschkeSequence s;
  for (int k = 1; k <= n; ++k) {
    const double d = 1.0 / (k + 1);
    s.factors.push_back(DiscFactor::degree2(1.0 - d, d));
  }
  return s;
}

BlaschkeSequence geometric_sequence(int n) {
  BlaschkeSequence s;
  for (int k = 1; k <= n; ++k) {
    // below 2^-1074 the deficit is pinned to the smallest subnormal
    const double d = std::max(std::ldexp(1.0, -k), std::numeric_limits<double>::denorm_min());
    s.factors.push_back(DiscFactor::degree2(1.0 - d, d));
  }
  return s;
}

BlaschkeSequence automorphism_sequence(int n) {
  BlaschkeSequence s;
  for (int k = 1; k <= n; ++k) {
    const int j = (k + 1) / 2;
    const Complex a = std::polar(0.5, 1.0 * j);
    const double t = 0.7 * j;
    s.factors.push_back(k % 2 ? DiscFactor::automorphism(a, t) : DiscFactor::automorphism(-a * std::polar(1.0, t), -t));
  }
  return s;
}

// Classification -------------------------------------------------------------------

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Contracting: return "Contracting";
    case Verdict::SemiContracting: return "SemiContracting";
    case Verdict::EventuallyIsometric: return "EventuallyIsometric";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

ClassificationReport classify_sequence(const BlaschkeSequence& seq, const std::vector<std::pair<Complex, Complex>>& pairs,
                                       int horizon, const ClassifyOptions& opt) {
  if (horizon < 100) throw InputError("classify_sequence: horizon must be >= 100");
  if (seq.size() < static_cast<std::size_t>(horizon))
    throw InputError("classify_sequence: sequence has " + std::to_string(seq.size()) + " factors, horizon needs " +
                     std::to_string(horizon));
  if (pairs.empty()) throw InputError("classify_sequence: no sample pairs");
  for (const auto& [z, w] : pairs) {
    if (!(std::abs(z) < 1.0) || !(std::abs(w) < 1.0)) throw DomainError("classify_sequence: pair outside the unit disc");
    if (z == w) throw InputError("classify_sequence: pair entries must be distinct");
  }

  ClassificationReport rep;
  rep.horizon = horizon;
  rep.pairs = pairs;
  const auto H = static_cast<std::size_t>(horizon);

  double s_half = 0.0, s = 0.0;
  for (std::size_t n = 1; n <= H; ++n) {
    s += seq.factors[n - 1].deficit;
    if (n == H / 2) s_half = s;
  }
  rep.tail_sum = s;
  rep.tail_increment = s - s_half;

  rep.traces.assign(pairs.size(), std::vector<double>(H + 1));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    Complex z = pairs[p].first, w = pairs[p].second;
    rep.traces[p][0] = trace_dist(z, w);
    rep.collided_at.push_back(-1);
    for (std::size_t n = 1; n <= H; ++n) {
      z = seq.factors[n - 1].apply(z);
      w = seq.factors[n - 1].apply(w);
      rep.traces[p][n] = trace_dist(z, w);
      if (z == w && rep.collided_at[p] < 0) rep.collided_at[p] = static_cast<int>(n);
    }
  }

  // Smallest N with every trace constant (to iso_tol) on [N, H].
  std::size_t n_iso = H + 1;
  {
    std::vector<double> hi(pairs.size(), -INFINITY), lo(pairs.size(), INFINITY);
    for (std::size_t n = H + 1; n-- > 0;) {
      bool ok = true;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        hi[p] = std::max(hi[p], rep.traces[p][n]);
        lo[p] = std::min(lo[p], rep.traces[p][n]);
        if (!(hi[p] - lo[p] <= opt.iso_tol)) ok = false;
      }
      if (!ok) break;
      n_iso = n;
    }
  }
  rep.constant_from = n_iso <= H ? static_cast<int>(n_iso) : -1;

  const std::size_t beyond = n_iso <= H ? n_iso : H / 2;
  for (std::size_t n = beyond + 1; n <= H; ++n)
    if (seq.factors[n - 1].kind == DiscFactor::Kind::Degree2) rep.proper_factor_beyond = true;

  // pairs glued together by a non-injective factor carry no information
  bool all_small = true, all_positive = true, stabilized = true;
  std::size_t live = 0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (rep.collided_at[p] >= 0) continue;
    ++live;
    const auto& tr = rep.traces[p];
    const double fin = tr[H];
    if (!(fin < opt.contracting_threshold)) all_small = false;
    if (!(fin >= opt.contracting_threshold)) all_positive = false;
    const auto [mn, mx] = std::minmax_element(tr.begin() + static_cast<std::ptrdiff_t>(H / 2), tr.end());
    if (!(*mx - *mn <= opt.cauchy_tol * std::max(1.0, fin))) stabilized = false;
  }

  const bool diverges = rep.tail_sum >= opt.divergence_threshold || rep.tail_increment >= opt.divergence_increment;
  const bool cauchy = rep.tail_increment <= opt.cauchy_tol;
  std::ostringstream why;
  why.precision(6);
  why << "tail_sum=" << rep.tail_sum << " last_half_increment=" << rep.tail_increment;

  if (live == 0) {
    rep.verdict = Verdict::Inconclusive;
    why << "; every sample pair collides under the sequence";
  } else if (diverges && all_small) {
    rep.verdict = Verdict::Contracting;
    why << "; partial sums diverge and all traces fall below " << opt.contracting_threshold;
  } else if (rep.constant_from >= 0 && n_iso <= H / 2 && !rep.proper_factor_beyond && all_positive) {
    rep.verdict = Verdict::EventuallyIsometric;
    why << "; traces constant to " << opt.iso_tol << " from N=" << n_iso << ", automorphisms only beyond N";
  } else if (cauchy && all_positive && stabilized && rep.proper_factor_beyond) {
    rep.verdict = Verdict::SemiContracting;
    why << "; partial sums Cauchy, traces stabilise at positive limits, proper factors beyond N keep contracting";
  } else {
    rep.verdict = Verdict::Inconclusive;
    why << "; no verdict condition met (diverges=" << diverges << " cauchy=" << cauchy << " all_small=" << all_small
        << " all_positive=" << all_positive << " stabilized=" << stabilized << ")";
  }
  rep.reason = why.str();
  return rep;
}

// Exhaustion ---------------------------------------------------------------------------

std::vector<int> revisit_schedule(int count) {
  std::vector<int> out;
  for (int j = 1; static_cast<int>(out.size()) < count; ++j) {
    for (int i = 1; i <= j - 2 && static_cast<int>(out.size()) < count; ++i) out.push_back(i);
    if (static_cast<int>(out.size()) < count) out.push_back(j);
  }
  return out;
}

std::vector<ExhaustionDisc> distinct_discs(int count) {
  std::vector<ExhaustionDisc> out;
  for (int h = 1; static_cast<int>(out.size()) < count; ++h) {
    for (int m = 1; m <= h; ++m)
      for (int q = 1; q <= h; ++q)
        for (int a = -h; a <= h; ++a)
          for (int b = -h; b <= h; ++b) {
            if (std::max({m, q, std::abs(a), std::abs(b)}) != h) continue;
            if (std::gcd(std::gcd(std::abs(a), std::abs(b)), q) != 1) continue;
            const Complex k(static_cast<double>(a) / q, static_cast<double>(b) / q);
            const double r = 1.0 / m;
            if (!(std::abs(k) + r < 1.0)) continue;
            out.push_back({k, r, static_cast<int>(out.size()) + 1});
            if (static_cast<int>(out.size()) >= count) return out;
          }
  }
  return out;
}

std::vector<ExhaustionDisc> disc_exhaustion(int count) {
  if (count < 1) throw InputError("disc_exhaustion: count must be >= 1");
  const std::vector<int> sigma = revisit_schedule(count);
  const int need = *std::max_element(sigma.begin(), sigma.end());
  const std::vector<ExhaustionDisc> discs = distinct_discs(need);
  std::vector<ExhaustionDisc> out;
  out.reserve(sigma.size());
  for (int i : sigma) out.push_back(discs[static_cast<std::size_t>(i - 1)]);
  return out;
}

ExtComplex partial_ext(const std::vector<ExtComplex>& params, std::size_t n, const ExtComplex& z0) {
  ExtComplex z = z0;
  for (std::size_t i = 0; i < n; ++i) z = blaschke_apply(params[i], z);
  return z;
}

NoninjectiveSequence build_noninjective_sequence(const std::vector<ExhaustionDisc>& exhaustion, int length) {
  if (length < 2) throw InputError("build_noninjective_sequence: length must be >= 2");
  NoninjectiveSequence out;
  out.params.push_back(ExtComplex(0.5));
  std::size_t pos = 0;
  for (int n = 1; n < length; ++n) {
    for (;;) {
      if (pos >= exhaustion.size())
        throw DegenerateError("exhaustion list exhausted after " + std::to_string(n) + " steps; supply more discs");
      const Complex k = exhaustion[pos].center;
      const ExtComplex w = partial_ext(out.params, static_cast<std::size_t>(n), ExtComplex(k));
      if (w.is_zero()) {
        std::ostringstream msg;
        msg << "step " << n << ": B_n(k) = 0 for k = " << k.real() << "+" << k.imag() << "i (exhaustion entry "
            << pos + 1 << "), skipped";
        out.skips.push_back(msg.str());
        ++pos;
        continue;
      }
      if (!(w.log2_abs() < 0.0)) throw DegenerateError("B_n(k) left the unit disc");
      out.targets.push_back(w);
      out.centers.push_back(k);
      out.exhaustion_position.push_back(static_cast<int>(pos) + 1);
      out.params.push_back(param_for_critical_of(w));
      ++pos;
      break;
    }
  }
  for (const auto& a : out.params) {
    const Complex ad = a.to_complex();
    // deficit 1 - |a|, computed from the extended value where |a| is tiny
    const double t = abs_double(a);
    out.sequence.factors.push_back(DiscFactor::degree2(ad, 1.0 - t));
  }
  return out;
}

// Wandering model -------------------------------------------------------------------------

void WanderingModel::validate() const {
  for (std::size_t i = 0; i < translations.size(); ++i)
    for (std::size_t j = i + 1; j < translations.size(); ++j)
      if (!(std::abs(translations[i] - translations[j]) > 2.0))
        throw InputError("wandering model: translated discs " + std::to_string(i) + " and " + std::to_string(j) +
                         " are not disjoint");
}

WanderingModel make_model(const BlaschkeSequence& seq, const std::vector<Complex>& translations) {
  WanderingModel m;
  for (const auto& f : seq.factors) m.maps.push_back(f.map());
  m.translations = translations;
  m.validate();
  return m;
}

WanderingModel make_model(const MapExpr& b, const std::vector<Complex>& translations) {
  WanderingModel m;
  m.maps.assign(translations.empty() ? 0 : translations.size() - 1, b);
  m.translations = translations;
  m.validate();
  return m;
}

ComplexList model_orbit(const WanderingModel& model, Complex z0, int n) {
  if (n < 0) throw InputError("model_orbit: negative step count");
  if (model.translations.empty() || !(std::abs(z0 - model.translations[0]) < 1.0))
    throw DomainError("model_orbit: start point outside U_0");
  if (model.translations.size() < static_cast<std::size_t>(n) + 1 || model.maps.size() < static_cast<std::size_t>(n))
    throw InputError("model_orbit: model too short for " + std::to_string(n) + " steps");
  ComplexList orbit{z0};
  Complex z = z0;
  for (int k = 0; k < n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    z = model.translations[uk + 1] + eval(model.maps[uk], z - model.translations[uk]);
    orbit.push_back(z);
  }
  return orbit;
}

}  // namespace fatoulab
