#include "fatoulab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fatoulab/dynamics.hpp"
#include "fatoulab/hyperbolic.hpp"
#include "fatoulab/map_io.hpp"
#include "fatoulab/range_analysis.hpp"
#include "fatoulab/universality.hpp"

namespace fatoulab::cli {

namespace {

struct OptSpec {
  std::string name;
  std::string help;
  std::string def;  // empty: required unless optional
  bool optional = false;
  bool multi = false;
  bool flag = false;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<OptSpec> opts;
};

OptSpec req(std::string n, std::string h) { return {std::move(n), std::move(h), "", false, false, false}; }
OptSpec def(std::string n, std::string d, std::string h) { return {std::move(n), std::move(h), std::move(d), false, false, false}; }
OptSpec opt(std::string n, std::string h) { return {std::move(n), std::move(h), "", true, false, false}; }
OptSpec multi(std::string n, std::string h) { return {std::move(n), std::move(h), "", true, true, false}; }
OptSpec flag(std::string n, std::string h) { return {std::move(n), std::move(h), "", true, false, true}; }

const std::string kMesh = "0.01";

const std::vector<Command>& table() {
  static const std::vector<Command> t = {
      {"classify", "classify a Blaschke composition sequence",
       {opt("params", "sequence file (re im [deficit] per line; 'aut re im [theta]')"),
        opt("preset", "harmonic | geometric | automorphisms"), def("horizon", "5000", "horizon H"),
        opt("pairs", "sample pairs z:w;z:w (complex literals)")}},
      {"noninjective-seq", "build the non-injective Blaschke sequence",
       {def("length", "50", "sequence length"), def("discs", "0", "exhaustion entries (0 = 8 x length)")}},
      {"runaway", "smallest N with f^N(K) off K",
       {req("f", "map spec"), req("K", "region spec"), def("n-max", "100", "search bound"),
        def("mesh", kMesh, "cover mesh")}},
      {"separation", "smallest m with f^m(L) off K",
       {req("f", "map spec"), req("K", "region spec"), req("L", "region spec"), def("m-max", "100", "search bound"),
        def("mesh", kMesh, "cover mesh")}},
      {"universal-step", "one Runge transition for C_f",
       {req("f", "map spec"), req("K", "region"), req("g", "map on K"), req("L", "region"), req("h", "map on L"),
        def("eps", "0.01", "tolerance"), def("m-max", "100", "separation bound"), def("mesh", kMesh, "cover mesh"),
        def("n-boundary", "128", "boundary samples"), def("degree-cap", "128", "degree cap"),
        def("degree-step", "8", "degree increment")}},
      {"weighted-step", "one Runge transition for W_{omega,f}",
       {req("f", "map spec"), req("omega", "weight map"), req("K", "region"), req("g", "map on K"), req("L", "region"),
        req("h", "map on L"), def("eps", "0.01", "tolerance"), def("m-max", "100", "separation bound"),
        def("mesh", kMesh, "cover mesh"), def("n-boundary", "128", "boundary samples"),
        def("degree-cap", "128", "degree cap"), def("degree-step", "8", "degree increment")}},
      {"build-universal", "diagonal builder over a task list",
       {req("f", "map spec"), multi("task", "REGION::MAP (repeatable)"),
        opt("targets", "values c_k: tasks h_k = z - center(L) + c_k on --L"), def("L", "disc:0,0,0.5", "region for --targets"),
        def("eps", "0.01", "total tolerance"), def("n-max", "100", "largest n"), def("R0", "2", "base guard radius"),
        opt("radii", "guard radii R_1,R_2,..."), flag("guard-disc", "also pin corrections to 0 on D(0,R_k)"),
        def("mesh", kMesh, "cover mesh"), def("n-boundary", "128", "boundary samples"),
        def("degree-cap", "128", "degree cap")}},
      {"orbit-density", "best n with g o f^n close to each target",
       {req("f", "map spec"), req("g", "candidate (map spec or @report.json)"), multi("target", "REGION::MAP (repeatable)"),
        def("n-max", "100", "largest n"), def("n-boundary", "64", "samples per target")}},
      {"weighted-orbit", "W^n(z) = prod omega(f^j z) g(f^n z)",
       {req("f", "map spec"), req("omega", "weight map"), req("g", "map spec"), req("z", "start point"),
        def("n", "10", "number of steps")}},
      {"compose-seq", "left or right composition orbit",
       {multi("map", "map spec (repeatable, in order)"), opt("params", "Blaschke sequence file"),
        def("mode", "left", "left | right"), req("z", "start point")}},
      {"cyclicity", "contour integral of a candidate against 2 pi i",
       {req("candidate", "map spec"), def("center", "0", "contour centre"), def("radius", "1", "contour radius"),
        def("nodes", "512", "trapezoid nodes (power of two)"), def("orientation", "1", "+1 or -1"),
        def("a", "0", "interior point")}},
      {"count-zeros", "argument-principle zero count",
       {req("expr", "map spec"), req("disc", "disc:cx,cy,r"), def("nodes", "1024", "initial nodes")}},
      {"full-range", "full-range probe at a fixed point or infinity",
       {req("f", "map spec"), req("g", "candidate (map spec or @report.json)"), def("z0", "inf", "complex or inf"),
        req("r", "radius (or M when z0 = inf)"), req("U", "base region (disc or polygon)"),
        req("targets", "values c"), req("schedule", "n list 'a,b,c' or range 'a..b'")}},
      {"ess-sing", "essential-singularity coverage probe",
       {req("g", "map spec"), def("z0", "0", "complex or inf"), req("radii", "r_1,r_2,..."),
        def("grid", "-2,2,-2,2,9", "x0,x1,y0,y1,n value grid"), def("samples", "20000", "samples per annulus"),
        def("tol", "0.1", "approach tolerance")}},
      {"dw", "Denjoy-Wolff point of a disc self-map",
       {req("f", "map spec"), def("max-iter", "10000", "iteration budget"), def("tol", "1e-10", "step tolerance")}},
      {"fixed-points", "fixed points and their classes",
       {req("f", "map spec"), def("region", "disc:0,0,2", "search region"), def("grid-step", "0.1", "seed spacing")}},
      {"koenigs", "Koenigs coordinate and its defect",
       {req("f", "map spec"), def("z0", "0", "attracting fixed point"), def("N", "40", "iterations"),
        def("radius", "0.1", "defect disc radius"), def("samples", "256", "defect samples")}},
      {"boettcher", "Boettcher coordinate and its defect",
       {req("f", "map spec"), def("z0", "0", "superattracting fixed point"), def("N", "20", "iterations"),
        def("radius", "0.05", "defect disc radius"), def("samples", "256", "defect samples")}},
      {"render", "escape-time image (PGM)",
       {req("f", "map spec"), def("window", "-2,-2,2,2", "x0,y0,x1,y1"), def("res", "256", "W or WxH"),
        def("max-iter", "100", "iteration cap"), def("escape", "10", "escape radius")}},
      {"sector-probe", "sector base region, optionally with a full-range probe",
       {req("vertex", "sector vertex"), def("axis", "0", "axis angle"), req("opening", "opening angle"),
        req("radius", "sector radius"), opt("f", "map spec"), opt("g", "candidate"), def("z0", "0", "complex or inf"),
        def("r", "1", "radius (or M)"), opt("targets", "values c"), opt("schedule", "n list or range")}},
      {"finite-universal", "finite-set universality check for W_{omega,f}",
       {req("f", "map spec"), def("omega", "const:1", "weight map"), req("g", "candidate"),
        req("E", "points x,y;x,y"), multi("target", "values v_1,v_2,... (one per point; repeatable)"),
        def("n-max", "50", "largest n")}},
  };
  return t;
}

// ------------------------------------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

Json cj(Complex z) { return complex_to_json(z); }

Json cj(const ComplexList& zs) {
  Json a = Json::array();
  for (auto z : zs) a.push_back(cj(z));
  return a;
}

Json ext_json(const ExtComplex& e) {
  return Json{{"mantissa", cj(e.mantissa())}, {"exp2", e.exponent()}, {"log10_abs", e.log10_abs()}};
}

class Args {
 public:
  std::map<std::string, std::vector<std::string>> v;
  std::map<std::string, OptSpec> spec;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  Json outputs = Json::array();

  bool has(const std::string& n) const {
    auto it = v.find(n);
    return it != v.end() && !it->second.empty();
  }
  std::string str(const std::string& n) const {
    if (has(n)) return v.at(n).back();
    const OptSpec& s = spec.at(n);
    if (!s.def.empty()) return s.def;
    throw InputError("missing --" + n);
  }
  std::vector<std::string> all(const std::string& n) const { return has(n) ? v.at(n) : std::vector<std::string>{}; }
  bool flag(const std::string& n) const {
    if (!has(n)) return false;
    const std::string s = v.at(n).back();
    return s.empty() || s == "true" || s == "1";
  }
  double num(const std::string& n) const { return to_num(str(n), n); }
  int integer(const std::string& n) const {
    const std::string s = str(n);
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(s, &pos);
      if (pos != s.size() || x < INT32_MIN || x > INT32_MAX) throw std::invalid_argument(s);
      return static_cast<int>(x);
    } catch (const std::logic_error&) {
      throw InputError("--" + n + ": expected an integer, got '" + s + "'");
    }
  }
  Complex cplx(const std::string& n) const { return to_complex(str(n), n); }
  FinitePoint point(const std::string& n) const {
    const std::string s = str(n);
    if (s == "inf" || s == "infinity") return std::nullopt;
    return to_complex(s, n);
  }
  ComplexList clist(const std::string& n, char sep = ',') const {
    ComplexList out;
    for (const auto& p : split(str(n), sep))
      if (!trim(p).empty()) out.push_back(to_complex(trim(p), n));
    return out;
  }
  std::vector<double> dlist(const std::string& n) const {
    std::vector<double> out;
    for (const auto& p : split(str(n), ',')) out.push_back(to_num(trim(p), n));
    return out;
  }
  std::vector<int> schedule(const std::string& n) const {
    const std::string s = str(n);
    std::vector<int> out;
    const auto dots = s.find("..");
    try {
      if (dots != std::string::npos) {
        const int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
        for (int k = a; k <= b; ++k) out.push_back(k);
      } else {
        for (const auto& p : split(s, ',')) out.push_back(std::stoi(trim(p)));
      }
    } catch (const std::logic_error&) {
      throw InputError("--" + n + ": expected 'a,b,c' or 'a..b', got '" + s + "'");
    }
    return out;
  }
  MapExpr map(const std::string& n) const { return map_text(str(n), n); }
  CompactRegion region(const std::string& n) const { return region_text(str(n), n); }

  static MapExpr map_text(const std::string& s, const std::string& n) {
    try {
      if (!s.empty() && s[0] == '@') {
        std::ifstream in(s.substr(1));
        if (!in) throw ParseError("cannot open '" + s.substr(1) + "'");
        Json j;
        try {
          j = Json::parse(in);
        } catch (const Json::parse_error& e) {
          throw ParseError(std::string("JSON: ") + e.what());
        }
        if (j.is_object() && !j.contains("op") && j.contains("g")) return map_from_json(j["g"], "/g");
        return map_from_json(j);
      }
      return parse_map_spec(s);
    } catch (const Error& e) {
      throw ParseError("--" + n + ": " + e.what());
    }
  }
  static CompactRegion region_text(const std::string& s, const std::string& n) {
    try {
      return parse_region_spec(s);
    } catch (const Error& e) {
      throw ParseError("--" + n + ": " + e.what());
    }
  }
  static double to_num(const std::string& s, const std::string& n) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return x;
    } catch (const std::logic_error&) {
      throw InputError("--" + n + ": expected a number, got '" + s + "'");
    }
  }
  static Complex to_complex(const std::string& s, const std::string& n) {
    try {
      return parse_complex_literal(s);
    } catch (const Error& e) {
      throw ParseError("--" + n + ": " + e.what());
    }
  }

  void write(const std::string& file, const std::string& content) {
    std::filesystem::create_directories(out_dir);
    const auto p = out_dir / file;
    std::ofstream o(p, std::ios::binary);
    if (!o) throw InputError("cannot write '" + p.string() + "'");
    o << content;
    outputs.push_back(p.string());
  }
  void write_json(const std::string& file, Json j) {
    j["seed"] = seed;
    write(file, j.dump(2) + "\n");
  }
};

std::string csv_num(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

Json witness_json(const SeparationWitness& w) {
  return {{"m", w.m}, {"margin", w.margin}, {"mesh", w.mesh}, {"method", w.method}};
}

Json runge_json(const RungeResult& r) {
  Json h = Json::array();
  for (auto [d, e] : r.history) h.push_back({d, e});
  return {{"degree", r.degree},       {"converged", r.converged},
          {"fit_error", r.fit_error}, {"validation_error", r.validation_error},
          {"history", h},             {"p", map_to_json(r.p)}};
}

std::pair<CompactRegion, MapExpr> region_map_pair(const std::string& s, const std::string& n) {
  const auto k = s.find("::");
  if (k == std::string::npos) throw InputError("--" + n + ": expected REGION::MAP, got '" + s + "'");
  return {Args::region_text(s.substr(0, k), n), Args::map_text(s.substr(k + 2), n)};
}

// Commands ---------------------------------------------------------------------------

Json cmd_classify(Args& a) {
  const int H = a.integer("horizon");
  BlaschkeSequence seq;
  if (a.has("params")) {
    seq = read_sequence_file(a.str("params"));
  } else {
    const std::string p = a.has("preset") ? a.str("preset") : throw InputError("classify needs --params or --preset");
    if (p == "harmonic") {
      seq = harmonic_sequence(H);
    } else if (p == "geometric") {
      seq = geometric_sequence(H);
    } else if (p == "automorphisms") {
      seq = automorphism_sequence(H);
    } else {
      throw InputError("--preset: unknown preset '" + p + "'");
    }
  }
  std::vector<std::pair<Complex, Complex>> pairs = {
      {Complex(0.1, 0.0), Complex(0.0, -0.3)}, {Complex(0.2, 0.2), Complex(-0.4, 0.1)}, {Complex(0.0), Complex(0.5)}};
  if (a.has("pairs")) {
    pairs.clear();
    for (const auto& p : split(a.str("pairs"), ';')) {
      const auto zw = split(p, ':');
      if (zw.size() != 2) throw InputError("--pairs: expected z:w, got '" + p + "'");
      pairs.push_back({Args::to_complex(trim(zw[0]), "pairs"), Args::to_complex(trim(zw[1]), "pairs")});
    }
  }
  const ClassificationReport r = classify_sequence(seq, pairs, H);
  Json pj = Json::array(), fin = Json::array();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    pj.push_back({cj(pairs[p].first), cj(pairs[p].second)});
    fin.push_back(r.traces[p].back());
  }
  a.write_json("classify.json", {{"verdict", verdict_name(r.verdict)},
                                 {"reason", r.reason},
                                 {"tail_sum", r.tail_sum},
                                 {"tail_increment", r.tail_increment},
                                 {"horizon", r.horizon},
                                 {"constant_from", r.constant_from},
                                 {"proper_factor_beyond", r.proper_factor_beyond},
                                 {"pairs", pj},
                                 {"collided_at", r.collided_at},
                                 {"final_traces", fin}});
  std::ostringstream csv;
  csv << "n";
  for (std::size_t p = 0; p < pairs.size(); ++p) csv << ",d" << p;
  csv << "\n";
  for (std::size_t n = 0; n < r.traces[0].size(); ++n) {
    csv << n;
    for (const auto& t : r.traces) csv << "," << csv_num(t[n]);
    csv << "\n";
  }
  a.write("traces.csv", csv.str());
  return {{"verdict", verdict_name(r.verdict)}, {"tail_sum", r.tail_sum}};
}

Json cmd_noninjective(Args& a) {
  const int len = a.integer("length");
  int discs = a.integer("discs");
  if (discs <= 0) discs = 8 * len;
  const NoninjectiveSequence s = build_noninjective_sequence(disc_exhaustion(discs), len);
  double worst_log10 = -INFINITY, worst_rel = 0.0;
  Json steps = Json::array();
  for (std::size_t n = 1; n < s.params.size(); ++n) {
    const ExtComplex slope = blaschke_slope(s.params[n], s.targets[n - 1]);
    const double rel = std::exp2(slope.log2_abs() - s.params[n].log2_abs());
    worst_log10 = std::max(worst_log10, slope.log10_abs());
    worst_rel = std::max(worst_rel, rel);
    steps.push_back({{"n", n},
                     {"center", cj(s.centers[n - 1])},
                     {"exhaustion_position", s.exhaustion_position[n - 1]},
                     {"target", ext_json(s.targets[n - 1])},
                     {"a_next", ext_json(s.params[n])},
                     {"slope_log10", slope.log10_abs()},
                     {"slope_relative", rel}});
  }
  Json params = Json::array();
  for (const auto& p : s.params) params.push_back(ext_json(p));
  a.write_json("noninjective.json", {{"length", len}, {"params", params}, {"steps", steps}, {"skips", s.skips}});
  a.write("noninjective.txt", write_sequence(s.sequence));
  return {{"length", len}, {"max_slope_log10", worst_log10}, {"max_slope_relative", worst_rel}};
}

Json cmd_runaway(Args& a) {
  const MapExpr f = a.map("f");
  const CompactRegion K = a.region("K");
  const SeparationWitness w = find_runaway_N(f, K, a.integer("n-max"), a.num("mesh"));
  const bool re = reverify(w, f, K, K);
  Json j = witness_json(w);
  j["reverified"] = re;
  a.write_json("runaway.json", j);
  return {{"N", w.m}, {"margin", w.margin}, {"reverified", re}};
}

Json cmd_separation(Args& a) {
  const MapExpr f = a.map("f");
  const CompactRegion K = a.region("K"), L = a.region("L");
  const SeparationWitness w = find_separation_m(f, K, L, a.integer("m-max"), a.num("mesh"));
  const bool re = reverify(w, f, K, L);
  Json j = witness_json(w);
  j["reverified"] = re;
  a.write_json("separation.json", j);
  return {{"m", w.m}, {"margin", w.margin}, {"reverified", re}};
}

StepOptions step_options(const Args& a) {
  StepOptions o;
  o.mesh = a.num("mesh");
  o.n_boundary = a.integer("n-boundary");
  o.degree_cap = a.integer("degree-cap");
  if (a.spec.count("degree-step")) o.degree_step = a.integer("degree-step");
  o.seed = a.seed;
  return o;
}

Json cmd_step(Args& a, bool weighted) {
  const MapExpr f = a.map("f"), g = a.map("g"), h = a.map("h");
  const CompactRegion K = a.region("K"), L = a.region("L");
  const double eps = a.num("eps");
  const std::string file = weighted ? "weighted_step.json" : "universal_step.json";
  StepResult r;
  try {
    r = weighted ? weighted_universal_step(f, a.map("omega"), K, g, L, h, eps, a.integer("m-max"), step_options(a))
                 : universal_step(f, K, g, L, h, eps, a.integer("m-max"), step_options(a));
  } catch (const NotConverged& e) {
    a.write_json(file, {{"status", "NotConverged"}, {"best", runge_json(e.best())}});
    throw;
  }
  a.write_json(file, {{"witness", witness_json(r.witness)},
                      {"fit", runge_json(r.fit)},
                      {"error_K", r.error_K},
                      {"error_L", r.error_L},
                      {"eps", eps}});
  return {{"m", r.witness.m}, {"degree", r.fit.degree}, {"error_K", r.error_K}, {"error_L", r.error_L}};
}

Json cmd_build(Args& a) {
  const MapExpr f = a.map("f");
  std::vector<UniversalTask> tasks;
  for (const auto& t : a.all("task")) {
    auto [L, h] = region_map_pair(t, "task");
    tasks.push_back({L, h});
  }
  if (a.has("targets")) {
    const CompactRegion L = a.region("L");
    if (L.components.size() != 1 || !std::holds_alternative<ClosedDisc>(L.components[0]))
      throw InputError("--L: --targets needs a single disc");
    const Complex w0 = std::get<ClosedDisc>(L.components[0]).center;
    for (Complex c : a.clist("targets")) tasks.push_back({L, add(var(), constant(c - w0))});
  }
  if (tasks.empty()) throw InputError("build-universal needs --task or --targets");
  BuildOptions o;
  o.R0 = a.num("R0");
  if (a.has("radii")) o.radii = a.dlist("radii");
  o.guard_disc = a.flag("guard-disc");
  o.step = step_options(a);
  const PartialUniversal pu = build_partial_universal(f, tasks, a.num("eps"), a.integer("n-max"), o);
  Json tj = Json::array(), ns = Json::array(), errs = Json::array();
  for (const auto& t : pu.tasks) {
    tj.push_back({{"L", region_to_json(t.L)},
                  {"h", map_to_json(t.h)},
                  {"eps", t.eps},
                  {"n", t.n},
                  {"R", t.R},
                  {"final_error", t.final_error},
                  {"stage_degree", t.stage_degree}});
    ns.push_back(t.n);
    errs.push_back(t.final_error);
  }
  a.write_json("universal.json",
               {{"g", map_to_json(pu.g)}, {"tasks", tj}, {"stage_drift", pu.stage_drift}, {"notes", pu.notes}});
  return {{"n", ns}, {"final_error", errs}};
}

Json cmd_density(Args& a) {
  const MapExpr f = a.map("f"), g = a.map("g");
  std::vector<std::pair<CompactRegion, MapExpr>> targets;
  for (const auto& t : a.all("target")) targets.push_back(region_map_pair(t, "target"));
  if (targets.empty()) throw InputError("orbit-density needs at least one --target");
  const auto d = orbit_density(f, g, targets, a.integer("n-max"), a.integer("n-boundary"));
  Json rows = Json::array(), ns = Json::array();
  for (const auto& e : d) {
    rows.push_back({{"best_n", e.best_n}, {"best_error", e.best_error}});
    ns.push_back(e.best_n);
  }
  a.write_json("orbit_density.json", {{"targets", rows}});
  return {{"best_n", ns}};
}

Json cmd_weighted_orbit(Args& a) {
  const WeightedOrbitRecord r =
      weighted_orbit(a.map("f"), a.map("omega"), a.map("g"), a.cplx("z"), a.integer("n"));
  std::ostringstream csv;
  csv << "n,re,im,log10_mag,phase\n";
  for (std::size_t n = 0; n < r.values.size(); ++n)
    csv << n << "," << csv_num(r.values[n].real()) << "," << csv_num(r.values[n].imag()) << ","
        << csv_num(r.log10_mag[n]) << "," << csv_num(r.phase[n]) << "\n";
  a.write("weighted_orbit.csv", csv.str());
  a.write_json("weighted_orbit.json", {{"z", cj(r.z)}, {"values", cj(r.values)}});
  return {{"steps", static_cast<int>(r.values.size()) - 1}, {"last", cj(r.values.back())}};
}

Json cmd_compose(Args& a) {
  std::vector<MapExpr> maps;
  for (const auto& m : a.all("map")) maps.push_back(Args::map_text(m, "map"));
  if (a.has("params")) {
    const BlaschkeSequence s = read_sequence_file(a.str("params"));
    for (std::size_t n = 1; n <= s.size(); ++n) maps.push_back(s.factor_map(n));
  }
  if (maps.empty()) throw InputError("compose-seq needs --map or --params");
  const std::string mode = a.str("mode");
  if (mode != "left" && mode != "right") throw InputError("--mode: expected left or right");
  const ComplexList orbit =
      composition_sequence_orbit(maps, mode == "left" ? CompositionMode::Left : CompositionMode::Right, a.cplx("z"));
  std::ostringstream csv;
  csv << "n,re,im\n";
  for (std::size_t n = 0; n < orbit.size(); ++n)
    csv << n + 1 << "," << csv_num(orbit[n].real()) << "," << csv_num(orbit[n].imag()) << "\n";
  a.write("compose_seq.csv", csv.str());
  return {{"steps", orbit.size()}, {"last", cj(orbit.back())}};
}

Json cmd_cyclicity(Args& a) {
  Contour c{a.cplx("center"), a.num("radius"), a.integer("orientation"), a.integer("nodes")};
  if (c.orientation != 1 && c.orientation != -1) throw InputError("--orientation: expected 1 or -1");
  const CyclicityReport r = cyclicity_obstruction(a.map("candidate"), c, a.cplx("a"));
  const Json j{{"integral", cj(r.integral)},
               {"reference", cj(r.reference)},
               {"exact_reference", cj(r.exact_reference)},
               {"gap", r.gap},
               {"nodes", r.nodes}};
  a.write_json("cyclicity.json", j);
  return {{"gap", r.gap}, {"integral_abs", std::abs(r.integral)}};
}

ClosedDisc single_disc(const CompactRegion& r, const std::string& n) {
  if (r.components.size() != 1 || !std::holds_alternative<ClosedDisc>(r.components[0]))
    throw InputError("--" + n + ": expected a single disc");
  return std::get<ClosedDisc>(r.components[0]);
}

Json cmd_count_zeros(Args& a) {
  const ZeroCountReport r = count_zeros(a.map("expr"), single_disc(a.region("disc"), "disc"), a.integer("nodes"));
  a.write_json("count_zeros.json", {{"count", r.count},
                                    {"winding_residual", r.winding_residual},
                                    {"nodes_used", r.nodes_used},
                                    {"min_modulus", r.min_modulus}});
  return {{"count", r.count}, {"winding_residual", r.winding_residual}};
}

Json full_range_json(const FullRangeReport& r) {
  Json t = Json::array();
  for (const auto& o : r.targets)
    t.push_back({{"c", cj(o.c)},
                 {"attained", o.attained},
                 {"witness_n", o.witness_n},
                 {"witness_disc", {cj(o.witness_disc.center), o.witness_disc.radius}},
                 {"zero_count", o.zero_count},
                 {"identically", o.identically},
                 {"diagnostic", o.diagnostic}});
  return {{"z0", r.z0 ? cj(*r.z0) : Json("inf")}, {"r", r.r}, {"schedule", r.schedule}, {"image_ok", r.image_ok},
          {"targets", t}};
}

Json full_range_summary(const FullRangeReport& r) {
  Json att = Json::array(), ns = Json::array();
  for (const auto& o : r.targets) {
    att.push_back(o.attained);
    ns.push_back(o.witness_n);
  }
  return {{"attained", att}, {"witness_n", ns}};
}

Json cmd_full_range(Args& a) {
  const FullRangeReport r = full_range_probe(a.map("f"), a.map("g"), a.point("z0"), a.num("r"), a.region("U"),
                                             a.clist("targets"), a.schedule("schedule"));
  a.write_json("full_range.json", full_range_json(r));
  return full_range_summary(r);
}

Json cmd_ess_sing(Args& a) {
  const auto gp = a.dlist("grid");
  if (gp.size() != 5 || gp[4] < 1) throw InputError("--grid: expected x0,x1,y0,y1,n");
  const int n = static_cast<int>(gp[4]);
  ComplexList grid;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double tx = n == 1 ? 0.5 : i / (n - 1.0), ty = n == 1 ? 0.5 : j / (n - 1.0);
      grid.push_back({gp[0] + (gp[1] - gp[0]) * tx, gp[2] + (gp[3] - gp[2]) * ty});
    }
  const auto r =
      essential_singularity_probe(a.map("g"), a.point("z0"), a.dlist("radii"), grid, a.integer("samples"), a.num("tol"));
  std::ostringstream csv;
  csv << "radius,coverage\n";
  for (std::size_t k = 0; k < r.radii.size(); ++k) csv << csv_num(r.radii[k]) << "," << csv_num(r.coverage[k]) << "\n";
  a.write("coverage.csv", csv.str());
  a.write_json("ess_sing.json", {{"label", r.label},
                                 {"radii", r.radii},
                                 {"coverage", r.coverage},
                                 {"tol", r.tol},
                                 {"never_approached", r.never_approached},
                                 {"note", r.note}});
  return {{"coverage", r.coverage}, {"label", r.label}};
}

Json cmd_dw(Args& a) {
  const DWEstimate d = denjoy_wolff(a.map("f"), a.integer("max-iter"), a.num("tol"));
  const Json j{{"p", cj(d.p)}, {"boundary", d.boundary_flag}, {"iterations", d.iterations_used}, {"residual", d.residual}};
  a.write_json("dw.json", j);
  return j;
}

Json cmd_fixed_points(Args& a) {
  const auto pts = find_fixed_points(a.map("f"), a.region("region"), a.num("grid-step"));
  Json arr = Json::array();
  for (const auto& p : pts) {
    Json e{{"z0", cj(p.z0)}, {"lambda", cj(p.lambda)}, {"class", fixed_class_name(p.cls)}, {"residual", p.residual}};
    if (p.cls == FixedClass::Parabolic) e["petal_count"] = p.petal_count;
    if (p.cls == FixedClass::Superattracting) e["local_degree"] = p.local_degree;
    arr.push_back(e);
  }
  a.write_json("fixed_points.json", {{"fixed_points", arr}});
  return {{"count", pts.size()}};
}

Json cmd_conjugacy(Args& a, bool bott) {
  const MapExpr f = a.map("f");
  const Complex z0 = a.cplx("z0");
  const ConjugacyMap phi = bott ? boettcher(f, z0, a.integer("N")) : koenigs(f, z0, a.integer("N"));
  const double d = conjugacy_defect(phi, {z0, a.num("radius")}, a.integer("samples"));
  Json j{{"lambda", cj(phi.lambda)}, {"p", phi.p}, {"N", phi.N}, {"capped", phi.capped}, {"defect", d}};
  a.write_json(bott ? "boettcher.json" : "koenigs.json", j);
  return {{"defect", d}, {"N", phi.N}};
}

Json cmd_render(Args& a) {
  const auto w = a.dlist("window");
  if (w.size() != 4) throw InputError("--window: expected x0,y0,x1,y1");
  const std::string res = a.str("res");
  int W = 0, H = 0;
  const auto x = res.find('x');
  try {
    W = std::stoi(res.substr(0, x));
    H = x == std::string::npos ? W : std::stoi(res.substr(x + 1));
  } catch (const std::logic_error&) {
    throw InputError("--res: expected W or WxH, got '" + res + "'");
  }
  const EscapeGrid g = escape_render(a.map("f"), {w[0], w[1], w[2], w[3]}, W, H, a.integer("max-iter"), a.num("escape"));
  const std::string pgm = to_pgm(g);
  a.write("render.pgm", pgm);
  return {{"width", W}, {"height", H}, {"fnv1a64", hex(fnv1a(pgm))}};
}

Json cmd_sector(Args& a) {
  const CompactRegion s = sector_region(a.cplx("vertex"), a.num("axis"), a.num("opening"), a.num("radius"));
  double mx = 0.0;
  // open sector: the vertex itself is left out
  const Complex vertex = a.cplx("vertex");
  for (auto z : sample_region(s, 256, 0.0))
    if (z != vertex) mx = std::max(mx, std::abs(z));
  Json j{{"region", region_to_json(s)}, {"max_modulus", mx}, {"inside_unit_disc", mx < 1.0}};
  Json summary{{"max_modulus", mx}, {"inside_unit_disc", mx < 1.0}};
  if (a.has("g") || a.has("f")) {
    const FullRangeReport r = full_range_probe(a.map("f"), a.map("g"), a.point("z0"), a.num("r"), s,
                                               a.clist("targets"), a.schedule("schedule"));
    j["full_range"] = full_range_json(r);
    summary.update(full_range_summary(r));
  }
  a.write_json("sector_probe.json", j);
  return summary;
}

Json cmd_finite(Args& a) {
  std::string es = a.str("E");
  if (es.rfind("points:", 0) != 0 && es.rfind("{", 0) != 0 && es.rfind("@", 0) != 0) es = "points:" + es;
  const CompactRegion er = Args::region_text(es, "E");
  if (!er.is_finite()) throw InputError("--E: expected points");
  ComplexList E;
  for (const auto& c : er.components)
    for (auto z : std::get<FiniteSet>(c).points) E.push_back(z);
  std::vector<ComplexList> targets;
  for (const auto& t : a.all("target")) {
    ComplexList v;
    for (const auto& p : split(t, ',')) v.push_back(Args::to_complex(trim(p), "target"));
    targets.push_back(v);
  }
  if (targets.empty()) throw InputError("finite-universal needs at least one --target");
  const FiniteUniversalReport r =
      finite_set_universal_check(a.map("f"), a.map("omega"), FiniteSet{E}, targets, a.map("g"), a.integer("n-max"));
  Json rows = Json::array(), ns = Json::array();
  for (const auto& x : r.results) {
    rows.push_back({{"best_n", x.best_n}, {"max_error", x.max_error}});
    ns.push_back(x.best_n);
  }
  a.write_json("finite_universal.json",
               {{"E", cj(E)}, {"results", rows}, {"evacuating", r.evacuating}, {"evacuation_note", r.evacuation_note}});
  return {{"best_n", ns}, {"evacuating", r.evacuating}};
}

Json dispatch(const std::string& c, Args& a) {
  if (c == "classify") return cmd_classify(a);
  if (c == "noninjective-seq") return cmd_noninjective(a);
  if (c == "runaway") return cmd_runaway(a);
  if (c == "separation") return cmd_separation(a);
  if (c == "universal-step") return cmd_step(a, false);
  if (c == "weighted-step") return cmd_step(a, true);
  if (c == "build-universal") return cmd_build(a);
  if (c == "orbit-density") return cmd_density(a);
  if (c == "weighted-orbit") return cmd_weighted_orbit(a);
  if (c == "compose-seq") return cmd_compose(a);
  if (c == "cyclicity") return cmd_cyclicity(a);
  if (c == "count-zeros") return cmd_count_zeros(a);
  if (c == "full-range") return cmd_full_range(a);
  if (c == "ess-sing") return cmd_ess_sing(a);
  if (c == "dw") return cmd_dw(a);
  if (c == "fixed-points") return cmd_fixed_points(a);
  if (c == "koenigs") return cmd_conjugacy(a, false);
  if (c == "boettcher") return cmd_conjugacy(a, true);
  if (c == "render") return cmd_render(a);
  if (c == "sector-probe") return cmd_sector(a);
  if (c == "finite-universal") return cmd_finite(a);
  throw InputError("unknown command '" + c + "'");
}

int exit_code(const Error& e) {
  const std::string k = e.kind();
  if (k == "NotConverged" || k == "NotFound" || k == "NoConvergence" || k == "ConvergenceNotObserved") return 2;
  return 1;
}

std::string config_value(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  return j.dump();
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : table()) n.push_back(c.name);
    return n;
  }();
  return names;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  std::string command;
  auto fail = [&](const std::string& kind, const std::string& msg, int code) {
    err << "error: " << msg << "\n";
    out << Json{{"command", command}, {"status", "error"}, {"kind", kind}, {"message", msg}}.dump() << "\n";
    return code;
  };

  // value options whose argument starts with '-' (negative numbers, windows)
  std::set<std::string> flags{"--help", "-h", "--guard-disc"};
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    const std::string& s = args[i];
    if (s.rfind("--", 0) == 0 && s.find('=') == std::string::npos && !flags.count(s) && args[i + 1].size() > 1 &&
        args[i + 1][0] == '-' && args[i + 1].rfind("--", 0) != 0) {
      args[i] = s + "=" + args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }

  // config first, so it can name the command
  Json config = Json::object();
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    if (path.empty()) continue;
    std::ifstream in(path);
    if (!in) return fail("InputError", "cannot open config '" + path + "'", 1);
    try {
      config = Json::parse(in);
    } catch (const Json::parse_error& e) {
      return fail("ParseError", "config '" + path + "': " + e.what(), 1);
    }
    if (!config.is_object()) return fail("ParseError", "config '" + path + "': expected a JSON object", 1);
  }
  const auto& names = commands();
  const bool named = std::any_of(args.begin(), args.end(), [&](const std::string& s) {
    return std::find(names.begin(), names.end(), s) != names.end();
  });
  if (!named && config.contains("command") && config["command"].is_string())
    args.insert(args.begin(), config["command"].get<std::string>());

  CLI::App app{"fatoulab: experiments on wandering domains, Blaschke sequences and universal functions"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config filling options not given on the command line");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed recorded in every output");

  std::map<std::string, std::map<std::string, std::vector<std::string>>> store;
  std::map<std::string, std::map<std::string, bool>> flag_store;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::map<std::string, CLI::Option*>> handles;
  for (const auto& c : table()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->set_help_flag("--help", "print this help");  // -h would clash with --h
    sub->fallthrough();
    subs[c.name] = sub;
    for (const auto& o : c.opts) {
      auto& slot = store[c.name][o.name];
      CLI::Option* h = nullptr;
      if (o.flag) {
        h = sub->add_flag("--" + o.name, flag_store[c.name][o.name], o.help);
      } else {
        std::string help = o.help;
        if (!o.def.empty()) help += " [" + o.def + "]";
        h = sub->add_option("--" + o.name, slot, help)->allow_extra_args(false);
      }
      handles[c.name][o.name] = h;
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail("ParseError", e.what(), 1);
  }

  const Command* cmd = nullptr;
  for (const auto& c : table())
    if (subs[c.name]->parsed()) cmd = &c;
  command = cmd->name;

  Args a;
  a.out_dir = out_dir;
  a.seed = seed;
  for (const auto& o : cmd->opts) a.spec[o.name] = o;
  a.v = store[command];
  for (const auto& [k, on] : flag_store[command])
    if (on) a.v[k] = {"true"};

  // config fill
  Json vals = Json::object();
  for (auto it = config.begin(); it != config.end(); ++it)
    if (it.key() != "command" && it.key() != "args") vals[it.key()] = it.value();
  if (config.contains("args") && config["args"].is_object()) vals.update(config["args"]);
  for (auto it = vals.begin(); it != vals.end(); ++it) {
    const std::string& k = it.key();
    if (k == "seed") {
      if (app.get_option("--seed")->count() == 0) a.seed = it.value().get<std::uint64_t>();
      continue;
    }
    if (k == "out") {
      if (app.get_option("--out")->count() == 0) a.out_dir = it.value().get<std::string>();
      continue;
    }
    if (!a.spec.count(k)) return fail("InputError", "config: unknown option '" + k + "' for " + command, 1);
    if (handles[command][k]->count() > 0) continue;
    auto& dst = a.v[k];
    dst.clear();
    if (a.spec[k].multi && it.value().is_array()) {
      for (const auto& e : it.value()) dst.push_back(config_value(e));
    } else {
      dst.push_back(config_value(it.value()));
    }
  }

  try {
    Json summary = dispatch(command, a);
    Json line{{"command", command}, {"status", "ok"}, {"seed", a.seed}};
    line.update(summary);
    line["outputs"] = a.outputs;
    out << line.dump() << "\n";
    return 0;
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), exit_code(e));
  } catch (const std::exception& e) {
    return fail("Error", e.what(), 1);
  }
}

}  // namespace fatoulab::cli
