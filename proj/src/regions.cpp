#include "fatoulab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fatoulab/map_io.hpp"
#include "fatoulab/parallel.hpp"

namespace fatoulab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double polygon_perimeter(const Polygon& p) {
  double s = 0.0;
  const auto& v = p.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::abs(v[(i + 1) % v.size()] - v[i]);
  return s;
}

/// Point at arc-length fraction t in [0, 1) along the closed edge chain.
Complex polygon_point(const Polygon& p, double t) {
  const auto& v = p.vertices;
  const double total = polygon_perimeter(p);
  double s = t * total;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Complex a = v[i], b = v[(i + 1) % v.size()];
    const double len = std::abs(b - a);
    if (s <= len || i + 1 == v.size()) return len > 0 ? a + (b - a) * std::min(1.0, s / len) : a;
    s -= len;
  }
  return v.front();
}

double segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double l2 = std::norm(ab);
  if (l2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(ab)).real() / l2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  auto on = [](Complex a, Complex b, Complex c) {
    return std::abs(cross(b - a, c - a)) == 0.0 && std::min(a.real(), b.real()) <= c.real() &&
           c.real() <= std::max(a.real(), b.real()) && std::min(a.imag(), b.imag()) <= c.imag() &&
           c.imag() <= std::max(a.imag(), b.imag());
  };
  return on(q1, q2, p1) || on(q1, q2, p2) || on(p1, p2, q1) || on(p1, p2, q2);
}

struct Box {
  double x0, y0, x1, y1;
};

Box bbox(const ComplexList& v) {
  Box b{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (auto z : v) {
    b.x0 = std::min(b.x0, z.real());
    b.y0 = std::min(b.y0, z.imag());
    b.x1 = std::max(b.x1, z.real());
    b.y1 = std::max(b.y1, z.imag());
  }
  return b;
}

/// Square grid of cells over the box with circumradius <= mesh.
template <class Keep>
void grid_cells(const Box& b, double mesh, std::vector<ClosedDisc>& out, Keep keep) {
  const double side = mesh * std::sqrt(2.0);
  const double w = std::max(b.x1 - b.x0, 1e-300), h = std::max(b.y1 - b.y0, 1e-300);
  const auto nx = static_cast<long>(std::max(1.0, std::ceil(w / side)));
  const auto ny = static_cast<long>(std::max(1.0, std::ceil(h / side)));
  const double hx = w / static_cast<double>(nx), hy = h / static_cast<double>(ny);
  const double rho = 0.5 * std::hypot(hx, hy);
  if (static_cast<double>(nx) * static_cast<double>(ny) > 5e7)
    throw MeshTooCoarse("subdivision needs more than 5e7 cells; raise the mesh");
  for (long iy = 0; iy < ny; ++iy)
    for (long ix = 0; ix < nx; ++ix) {
      const Complex c(b.x0 + (static_cast<double>(ix) + 0.5) * hx, b.y0 + (static_cast<double>(iy) + 0.5) * hy);
      if (keep(c, hx, hy, rho)) out.push_back({c, rho});
    }
}

}  // namespace

bool CompactRegion::is_finite() const {
  return !components.empty() &&
         std::all_of(components.begin(), components.end(), [](const auto& c) { return std::holds_alternative<FiniteSet>(c); });
}

double CompactRegion::max_distance_from(Complex c) const {
  double m = 0.0;
  for (const auto& comp : components)
    std::visit(overloaded{[&](const ClosedDisc& d) { m = std::max(m, std::abs(d.center - c) + d.radius); },
                          [&](const Polygon& p) {
                            for (auto v : p.vertices) m = std::max(m, std::abs(v - c));
                          },
                          [&](const FiniteSet& s) {
                            for (auto v : s.points) m = std::max(m, std::abs(v - c));
                          }},
               comp);
  return m;
}

double CompactRegion::max_modulus() const { return max_distance_from(0.0); }

CompactRegion disc_region(Complex center, double radius) {
  CompactRegion r{{ClosedDisc{center, radius}}};
  validate(r);
  return r;
}

CompactRegion polygon_region(ComplexList vertices) {
  CompactRegion r{{Polygon{std::move(vertices)}}};
  validate(r);
  return r;
}

CompactRegion finite_set_region(ComplexList points) {
  CompactRegion r{{FiniteSet{std::move(points)}}};
  validate(r);
  return r;
}

CompactRegion region_union(const CompactRegion& a, const CompactRegion& b) {
  CompactRegion r = a;
  r.components.insert(r.components.end(), b.components.begin(), b.components.end());
  return r;
}

void validate(const CompactRegion& r) {
  for (const auto& comp : r.components)
    std::visit(overloaded{[](const ClosedDisc& d) {
                            if (!(d.radius > 0.0) || !std::isfinite(d.radius))
                              throw InputError("disc radius must be positive and finite");
                          },
                          [](const Polygon& p) {
                            const auto& v = p.vertices;
                            if (v.size() < 3) throw InputError("polygon needs at least 3 vertices");
                            const std::size_t n = v.size();
                            for (std::size_t i = 0; i < n; ++i)
                              for (std::size_t j = i + 1; j < n; ++j) {
                                if (j == i + 1 || (i == 0 && j == n - 1)) continue;
                                if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                                  throw InputError("polygon is self-intersecting");
                              }
                          },
                          [](const FiniteSet& s) {
                            if (s.points.empty()) throw InputError("finite set must be non-empty");
                          }},
               comp);
}

void validate(const Contour& c) {
  if (!(c.radius > 0.0)) throw InputError("contour radius must be positive");
  if (c.node_count < 64 || (c.node_count & (c.node_count - 1)) != 0)
    throw InputError("contour node_count must be a power of two >= 64");
  if (c.orientation != 1 && c.orientation != -1) throw InputError("contour orientation must be +1 or -1");
}

bool point_in_polygon(const Polygon& p, Complex z) {
  bool in = false;
  const auto& v = p.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Complex a = v[i], b = v[j];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      const double x = (b.real() - a.real()) * (z.imag() - a.imag()) / (b.imag() - a.imag()) + a.real();
      if (z.real() < x) in = !in;
    }
  }
  return in;
}

double distance_to_boundary(const Polygon& p, Complex z) {
  double m = INFINITY;
  const auto& v = p.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) m = std::min(m, segment_distance(z, v[i], v[(i + 1) % v.size()]));
  return m;
}

bool contains(const CompactRegion& r, Complex z, double tol) {
  for (const auto& comp : r.components) {
    const bool hit = std::visit(
        overloaded{[&](const ClosedDisc& d) { return std::abs(z - d.center) <= d.radius + tol; },
                   [&](const Polygon& p) { return point_in_polygon(p, z) || distance_to_boundary(p, z) <= tol; },
                   [&](const FiniteSet& s) {
                     return std::any_of(s.points.begin(), s.points.end(), [&](Complex q) { return std::abs(q - z) <= tol; });
                   }},
        comp);
    if (hit) return true;
  }
  return false;
}

ComplexList sample_boundary(const CompactRegion& region, int n) {
  if (n < 1) throw InputError("sample_boundary: n_per_component must be positive");
  ComplexList out;
  for (const auto& comp : region.components)
    std::visit(overloaded{[&](const ClosedDisc& d) {
                            for (int j = 0; j < n; ++j) {
                              const double t = kTwoPi * j / n;
                              // exact quarter points
                              Complex u(std::cos(t), std::sin(t));
                              if (4 * j % n == 0) {
                                const int q = 4 * j / n;
                                u = q == 0 ? Complex(1, 0) : q == 1 ? Complex(0, 1) : q == 2 ? Complex(-1, 0) : Complex(0, -1);
                              }
                              out.push_back(d.center + d.radius * u);
                            }
                          },
                          [&](const Polygon& p) {
                            for (int j = 0; j < n; ++j) out.push_back(polygon_point(p, static_cast<double>(j) / n));
                          },
                          [&](const FiniteSet& s) { out.insert(out.end(), s.points.begin(), s.points.end()); }},
               comp);
  return out;
}

ComplexList sample_region(const CompactRegion& region, int n, double phase) {
  if (n < 4) throw InputError("sample_region: need at least 4 boundary samples");
  ComplexList out;
  for (const auto& comp : region.components)
    std::visit(overloaded{[&](const ClosedDisc& d) {
                            for (int j = 0; j < n; ++j)
                              out.push_back(d.center + std::polar(d.radius, kTwoPi * (j + phase) / n));
                            for (int k = 0; k < 4; ++k) {
                              const double rf = (k + phase) / 4.0;
                              if (rf == 0.0) {
                                out.push_back(d.center);
                                continue;
                              }
                              const int m = std::max(4, static_cast<int>(std::lround(n * rf)));
                              for (int j = 0; j < m; ++j)
                                out.push_back(d.center + std::polar(d.radius * rf, kTwoPi * (j + phase) / m));
                            }
                          },
                          [&](const Polygon& p) {
                            for (int j = 0; j < n; ++j) out.push_back(polygon_point(p, (j + phase) / n));
                            const Box b = bbox(p.vertices);
                            const double h = 2.0 * polygon_perimeter(p) / n;
                            for (double y = b.y0 + (phase + 0.5) * h; y < b.y1; y += h)
                              for (double x = b.x0 + (phase + 0.5) * h; x < b.x1; x += h) {
                                const Complex z(x, y);
                                if (point_in_polygon(p, z) && distance_to_boundary(p, z) > 1e-9) out.push_back(z);
                              }
                          },
                          [&](const FiniteSet& s) { out.insert(out.end(), s.points.begin(), s.points.end()); }},
               comp);
  return out;
}

ComplexList sample_uniform(const CompactRegion& region, int count, std::mt19937_64& rng) {
  if (region.empty()) return {};
  std::uniform_real_distribution<double> U(0.0, 1.0);
  // Pick components proportionally to area (finite sets get weight 1 each if alone).
  std::vector<double> w;
  for (const auto& comp : region.components)
    w.push_back(std::visit(overloaded{[](const ClosedDisc& d) { return kPi * d.radius * d.radius; },
                                      [](const Polygon& p) {
                                        double a = 0.0;
                                        const auto& v = p.vertices;
                                        for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
                                        return std::abs(a) / 2.0;
                                      },
                                      [&](const FiniteSet&) { return region.is_finite() ? 1.0 : 0.0; }},
                           comp));
  double total = 0.0;
  for (double x : w) total += x;
  ComplexList out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double t = U(rng) * total;
    std::size_t k = 0;
    while (k + 1 < w.size() && t >= w[k]) t -= w[k++];
    while (w[k] == 0.0 && k > 0) --k;
    out.push_back(std::visit(overloaded{[&](const ClosedDisc& d) {
                                          const double r = d.radius * std::sqrt(U(rng));
                                          return d.center + std::polar(r, kTwoPi * U(rng));
                                        },
                                        [&](const Polygon& p) {
                                          const Box b = bbox(p.vertices);
                                          for (;;) {
                                            const Complex z(b.x0 + (b.x1 - b.x0) * U(rng), b.y0 + (b.y1 - b.y0) * U(rng));
                                            if (point_in_polygon(p, z)) return z;
                                          }
                                        },
                                        [&](const FiniteSet& s) {
                                          const auto j = static_cast<std::size_t>(U(rng) * static_cast<double>(s.points.size()));
                                          return s.points[std::min(j, s.points.size() - 1)];
                                        }},
                             region.components[k]));
  }
  return out;
}

std::vector<ClosedDisc> subdivide(const CompactRegion& region, double mesh) {
  if (!(mesh > 0.0)) throw InputError("mesh must be positive");
  std::vector<ClosedDisc> out;
  for (const auto& comp : region.components)
    std::visit(overloaded{[&](const ClosedDisc& d) {
                            if (d.radius <= mesh) {
                              out.push_back(d);
                              return;
                            }
                            const Box b{d.center.real() - d.radius, d.center.imag() - d.radius, d.center.real() + d.radius,
                                        d.center.imag() + d.radius};
                            grid_cells(b, mesh, out, [&](Complex c, double hx, double hy, double) {
                              // distance from the disc centre to the cell rectangle
                              const double dx = std::max(0.0, std::abs(c.real() - d.center.real()) - hx / 2);
                              const double dy = std::max(0.0, std::abs(c.imag() - d.center.imag()) - hy / 2);
                              return std::hypot(dx, dy) <= d.radius;
                            });
                          },
                          [&](const Polygon& p) {
                            grid_cells(bbox(p.vertices), mesh, out, [&](Complex c, double, double, double rho) {
                              return point_in_polygon(p, c) || distance_to_boundary(p, c) <= rho;
                            });
                          },
                          [&](const FiniteSet& s) {
                            for (auto z : s.points) out.push_back({z, kPointRadius});
                          }},
               comp);
  return out;
}

DiscCover cover(const CompactRegion& region, double mesh) {
  DiscCover c;
  c.source = "region";
  for (const auto& comp : region.components)
    std::visit(overloaded{[&](const ClosedDisc& d) { c.discs.push_back(d); },
                          [&](const Polygon& p) {
                            const auto sub = subdivide(CompactRegion{{p}}, mesh);
                            c.discs.insert(c.discs.end(), sub.begin(), sub.end());
                          },
                          [&](const FiniteSet& s) {
                            for (auto z : s.points) c.discs.push_back({z, kPointRadius});
                          }},
               comp);
  if (c.discs.empty()) throw InputError("cover of an empty region");
  return c;
}

DiscCover image_cover(const MapExpr& f, const CompactRegion& region, double mesh, const ImageCoverOptions& opt) {
  const std::vector<ClosedDisc> sub = subdivide(region, mesh);
  if (sub.empty()) throw InputError("image_cover of an empty region");
  DiscCover out;
  out.source = "image";
  out.discs.resize(sub.size());
  const int S = opt.circle_samples;
  ComplexList ring(static_cast<std::size_t>(S));
  for (int k = 0; k < S; ++k) ring[static_cast<std::size_t>(k)] = std::polar(1.0, kTwoPi * k / S);
  parallel_for(sub.size(), [&](std::size_t i) {
    const ClosedDisc& d = sub[i];
    const Complex fz = eval(f, d.center);
    if (d.radius <= kPointRadius) {
      out.discs[i] = {fz, kPointRadius};
      return;
    }
    double M = 0.0;
    for (int k = 0; k < S; ++k) M = std::max(M, std::abs(eval(f, d.center + 2.0 * d.radius * ring[static_cast<std::size_t>(k)]) - fz));
    const double r = opt.slack * M;
    if (!(r <= opt.blowup_cap))
      throw MeshTooCoarse("image disc radius " + std::to_string(r) + " exceeds the blow-up cap; refine the mesh");
    out.discs[i] = {fz, std::max(r, kPointRadius)};
  });
  return out;
}

Disjointness covers_disjoint(const DiscCover& a, const DiscCover& b) {
  double m = INFINITY;
  for (const auto& x : a.discs)
    for (const auto& y : b.discs) m = std::min(m, std::abs(x.center - y.center) - x.radius - y.radius);
  return {m > 0.0, m};
}

// IO -------------------------------------------------------------------------

namespace {

Complex xy(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("expected [x, y] at " + where);
  return {j[0].get<double>(), j[1].get<double>()};
}

ComplexList xy_list(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("expected a list of [x, y] at " + where);
  ComplexList out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(xy(j[i], where + "/" + std::to_string(i)));
  return out;
}

std::vector<std::string> split_str(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double num(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && s[used] == ' ') ++used;
    if (used != s.size()) throw ParseError("bad number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw ParseError("bad number '" + s + "'");
  } catch (const std::out_of_range&) {
    throw ParseError("number out of range '" + s + "'");
  }
}

ComplexList pairs(const std::string& s) {
  ComplexList out;
  for (const auto& p : split_str(s, ';')) {
    const auto xyv = split_str(p, ',');
    if (xyv.size() != 2) throw ParseError("expected x,y pair, got '" + p + "'");
    out.emplace_back(num(xyv[0]), num(xyv[1]));
  }
  return out;
}

}  // namespace

CompactRegion region_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError("expected a region object at " + (where.empty() ? "/" : where));
  CompactRegion r;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "discs" && it.key() != "polygons" && it.key() != "points")
      throw ParseError("unknown region key '" + it.key() + "' at " + where + "/" + it.key());
  if (j.contains("discs")) {
    const auto& ds = j["discs"];
    if (!ds.is_array()) throw ParseError("expected a list at " + where + "/discs");
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto& d = ds[i];
      const std::string at = where + "/discs/" + std::to_string(i);
      if (!d.is_array() || d.size() != 3 || !d[0].is_number() || !d[1].is_number() || !d[2].is_number())
        throw ParseError("expected [cx, cy, r] at " + at);
      r.components.emplace_back(ClosedDisc{{d[0].get<double>(), d[1].get<double>()}, d[2].get<double>()});
    }
  }
  if (j.contains("polygons")) {
    const auto& ps = j["polygons"];
    if (!ps.is_array()) throw ParseError("expected a list at " + where + "/polygons");
    for (std::size_t i = 0; i < ps.size(); ++i)
      r.components.emplace_back(Polygon{xy_list(ps[i], where + "/polygons/" + std::to_string(i))});
  }
  if (j.contains("points")) {
    const auto pts = xy_list(j["points"], where + "/points");
    if (!pts.empty()) r.components.emplace_back(FiniteSet{pts});
  }
  try {
    validate(r);
  } catch (const InputError& e) {
    throw ParseError(std::string(e.what()) + " (at " + (where.empty() ? "/" : where) + ")");
  }
  if (r.empty()) throw ParseError("empty region at " + (where.empty() ? "/" : where));
  return r;
}

nlohmann::json region_to_json(const CompactRegion& r) {
  nlohmann::json discs = nlohmann::json::array(), polys = nlohmann::json::array(), pts = nlohmann::json::array();
  for (const auto& comp : r.components)
    std::visit(overloaded{[&](const ClosedDisc& d) { discs.push_back({d.center.real(), d.center.imag(), d.radius}); },
                          [&](const Polygon& p) {
                            nlohmann::json v = nlohmann::json::array();
                            for (auto z : p.vertices) v.push_back({z.real(), z.imag()});
                            polys.push_back(v);
                          },
                          [&](const FiniteSet& s) {
                            for (auto z : s.points) pts.push_back({z.real(), z.imag()});
                          }},
               comp);
  nlohmann::json j = nlohmann::json::object();
  if (!discs.empty()) j["discs"] = discs;
  if (!polys.empty()) j["polygons"] = polys;
  if (!pts.empty()) j["points"] = pts;
  return j;
}

CompactRegion parse_region_spec(const std::string& text) {
  std::string s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  if (s.empty()) throw ParseError("empty region spec");
  if (s.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("region JSON: ") + e.what());
    }
    return region_from_json(j);
  }
  if (s.front() == '@') {
    std::ifstream in(s.substr(1));
    if (!in) throw ParseError("cannot open region file '" + s.substr(1) + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_region_spec(ss.str());
  }
  CompactRegion r;
  for (const auto& part : split_str(s, '|')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw ParseError("region component needs a kind prefix: '" + part + "'");
    const std::string head = part.substr(0, colon), body = part.substr(colon + 1);
    if (head == "disc") {
      const auto v = split_str(body, ',');
      if (v.size() != 3) throw ParseError("disc:cx,cy,r expected, got '" + part + "'");
      r.components.emplace_back(ClosedDisc{{num(v[0]), num(v[1])}, num(v[2])});
    } else if (head == "polygon") {
      r.components.emplace_back(Polygon{pairs(body)});
    } else if (head == "points") {
      r.components.emplace_back(FiniteSet{pairs(body)});
    } else {
      throw ParseError("unknown region kind '" + head + "'");
    }
  }
  try {
    validate(r);
  } catch (const InputError& e) {
    throw ParseError(std::string(e.what()) + " (in '" + s + "')");
  }
  return r;
}

}  // namespace fatoulab
