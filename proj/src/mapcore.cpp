#include "fatoulab/mapcore.hpp"

#include <cmath>
#include <string>

#include "fatoulab/parallel.hpp"

namespace fatoulab {

using NodePtr = std::shared_ptr<const MapExpr::Node>;

const char* op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Var: return "var";
    case Op::Poly: return "poly";
    case Op::Mobius: return "mobius";
    case Op::Pow: return "pow";
    case Op::Compose: return "compose";
    case Op::Mul: return "mul";
    case Op::Add: return "add";
    case Op::Exp: return "exp";
    case Op::Affine: return "affine";
    case Op::ArnoldiPoly: return "arnoldi_poly";
  }
  return "?";
}

namespace {

NodePtr make(MapExpr::Node n) { return std::make_shared<const MapExpr::Node>(std::move(n)); }

bool is_const(const MapExpr& e, Complex v) { return e.op() == Op::Const && e.const_value() == v; }

}  // namespace

MapExpr::MapExpr() : node_(make(Node{})) {}

int MapExpr::degree() const {
  switch (op()) {
    case Op::Const: return 0;
    case Op::Poly: {
      const auto& c = node_->coeffs;
      for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        if (c[static_cast<std::size_t>(i)] != Complex(0.0)) return i;
      return 0;
    }
    case Op::Affine: return node_->a == Complex(0.0) ? 0 : 1;
    case Op::Var: return 1;
    case Op::ArnoldiPoly: return std::max(0, basis().degree() - basis().derivative_order);
    default: return -1;
  }
}

std::size_t MapExpr::size() const {
  std::size_t s = 1;
  if (node_->lhs) s += lhs().size();
  if (node_->rhs) s += rhs().size();
  return s;
}

// Builders ------------------------------------------------------------------

MapExpr constant(Complex c) {
  MapExpr::Node n;
  n.op = Op::Const;
  n.value = c;
  return MapExpr(make(std::move(n)));
}

MapExpr var() { return MapExpr(); }

MapExpr poly(ComplexList coeffs) {
  if (coeffs.empty()) throw InputError("poly: coefficient list is empty");
  MapExpr::Node n;
  n.op = Op::Poly;
  n.coeffs = std::move(coeffs);
  return MapExpr(make(std::move(n)));
}

MapExpr mobius(Complex a, Complex b, Complex c, Complex d) {
  if (a * d - b * c == Complex(0.0)) throw DomainError("mobius: a*d - b*c == 0 (degenerate)");
  MapExpr::Node n;
  n.op = Op::Mobius;
  n.a = a;
  n.b = b;
  n.c = c;
  n.d = d;
  return MapExpr(make(std::move(n)));
}

MapExpr power(const MapExpr& inner, int k) {
  if (k < 1) throw InputError("pow: exponent must be a positive integer, got " + std::to_string(k));
  if (k == 1) return inner;
  MapExpr::Node n;
  n.op = Op::Pow;
  n.k = k;
  n.lhs = inner.ptr();
  return MapExpr(make(std::move(n)));
}

MapExpr compose(const MapExpr& outer, const MapExpr& inner) {
  MapExpr::Node n;
  n.op = Op::Compose;
  n.lhs = outer.ptr();
  n.rhs = inner.ptr();
  return MapExpr(make(std::move(n)));
}

MapExpr mul(const MapExpr& l, const MapExpr& r) {
  MapExpr::Node n;
  n.op = Op::Mul;
  n.lhs = l.ptr();
  n.rhs = r.ptr();
  return MapExpr(make(std::move(n)));
}

MapExpr add(const MapExpr& l, const MapExpr& r) {
  MapExpr::Node n;
  n.op = Op::Add;
  n.lhs = l.ptr();
  n.rhs = r.ptr();
  return MapExpr(make(std::move(n)));
}

MapExpr exp_of(const MapExpr& inner) {
  MapExpr::Node n;
  n.op = Op::Exp;
  n.lhs = inner.ptr();
  return MapExpr(make(std::move(n)));
}

MapExpr affine(Complex scale, Complex shift) {
  MapExpr::Node n;
  n.op = Op::Affine;
  n.a = scale;
  n.b = shift;
  return MapExpr(make(std::move(n)));
}

MapExpr arnoldi_poly(ArnoldiBasis basis) {
  const auto m = basis.coeffs.size();
  if (m == 0) throw InputError("arnoldi_poly: empty coefficient vector");
  if (basis.H.rows() != static_cast<Eigen::Index>(m) || basis.H.cols() != static_cast<Eigen::Index>(m) - 1)
    throw InputError("arnoldi_poly: Hessenberg matrix must be (n+1) x n for n+1 coefficients");
  if (!(basis.scale > 0.0)) throw InputError("arnoldi_poly: scale must be positive");
  if (basis.derivative_order < 0) throw InputError("arnoldi_poly: negative derivative order");
  MapExpr::Node n;
  n.op = Op::ArnoldiPoly;
  n.basis = std::make_shared<const ArnoldiBasis>(std::move(basis));
  return MapExpr(make(std::move(n)));
}

MapExpr blaschke_factor(Complex a) {
  if (!(std::abs(a) < 1.0)) throw DomainError("blaschke factor needs |a| < 1");
  return mul(var(), mobius(1.0, -a, -std::conj(a), 1.0));
}

MapExpr disc_automorphism(Complex a, double theta) {
  if (!(std::abs(a) < 1.0)) throw DomainError("disc automorphism needs |a| < 1");
  const Complex u = std::polar(1.0, theta);
  return mobius(u, -u * a, -std::conj(a), 1.0);
}

MapExpr iterate_map(const MapExpr& f, int n) {
  if (n < 0) throw InputError("iterate_map: negative count");
  MapExpr g = var();
  for (int i = 0; i < n; ++i) g = (i == 0) ? f : compose(f, g);
  return g;
}

// Evaluation ----------------------------------------------------------------

namespace {

Complex mobius_den(const MapExpr::Node& n, Complex z) {
  const Complex cz = n.c * z;
  const Complex den = cz + n.d;
  if (den == Complex(0.0) || std::abs(den) < kPoleTolerance * (std::abs(cz) + std::abs(n.d)))
    throw PoleError("mobius denominator vanishes at z = " + std::to_string(z.real()) + "+" +
                    std::to_string(z.imag()) + "i");
  return den;
}

Complex ipow(Complex x, int k) {
  Complex r(1.0), b = x;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

// Truncated power series ----------------------------------------------------

using Jet = ComplexList;

Jet jet_const(Complex c, std::size_t L) {
  Jet j(L, Complex(0.0));
  j[0] = c;
  return j;
}

Jet jet_mul(const Jet& a, const Jet& b) {
  const std::size_t L = a.size();
  Jet r(L, Complex(0.0));
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t k = 0; i + k < L; ++k) r[i + k] += a[i] * b[k];
  return r;
}

Jet jet_div(const Jet& a, const Jet& b) {
  const std::size_t L = a.size();
  Jet q(L, Complex(0.0));
  for (std::size_t n = 0; n < L; ++n) {
    Complex s = a[n];
    for (std::size_t i = 1; i <= n; ++i) s -= b[i] * q[n - i];
    q[n] = s / b[0];
  }
  return q;
}

Jet jet_exp(const Jet& u) {
  const std::size_t L = u.size();
  Jet e(L, Complex(0.0));
  e[0] = std::exp(u[0]);
  for (std::size_t n = 1; n < L; ++n) {
    Complex s(0.0);
    for (std::size_t k = 1; k <= n; ++k) s += static_cast<double>(k) * u[k] * e[n - k];
    e[n] = s / static_cast<double>(n);
  }
  return e;
}

Jet jet_pow(const Jet& x, int k) {
  Jet r = jet_const(1.0, x.size()), b = x;
  while (k > 0) {
    if (k & 1) r = jet_mul(r, b);
    k >>= 1;
    if (k) b = jet_mul(b, b);
  }
  return r;
}

/// Taylor coefficients (in w, about w0) of the Arnoldi polynomial, order L-1.
Jet arnoldi_series(const ArnoldiBasis& B, Complex w0, std::size_t L) {
  const int n = B.degree();
  std::vector<Jet> q;
  q.reserve(static_cast<std::size_t>(n) + 1);
  Jet w = jet_const(w0, L);
  if (L > 1) w[1] = 1.0;
  q.push_back(jet_const(1.0, L));
  Jet p(L, Complex(0.0));
  for (std::size_t t = 0; t < L; ++t) p[t] += B.coeffs(0) * q[0][t];
  for (int k = 0; k < n; ++k) {
    Jet v = jet_mul(w, q[static_cast<std::size_t>(k)]);
    for (int j = 0; j <= k; ++j) {
      const Complex h = B.H(j, k);
      for (std::size_t t = 0; t < L; ++t) v[t] -= h * q[static_cast<std::size_t>(j)][t];
    }
    const Complex hk = B.H(k + 1, k);
    for (auto& x : v) x /= hk;
    for (std::size_t t = 0; t < L; ++t) p[t] += B.coeffs(k + 1) * v[t];
    q.push_back(std::move(v));
  }
  return p;
}

/// Series of d^m/dz^m of the Arnoldi polynomial at z0 = center + scale*w0,
/// in powers of (z - z0), length L.
Jet arnoldi_deriv_series(const ArnoldiBasis& B, Complex z0, std::size_t L) {
  const int m = B.derivative_order;
  const Complex w0 = (z0 - B.center) / B.scale;
  const Jet s = arnoldi_series(B, w0, L + static_cast<std::size_t>(m));
  Jet r(L, Complex(0.0));
  for (std::size_t j = 0; j < L; ++j) {
    // (j+m)!/j! * s_{j+m} / scale^{m+j}
    double fall = 1.0;
    for (int i = 1; i <= m; ++i) fall *= static_cast<double>(j + static_cast<std::size_t>(i));
    r[j] = fall * s[j + static_cast<std::size_t>(m)] / std::pow(B.scale, static_cast<double>(m + static_cast<int>(j)));
  }
  return r;
}

/// sum_j g_j * (u - u_0)^j as a jet.
Jet compose_series(const Jet& g, const Jet& u) {
  const std::size_t L = u.size();
  Jet s = u;
  s[0] = 0.0;
  Jet r = jet_const(g.back(), L);
  for (std::size_t j = g.size() - 1; j-- > 0;) {
    r = jet_mul(r, s);
    r[0] += g[j];
  }
  return r;
}

Complex eval_node(const MapExpr::Node& n, Complex z);

Complex eval_arnoldi(const ArnoldiBasis& B, Complex z) {
  if (B.derivative_order == 0) {
    const Complex w = (z - B.center) / B.scale;
    const int deg = B.degree();
    // Plain recurrence; q holds the basis values.
    std::vector<Complex> q(static_cast<std::size_t>(deg) + 1);
    q[0] = 1.0;
    Complex p = B.coeffs(0);
    for (int k = 0; k < deg; ++k) {
      Complex v = w * q[static_cast<std::size_t>(k)];
      for (int j = 0; j <= k; ++j) v -= B.H(j, k) * q[static_cast<std::size_t>(j)];
      v /= B.H(k + 1, k);
      q[static_cast<std::size_t>(k) + 1] = v;
      p += B.coeffs(k + 1) * v;
    }
    return p;
  }
  return arnoldi_deriv_series(B, z, 1)[0];
}

Complex eval_node(const MapExpr::Node& n, Complex z) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return z;
    case Op::Poly: {
      Complex r(0.0);
      for (auto it = n.coeffs.rbegin(); it != n.coeffs.rend(); ++it) r = r * z + *it;
      return r;
    }
    case Op::Mobius: {
      const Complex den = mobius_den(n, z);
      return (n.a * z + n.b) / den;
    }
    case Op::Pow: return ipow(eval_node(*n.lhs, z), n.k);
    case Op::Compose: return eval_node(*n.lhs, eval_node(*n.rhs, z));
    case Op::Mul: return eval_node(*n.lhs, z) * eval_node(*n.rhs, z);
    case Op::Add: return eval_node(*n.lhs, z) + eval_node(*n.rhs, z);
    case Op::Exp: return std::exp(eval_node(*n.lhs, z));
    case Op::Affine: return n.a * z + n.b;
    case Op::ArnoldiPoly: return eval_arnoldi(*n.basis, z);
  }
  return {};
}

Jet jet_node(const MapExpr::Node& n, const Jet& u) {
  const std::size_t L = u.size();
  switch (n.op) {
    case Op::Const: return jet_const(n.value, L);
    case Op::Var: return u;
    case Op::Poly: {
      Jet r = jet_const(n.coeffs.back(), L);
      for (std::size_t j = n.coeffs.size() - 1; j-- > 0;) {
        r = jet_mul(r, u);
        r[0] += n.coeffs[j];
      }
      return r;
    }
    case Op::Mobius: {
      mobius_den(n, u[0]);
      Jet num(L), den(L);
      for (std::size_t i = 0; i < L; ++i) {
        num[i] = n.a * u[i];
        den[i] = n.c * u[i];
      }
      num[0] += n.b;
      den[0] += n.d;
      return jet_div(num, den);
    }
    case Op::Pow: return jet_pow(jet_node(*n.lhs, u), n.k);
    case Op::Compose: return jet_node(*n.lhs, jet_node(*n.rhs, u));
    case Op::Mul: return jet_mul(jet_node(*n.lhs, u), jet_node(*n.rhs, u));
    case Op::Add: {
      Jet a = jet_node(*n.lhs, u);
      const Jet b = jet_node(*n.rhs, u);
      for (std::size_t i = 0; i < L; ++i) a[i] += b[i];
      return a;
    }
    case Op::Exp: return jet_exp(jet_node(*n.lhs, u));
    case Op::Affine: {
      Jet r(L);
      for (std::size_t i = 0; i < L; ++i) r[i] = n.a * u[i];
      r[0] += n.b;
      return r;
    }
    case Op::ArnoldiPoly: return compose_series(arnoldi_deriv_series(*n.basis, u[0], L), u);
  }
  return u;
}

}  // namespace

Complex eval(const MapExpr& e, Complex z) { return eval_node(e.node(), z); }

MapExpr derivative(const MapExpr& e) {
  switch (e.op()) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(1.0);
    case Op::Poly: {
      const auto& c = e.coefficients();
      if (c.size() == 1) return constant(0.0);
      ComplexList d(c.size() - 1);
      for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
      return poly(std::move(d));
    }
    case Op::Mobius: {
      const Complex a = e.mobius_a(), b = e.mobius_b(), c = e.mobius_c(), d = e.mobius_d();
      const Complex det = a * d - b * c;
      if (c == Complex(0.0)) return constant(det / (d * d));
      // det / (c z + d)^2
      return mul(constant(det), power(mobius(0.0, 1.0, c, d), 2));
    }
    case Op::Pow: {
      const MapExpr u = e.lhs();
      const int k = e.exponent();
      const MapExpr du = derivative(u);
      if (is_const(du, 0.0)) return constant(0.0);
      const MapExpr outer = k == 2 ? mul(constant(2.0), u) : mul(constant(static_cast<double>(k)), power(u, k - 1));
      return is_const(du, 1.0) ? outer : mul(outer, du);
    }
    case Op::Compose: {
      const MapExpr f = e.lhs(), g = e.rhs();
      const MapExpr df = derivative(f), dg = derivative(g);
      if (is_const(df, 0.0) || is_const(dg, 0.0)) return constant(0.0);
      const MapExpr outer = df.op() == Op::Const ? df : compose(df, g);
      if (is_const(dg, 1.0)) return outer;
      if (is_const(outer, 1.0)) return dg;
      return mul(outer, dg);
    }
    case Op::Mul: {
      const MapExpr u = e.lhs(), v = e.rhs();
      const MapExpr du = derivative(u), dv = derivative(v);
      const bool zu = is_const(du, 0.0), zv = is_const(dv, 0.0);
      if (zu && zv) return constant(0.0);
      const MapExpr t1 = is_const(du, 1.0) ? v : mul(du, v);
      const MapExpr t2 = is_const(dv, 1.0) ? u : mul(u, dv);
      if (zu) return t2;
      if (zv) return t1;
      return add(t1, t2);
    }
    case Op::Add: {
      const MapExpr du = derivative(e.lhs()), dv = derivative(e.rhs());
      if (is_const(du, 0.0)) return dv;
      if (is_const(dv, 0.0)) return du;
      return add(du, dv);
    }
    case Op::Exp: {
      const MapExpr du = derivative(e.lhs());
      if (is_const(du, 0.0)) return constant(0.0);
      return is_const(du, 1.0) ? e : mul(e, du);
    }
    case Op::Affine: return constant(e.affine_scale());
    case Op::ArnoldiPoly: {
      ArnoldiBasis b = e.basis();
      b.derivative_order += 1;
      return arnoldi_poly(std::move(b));
    }
  }
  return constant(0.0);
}

Complex eval_deriv(const MapExpr& e, Complex z) { return eval(derivative(e), z); }

ComplexList taylor(const MapExpr& e, Complex z0, int order) {
  if (order < 0) throw InputError("taylor: negative order");
  Jet u = jet_const(z0, static_cast<std::size_t>(order) + 1);
  if (order >= 1) u[1] = 1.0;
  return jet_node(e.node(), u);
}

Complex nth_derivative(const MapExpr& e, Complex z0, int n) {
  const ComplexList t = taylor(e, z0, n);
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return fact * t[static_cast<std::size_t>(n)];
}

ComplexList iterate(const MapExpr& f, Complex z, int n) {
  if (n < 0) throw InputError("iterate: negative step count");
  ComplexList orbit;
  orbit.reserve(static_cast<std::size_t>(n) + 1);
  orbit.push_back(z);
  for (int k = 1; k <= n; ++k) {
    z = eval(f, z);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kOverflowModulus)
      throw OverflowError("orbit escaped at step " + std::to_string(k), k, orbit);
    orbit.push_back(z);
  }
  return orbit;
}

ComplexList eval_many(const MapExpr& e, const ComplexList& zs) {
  ComplexList out(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) { out[i] = eval(e, zs[i]); });
  return out;
}

}  // namespace fatoulab
