#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fatoulab/core.hpp"

namespace fatoulab {

enum class Op { Const, Var, Poly, Mobius, Pow, Compose, Mul, Add, Exp, Affine, ArnoldiPoly };

const char* op_name(Op op);

/// Polynomial stored in a discretely orthogonal basis built by Arnoldi
/// iteration in the scaled variable w = (z - center) / scale. H is the
/// (n+1) x n Hessenberg matrix of the recurrence, coeffs has n+1 entries.
/// derivative_order > 0 means the node denotes that derivative in z.
struct ArnoldiBasis {
  Complex center{};
  double scale = 1.0;
  Eigen::MatrixXcd H;
  Eigen::VectorXcd coeffs;
  int derivative_order = 0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Immutable expression tree for a holomorphic map. Copies share nodes.
class MapExpr {
 public:
  struct Node {
    Op op = Op::Var;
    Complex value{};        // Const
    ComplexList coeffs;     // Poly, ascending degree
    Complex a{}, b{}, c{}, d{};  // Mobius (a z + b) / (c z + d); Affine uses a (scale), b (shift)
    int k = 1;              // Pow exponent
    std::shared_ptr<const Node> lhs, rhs;  // Compose(outer, inner), Mul, Add, Pow/Exp use lhs
    std::shared_ptr<const ArnoldiBasis> basis;
  };

  MapExpr();  // the identity z
  explicit MapExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  Op op() const { return node_->op; }
  const Node& node() const { return *node_; }
  const std::shared_ptr<const Node>& ptr() const { return node_; }

  Complex const_value() const { return node_->value; }
  const ComplexList& coefficients() const { return node_->coeffs; }
  Complex mobius_a() const { return node_->a; }
  Complex mobius_b() const { return node_->b; }
  Complex mobius_c() const { return node_->c; }
  Complex mobius_d() const { return node_->d; }
  Complex affine_scale() const { return node_->a; }
  Complex affine_shift() const { return node_->b; }
  int exponent() const { return node_->k; }
  MapExpr lhs() const { return MapExpr(node_->lhs); }
  MapExpr rhs() const { return MapExpr(node_->rhs); }
  const ArnoldiBasis& basis() const { return *node_->basis; }

  /// Polynomial degree: index of the last nonzero coefficient (Poly), or of
  /// the Arnoldi basis; 0 for Const. -1 if the node is not a polynomial node.
  int degree() const;

  /// Number of nodes in the tree (shared subtrees counted each time).
  std::size_t size() const;

 private:
  std::shared_ptr<const Node> node_;
};

// Builders ------------------------------------------------------------------

MapExpr constant(Complex c);
MapExpr var();
MapExpr poly(ComplexList coeffs);
/// (a z + b) / (c z + d); DomainError if a d - b c == 0.
MapExpr mobius(Complex a, Complex b, Complex c, Complex d);
MapExpr power(const MapExpr& inner, int k);
MapExpr compose(const MapExpr& outer, const MapExpr& inner);
MapExpr mul(const MapExpr& l, const MapExpr& r);
MapExpr add(const MapExpr& l, const MapExpr& r);
MapExpr exp_of(const MapExpr& inner);
MapExpr affine(Complex scale, Complex shift);
MapExpr arnoldi_poly(ArnoldiBasis basis);

/// Degree-2 Blaschke factor z (z - a) / (1 - conj(a) z), |a| < 1.
MapExpr blaschke_factor(Complex a);
/// Disc automorphism e^{i theta} (z - a) / (1 - conj(a) z), |a| < 1.
MapExpr disc_automorphism(Complex a, double theta = 0.0);

/// f o f o ... o f (n times); identity for n = 0.
MapExpr iterate_map(const MapExpr& f, int n);

inline MapExpr operator+(const MapExpr& l, const MapExpr& r) { return add(l, r); }
inline MapExpr operator*(const MapExpr& l, const MapExpr& r) { return mul(l, r); }
inline MapExpr operator-(const MapExpr& l, const MapExpr& r) { return add(l, mul(constant(-1.0), r)); }
inline MapExpr operator*(Complex s, const MapExpr& r) { return mul(constant(s), r); }
inline MapExpr operator+(const MapExpr& l, Complex s) { return add(l, constant(s)); }
inline MapExpr operator-(const MapExpr& l, Complex s) { return add(l, constant(-s)); }

// Evaluation ----------------------------------------------------------------

/// Relative pole tolerance for Mobius denominators.
inline constexpr double kPoleTolerance = 1e-14;

Complex eval(const MapExpr& e, Complex z);

/// Symbolic derivative (tree transformation, light constant folding only).
MapExpr derivative(const MapExpr& e);

Complex eval_deriv(const MapExpr& e, Complex z);

/// Taylor coefficients t_0..t_order of e about z0 (t_j = e^{(j)}(z0) / j!),
/// by forward propagation of truncated power series.
ComplexList taylor(const MapExpr& e, Complex z0, int order);

/// n-th derivative at z0 via taylor().
Complex nth_derivative(const MapExpr& e, Complex z0, int n);

/// Orbit [z, f(z), ..., f^n(z)]. OverflowError once |f^k(z)| > 1e150 or the
/// value stops being finite; the partial orbit (up to step k-1) is attached.
ComplexList iterate(const MapExpr& f, Complex z, int n);

/// Evaluates the map at many points, optionally in parallel; output order
/// matches input.
ComplexList eval_many(const MapExpr& e, const ComplexList& zs);

}  // namespace fatoulab
