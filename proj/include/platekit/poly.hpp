#pragma once

#include <array>
#include <vector>

#include "platekit/geometry.hpp"

namespace platekit {

// Univariate polynomial with ascending coefficients: c[k] * t^k.
class Poly1 {
 public:
  Poly1() : c_(1, 0.0) {}
  explicit Poly1(std::vector<double> c);
  static Poly1 constant(double v);
  static Poly1 linear(double c0, double c1);  // c0 + c1 t

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double coeff(int k) const;
  double& coeff_ref(int k) { return c_[static_cast<size_t>(k)]; }
  const std::vector<double>& coeffs() const { return c_; }

  double operator()(double t) const;
  Poly1 derivative() const;
  double integrate01() const;  // exact integral over [0, 1]

  Poly1 operator+(const Poly1& o) const;
  Poly1 operator-(const Poly1& o) const;
  Poly1 operator*(const Poly1& o) const;
  Poly1 operator*(double s) const;

 private:
  std::vector<double> c_;
};

// Dense bivariate polynomial of bounded total degree. Coefficients are
// stored ordered by total degree, then by the y-exponent:
// index(a, b) = (a+b)(a+b+1)/2 + b for the monomial x^a y^b.
class Poly2 {
 public:
  Poly2() : deg_(0), c_(1, 0.0) {}
  explicit Poly2(int deg);
  static Poly2 constant(double v);
  static Poly2 monomial(int a, int b, double coeff = 1.0);
  // c0 + cx*x + cy*y
  static Poly2 affine(double c0, double cx, double cy);

  static int coeff_count(int deg) { return (deg + 1) * (deg + 2) / 2; }
  static int index(int a, int b) {
    const int d = a + b;
    return d * (d + 1) / 2 + b;
  }

  int degree() const { return deg_; }
  // Coefficient of x^a y^b; zero for exponents beyond the stored degree.
  double coeff(int a, int b) const;
  double& coeff_ref(int a, int b);
  const std::vector<double>& coeffs() const { return c_; }

  double operator()(double x, double y) const;
  double operator()(const Vec2& p) const { return (*this)(p.x, p.y); }

  Poly2 dx() const;
  Poly2 dy() const;

  Poly2 operator+(const Poly2& o) const;
  Poly2 operator-(const Poly2& o) const;
  Poly2 operator*(const Poly2& o) const;
  Poly2 operator*(double s) const;
  Poly2& operator+=(const Poly2& o);

  // Largest total degree with a nonzero coefficient (-1 for the zero
  // polynomial), ignoring coefficients below tol in magnitude.
  int effective_degree(double tol = 0.0) const;

  // p(x + sx, y + sy): exact coordinate shift.
  Poly2 shifted(double sx, double sy) const;

  // Substitution x <- px(s, t), y <- py(s, t) with affine px, py.
  Poly2 subst_affine(const Poly2& px, const Poly2& py) const;

  // Restriction to the segment a + t (b - a), t in [0, 1]; a, b must be in
  // the polynomial's own coordinate frame.
  Poly1 restrict_segment(const Vec2& a, const Vec2& b) const;

  // Maximum absolute coefficient.
  double max_abs_coeff() const;

 private:
  int deg_;
  std::vector<double> c_;
};

inline Poly2 operator*(double s, const Poly2& p) { return p * s; }

// Exact integral of p over the triangle (v0, v1, v2); vertices must be given
// in the polynomial's coordinate frame. Works for either orientation.
double integrate_triangle(const Poly2& p, const Vec2& v0, const Vec2& v1,
                          const Vec2& v2);

// Exact integral over the element of a polynomial expressed in the element's
// centroid-centered frame.
double integrate_centered(const Poly2& p, const TriGeom& g);

// Symmetric 2x2 tensor field with polynomial entries (m21 == m12).
struct TensorPoly2 {
  Poly2 m11, m12, m22;

  TensorPoly2() = default;
  TensorPoly2(Poly2 a11, Poly2 a12, Poly2 a22);

  TensorPoly2 operator+(const TensorPoly2& o) const;
  TensorPoly2 operator-(const TensorPoly2& o) const;
  TensorPoly2 operator*(double s) const;
  TensorPoly2& operator+=(const TensorPoly2& o);

  // Row divergence (d/dx m11 + d/dy m12, d/dx m12 + d/dy m22).
  std::array<Poly2, 2> div() const;
  // div div M = m11_xx + 2 m12_xy + m22_yy.
  Poly2 div_div() const;
  // Frobenius product M : N as a polynomial (counts m12 twice).
  Poly2 frobenius(const TensorPoly2& o) const;

  TensorPoly2 shifted(double sx, double sy) const;
  double max_abs_coeff() const;
};

// Hessian D^2 p as a symmetric tensor field.
TensorPoly2 hessian(const Poly2& p);

// Linear map on symmetric 2x2 tensors represented on the component vector
// (m11, m22, m12). Identity by default. Must be SPD with respect to the
// Frobenius inner product.
struct Material {
  std::array<std::array<double, 3>, 3> k{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  TensorPoly2 apply(const TensorPoly2& m) const;
  Material inverse() const;
  bool is_identity() const;
};

}  // namespace platekit
