#include "platekit/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace platekit {

namespace {

constexpr int kMaxDeg = 40;

// fact_table[a][b] = integral over the unit reference triangle of x^a y^b
//                  = a! b! / (a + b + 2)!.
const std::array<std::array<double, kMaxDeg + 1>, kMaxDeg + 1>& fact_table() {
  static const auto table = [] {
    std::array<std::array<double, kMaxDeg + 1>, kMaxDeg + 1> t{};
    for (int a = 0; a <= kMaxDeg; ++a) {
      for (int b = 0; a + b <= kMaxDeg; ++b) {
        // a! b! / (a+b+2)! evaluated stably as a product of ratios.
        double v = 1.0;
        // v = prod_{k=1..b} k / (a + k)  gives a! b! / (a+b)!
        for (int k = 1; k <= b; ++k) v *= static_cast<double>(k) / (a + k);
        v /= static_cast<double>(a + b + 1) * (a + b + 2);
        t[static_cast<size_t>(a)][static_cast<size_t>(b)] = v;
      }
    }
    return t;
  }();
  return table;
}

}  // namespace

Poly1::Poly1(std::vector<double> c) : c_(std::move(c)) {
  if (c_.empty()) c_.push_back(0.0);
}

Poly1 Poly1::constant(double v) { return Poly1(std::vector<double>{v}); }

Poly1 Poly1::linear(double c0, double c1) {
  return Poly1(std::vector<double>{c0, c1});
}

double Poly1::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return 0.0;
  return c_[static_cast<size_t>(k)];
}

double Poly1::operator()(double t) const {
  double r = 0.0;
  for (size_t k = c_.size(); k-- > 0;) r = r * t + c_[k];
  return r;
}

Poly1 Poly1::derivative() const {
  if (c_.size() <= 1) return Poly1();
  std::vector<double> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k)
    d[k - 1] = static_cast<double>(k) * c_[k];
  return Poly1(std::move(d));
}

double Poly1::integrate01() const {
  double s = 0.0;
  for (size_t k = c_.size(); k-- > 0;) s += c_[k] / static_cast<double>(k + 1);
  return s;
}

Poly1 Poly1::operator+(const Poly1& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return Poly1(std::move(r));
}

Poly1 Poly1::operator-(const Poly1& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] -= o.c_[k];
  return Poly1(std::move(r));
}

Poly1 Poly1::operator*(const Poly1& o) const {
  std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0.0) continue;
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  return Poly1(std::move(r));
}

Poly1 Poly1::operator*(double s) const {
  std::vector<double> r(c_);
  for (double& v : r) v *= s;
  return Poly1(std::move(r));
}

Poly2::Poly2(int deg) : deg_(deg), c_(coeff_count(deg), 0.0) {
  if (deg < 0 || deg > kMaxDeg)
    throw std::invalid_argument("Poly2: degree out of range");
}

Poly2 Poly2::constant(double v) {
  Poly2 p(0);
  p.c_[0] = v;
  return p;
}

Poly2 Poly2::monomial(int a, int b, double coeff) {
  Poly2 p(a + b);
  p.c_[static_cast<size_t>(index(a, b))] = coeff;
  return p;
}

Poly2 Poly2::affine(double c0, double cx, double cy) {
  Poly2 p(1);
  p.c_[static_cast<size_t>(index(0, 0))] = c0;
  p.c_[static_cast<size_t>(index(1, 0))] = cx;
  p.c_[static_cast<size_t>(index(0, 1))] = cy;
  return p;
}

double Poly2::coeff(int a, int b) const {
  if (a < 0 || b < 0 || a + b > deg_) return 0.0;
  return c_[static_cast<size_t>(index(a, b))];
}

double& Poly2::coeff_ref(int a, int b) {
  if (a < 0 || b < 0 || a + b > deg_)
    throw std::out_of_range("Poly2::coeff_ref: exponent beyond degree");
  return c_[static_cast<size_t>(index(a, b))];
}

double Poly2::operator()(double x, double y) const {
  // Evaluate via power tables.
  std::array<double, kMaxDeg + 1> xp, yp;
  xp[0] = yp[0] = 1.0;
  for (int k = 1; k <= deg_; ++k) {
    xp[static_cast<size_t>(k)] = xp[static_cast<size_t>(k - 1)] * x;
    yp[static_cast<size_t>(k)] = yp[static_cast<size_t>(k - 1)] * y;
  }
  double s = 0.0;
  int i = 0;
  for (int d = 0; d <= deg_; ++d) {
    for (int b = 0; b <= d; ++b, ++i) {
      const double c = c_[static_cast<size_t>(i)];
      if (c != 0.0)
        s += c * xp[static_cast<size_t>(d - b)] * yp[static_cast<size_t>(b)];
    }
  }
  return s;
}

Poly2 Poly2::dx() const {
  Poly2 r(std::max(0, deg_ - 1));
  for (int d = 1; d <= deg_; ++d) {
    for (int b = 0; b <= d; ++b) {
      const int a = d - b;
      if (a == 0) continue;
      const double c = c_[static_cast<size_t>(index(a, b))];
      if (c != 0.0) r.c_[static_cast<size_t>(index(a - 1, b))] += a * c;
    }
  }
  return r;
}

Poly2 Poly2::dy() const {
  Poly2 r(std::max(0, deg_ - 1));
  for (int d = 1; d <= deg_; ++d) {
    for (int b = 1; b <= d; ++b) {
      const int a = d - b;
      const double c = c_[static_cast<size_t>(index(a, b))];
      if (c != 0.0) r.c_[static_cast<size_t>(index(a, b - 1))] += b * c;
    }
  }
  return r;
}

Poly2 Poly2::operator+(const Poly2& o) const {
  Poly2 r(std::max(deg_, o.deg_));
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r.c_[i] += o.c_[i];
  return r;
}

Poly2 Poly2::operator-(const Poly2& o) const {
  Poly2 r(std::max(deg_, o.deg_));
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r.c_[i] -= o.c_[i];
  return r;
}

Poly2& Poly2::operator+=(const Poly2& o) {
  if (o.deg_ > deg_) {
    *this = *this + o;
  } else {
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  }
  return *this;
}

Poly2 Poly2::operator*(const Poly2& o) const {
  Poly2 r(deg_ + o.deg_);
  int i = 0;
  for (int d1 = 0; d1 <= deg_; ++d1) {
    for (int b1 = 0; b1 <= d1; ++b1, ++i) {
      const double c1 = c_[static_cast<size_t>(i)];
      if (c1 == 0.0) continue;
      const int a1 = d1 - b1;
      int j = 0;
      for (int d2 = 0; d2 <= o.deg_; ++d2) {
        for (int b2 = 0; b2 <= d2; ++b2, ++j) {
          const double c2 = o.c_[static_cast<size_t>(j)];
          if (c2 == 0.0) continue;
          r.c_[static_cast<size_t>(index(a1 + (d2 - b2), b1 + b2))] += c1 * c2;
        }
      }
    }
  }
  return r;
}

Poly2 Poly2::operator*(double s) const {
  Poly2 r(*this);
  for (double& v : r.c_) v *= s;
  return r;
}

int Poly2::effective_degree(double tol) const {
  int i = 0;
  int eff = -1;
  for (int d = 0; d <= deg_; ++d) {
    for (int b = 0; b <= d; ++b, ++i) {
      if (std::abs(c_[static_cast<size_t>(i)]) > tol) eff = d;
    }
  }
  return eff;
}

Poly2 Poly2::shifted(double sx, double sy) const {
  return subst_affine(Poly2::affine(sx, 1.0, 0.0), Poly2::affine(sy, 0.0, 1.0));
}

Poly2 Poly2::subst_affine(const Poly2& px, const Poly2& py) const {
  if (px.degree() > 1 || py.degree() > 1)
    throw std::invalid_argument("subst_affine: substitution must be affine");
  // Power tables for px and py.
  std::vector<Poly2> xp(static_cast<size_t>(deg_) + 1);
  std::vector<Poly2> yp(static_cast<size_t>(deg_) + 1);
  xp[0] = Poly2::constant(1.0);
  yp[0] = Poly2::constant(1.0);
  for (int k = 1; k <= deg_; ++k) {
    xp[static_cast<size_t>(k)] = xp[static_cast<size_t>(k - 1)] * px;
    yp[static_cast<size_t>(k)] = yp[static_cast<size_t>(k - 1)] * py;
  }
  Poly2 r(deg_);
  int i = 0;
  for (int d = 0; d <= deg_; ++d) {
    for (int b = 0; b <= d; ++b, ++i) {
      const double c = c_[static_cast<size_t>(i)];
      if (c == 0.0) continue;
      r += (xp[static_cast<size_t>(d - b)] * yp[static_cast<size_t>(b)]) * c;
    }
  }
  return r;
}

Poly1 Poly2::restrict_segment(const Vec2& a, const Vec2& b) const {
  const Poly1 xt = Poly1::linear(a.x, b.x - a.x);
  const Poly1 yt = Poly1::linear(a.y, b.y - a.y);
  std::vector<Poly1> xp(static_cast<size_t>(deg_) + 1, Poly1::constant(1.0));
  std::vector<Poly1> yp(static_cast<size_t>(deg_) + 1, Poly1::constant(1.0));
  for (int k = 1; k <= deg_; ++k) {
    xp[static_cast<size_t>(k)] = xp[static_cast<size_t>(k - 1)] * xt;
    yp[static_cast<size_t>(k)] = yp[static_cast<size_t>(k - 1)] * yt;
  }
  Poly1 r;
  int i = 0;
  for (int d = 0; d <= deg_; ++d) {
    for (int b2 = 0; b2 <= d; ++b2, ++i) {
      const double c = c_[static_cast<size_t>(i)];
      if (c == 0.0) continue;
      r = r + (xp[static_cast<size_t>(d - b2)] * yp[static_cast<size_t>(b2)]) * c;
    }
  }
  return r;
}

double Poly2::max_abs_coeff() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

double integrate_triangle(const Poly2& p, const Vec2& v0, const Vec2& v1,
                          const Vec2& v2) {
  const double jac = (v1.x - v0.x) * (v2.y - v0.y) - (v2.x - v0.x) * (v1.y - v0.y);
  const Poly2 px = Poly2::affine(v0.x, v1.x - v0.x, v2.x - v0.x);
  const Poly2 py = Poly2::affine(v0.y, v1.y - v0.y, v2.y - v0.y);
  const Poly2 q = p.subst_affine(px, py);
  const auto& ft = fact_table();
  double s = 0.0;
  int i = 0;
  for (int d = 0; d <= q.degree(); ++d) {
    for (int b = 0; b <= d; ++b, ++i) {
      const double c = q.coeffs()[static_cast<size_t>(i)];
      if (c != 0.0)
        s += c * ft[static_cast<size_t>(d - b)][static_cast<size_t>(b)];
    }
  }
  return std::abs(jac) * s;
}

double integrate_centered(const Poly2& p, const TriGeom& g) {
  return integrate_triangle(p, g.vc[0], g.vc[1], g.vc[2]);
}

TensorPoly2::TensorPoly2(Poly2 a11, Poly2 a12, Poly2 a22)
    : m11(std::move(a11)), m12(std::move(a12)), m22(std::move(a22)) {}

TensorPoly2 TensorPoly2::operator+(const TensorPoly2& o) const {
  return {m11 + o.m11, m12 + o.m12, m22 + o.m22};
}

TensorPoly2 TensorPoly2::operator-(const TensorPoly2& o) const {
  return {m11 - o.m11, m12 - o.m12, m22 - o.m22};
}

TensorPoly2 TensorPoly2::operator*(double s) const {
  return {m11 * s, m12 * s, m22 * s};
}

TensorPoly2& TensorPoly2::operator+=(const TensorPoly2& o) {
  m11 += o.m11;
  m12 += o.m12;
  m22 += o.m22;
  return *this;
}

std::array<Poly2, 2> TensorPoly2::div() const {
  return {m11.dx() + m12.dy(), m12.dx() + m22.dy()};
}

Poly2 TensorPoly2::div_div() const {
  return m11.dx().dx() + (m12.dx().dy() * 2.0) + m22.dy().dy();
}

Poly2 TensorPoly2::frobenius(const TensorPoly2& o) const {
  return m11 * o.m11 + (m12 * o.m12) * 2.0 + m22 * o.m22;
}

TensorPoly2 TensorPoly2::shifted(double sx, double sy) const {
  return {m11.shifted(sx, sy), m12.shifted(sx, sy), m22.shifted(sx, sy)};
}

double TensorPoly2::max_abs_coeff() const {
  return std::max({m11.max_abs_coeff(), m12.max_abs_coeff(),
                   m22.max_abs_coeff()});
}

TensorPoly2 hessian(const Poly2& p) {
  const Poly2 px = p.dx();
  const Poly2 py = p.dy();
  return {px.dx(), px.dy(), py.dy()};
}

TensorPoly2 Material::apply(const TensorPoly2& m) const {
  // Component vector ordering: (m11, m22, m12).
  auto row = [&](int i) {
    return m.m11 * k[static_cast<size_t>(i)][0] +
           m.m22 * k[static_cast<size_t>(i)][1] +
           m.m12 * k[static_cast<size_t>(i)][2];
  };
  return {row(0), row(2), row(1)};
}

Material Material::inverse() const {
  const auto& a = k;
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (std::abs(det) < 1e-300)
    throw std::runtime_error("Material::inverse: singular material tensor");
  Material r;
  r.k[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  r.k[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  r.k[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  r.k[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  r.k[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  r.k[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  r.k[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  r.k[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  r.k[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return r;
}

bool Material::is_identity() const {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (k[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
          (i == j ? 1.0 : 0.0))
        return false;
  return true;
}

TriGeom make_tri_geom(const Vec2& a, const Vec2& b, const Vec2& c) {
  TriGeom g;
  g.v = {a, b, c};
  const double signed_area =
      0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  if (!(signed_area > 0.0))
    throw std::runtime_error(
        "make_tri_geom: triangle is degenerate or clockwise");
  g.area = signed_area;
  g.centroid = (a + b + c) / 3.0;
  for (int j = 0; j < 3; ++j) g.vc[static_cast<size_t>(j)] = g.v[static_cast<size_t>(j)] - g.centroid;
  for (int j = 0; j < 3; ++j) {
    const Vec2 p = g.v[static_cast<size_t>((j + 1) % 3)];
    const Vec2 q = g.v[static_cast<size_t>((j + 2) % 3)];
    const Vec2 d = q - p;
    const double len = d.norm();
    g.edge_len[static_cast<size_t>(j)] = len;
    g.tangent[static_cast<size_t>(j)] = d / len;
    g.normal[static_cast<size_t>(j)] = rotate_cw(g.tangent[static_cast<size_t>(j)]);
    // grad lambda_j = rotate_cw(v_{j+1} - v_{j+2}) / (2 area)
    g.grad_lambda[static_cast<size_t>(j)] = rotate_cw(p - q) / (2.0 * signed_area);
  }
  g.diameter = std::max({g.edge_len[0], g.edge_len[1], g.edge_len[2]});
  return g;
}

}  // namespace platekit
