#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "platekit/poly.hpp"

using namespace platekit;

namespace {

Poly2 random_poly(std::mt19937& rng, int deg) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Poly2 p(deg);
  for (int a = 0; a <= deg; ++a) {
    for (int b = 0; a + b <= deg; ++b) {
      p.coeff_ref(a, b) = dist(rng);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("univariate arithmetic and integration") {
  const Poly1 p = Poly1::linear(1.0, 2.0);  // 1 + 2t
  CHECK(p(0.0) == doctest::Approx(1.0));
  CHECK(p(0.5) == doctest::Approx(2.0));

  const Poly1 q = p * p;  // 1 + 4t + 4t^2
  CHECK(q.degree() == 2);
  CHECK(q(2.0) == doctest::Approx(25.0));
  CHECK(q.integrate01() == doctest::Approx(1.0 + 2.0 + 4.0 / 3.0));

  // (2t-1)^2 integrates to 1/3.
  const Poly1 w = Poly1::linear(-1.0, 2.0);
  CHECK((w * w).integrate01() == doctest::Approx(1.0 / 3.0));

  CHECK(q.derivative()(0.25) == doctest::Approx(4.0 + 8.0 * 0.25));
}

TEST_CASE("exact triangle integration of monomials") {
  // On the reference triangle, x^a y^b integrates to a! b! / (a+b+2)!.
  const Vec2 v0{0.0, 0.0}, v1{1.0, 0.0}, v2{0.0, 1.0};
  CHECK(integrate_triangle(Poly2::monomial(4, 4), v0, v1, v2) ==
        doctest::Approx(1.0 / 6300.0).epsilon(1e-14));
  CHECK(integrate_triangle(Poly2::monomial(5, 0), v0, v1, v2) ==
        doctest::Approx(1.0 / 42.0).epsilon(1e-14));
  CHECK(integrate_triangle(Poly2::constant(3.0), v0, v1, v2) ==
        doctest::Approx(1.5).epsilon(1e-14));

  // Affine invariance: the same monomial on a shifted/scaled triangle matches
  // the substitution integral.
  const Vec2 w0{0.3, -0.2}, w1{1.1, 0.4}, w2{0.1, 0.9};
  const Poly2 m = Poly2::monomial(2, 3);
  // Substitute the affine map (x, y) -> w0 + x (w1 - w0) + y (w2 - w0).
  const Poly2 px = Poly2::affine(w0.x, w1.x - w0.x, w2.x - w0.x);
  const Poly2 py = Poly2::affine(w0.y, w1.y - w0.y, w2.y - w0.y);
  const double jac = (w1.x - w0.x) * (w2.y - w0.y) - (w2.x - w0.x) * (w1.y - w0.y);
  const double direct = integrate_triangle(m, w0, w1, w2);
  const double mapped = integrate_triangle(m.subst_affine(px, py), v0, v1, v2) * jac;
  CHECK(direct == doctest::Approx(mapped).epsilon(1e-13));
}

TEST_CASE("bivariate evaluation, shift, and restriction") {
  std::mt19937 rng(42);
  const Poly2 p = random_poly(rng, 4);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  for (int k = 0; k < 10; ++k) {
    const double x = dist(rng), y = dist(rng);
    const double sx = dist(rng), sy = dist(rng);
    CHECK(p.shifted(sx, sy)(x, y) == doctest::Approx(p(x + sx, y + sy)).epsilon(1e-12));

    const Vec2 a{dist(rng), dist(rng)}, b{dist(rng), dist(rng)};
    const double t = 0.5 * (x + 1.0);
    const Vec2 q = a + (b - a) * t;
    CHECK(p.restrict_segment(a, b)(t) == doctest::Approx(p(q)).epsilon(1e-12));
  }

  CHECK(p.dx()(0.3, -0.4) ==
        doctest::Approx((p(0.3 + 1e-7, -0.4) - p(0.3 - 1e-7, -0.4)) / 2e-7)
            .epsilon(1e-6));
  CHECK(p.dy()(0.3, -0.4) ==
        doctest::Approx((p(0.3, -0.4 + 1e-7) - p(0.3, -0.4 - 1e-7)) / 2e-7)
            .epsilon(1e-6));
}

TEST_CASE("tensor fields: hessian, divergence, frobenius") {
  std::mt19937 rng(7);
  const Poly2 u = random_poly(rng, 4);
  const TensorPoly2 h = hessian(u);
  CHECK(h.m11(0.2, 0.3) == doctest::Approx(u.dx().dx()(0.2, 0.3)).epsilon(1e-12));
  CHECK(h.m12(0.2, 0.3) == doctest::Approx(u.dx().dy()(0.2, 0.3)).epsilon(1e-12));

  // div div of the hessian is the biharmonic operator applied to u.
  const Poly2 dd = h.div_div();
  const Poly2 bih = u.dx().dx().dx().dx() + u.dx().dx().dy().dy() * 2.0 +
                    u.dy().dy().dy().dy();
  CHECK((dd - bih).max_abs_coeff() == doctest::Approx(0.0).epsilon(1e-12));

  // frobenius counts the off-diagonal entry twice.
  TensorPoly2 m;
  m.m11 = Poly2::constant(0.0);
  m.m12 = Poly2::constant(1.0);
  m.m22 = Poly2::constant(0.0);
  CHECK(m.frobenius(m)(0.0, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("material application and inverse") {
  Material c;
  // A non-trivial SPD tensor on (m11, m22, m12).
  c.k = {{{2.0, 0.3, 0.1}, {0.3, 1.5, 0.2}, {0.1, 0.2, 0.9}}};
  const Material ci = c.inverse();

  std::mt19937 rng(3);
  TensorPoly2 m;
  m.m11 = random_poly(rng, 2);
  m.m12 = random_poly(rng, 2);
  m.m22 = random_poly(rng, 2);
  const TensorPoly2 r = ci.apply(c.apply(m));
  CHECK((r.m11 - m.m11).max_abs_coeff() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((r.m12 - m.m12).max_abs_coeff() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((r.m22 - m.m22).max_abs_coeff() == doctest::Approx(0.0).epsilon(1e-12));

  CHECK(Material{}.is_identity());
  CHECK_FALSE(c.is_identity());
}
