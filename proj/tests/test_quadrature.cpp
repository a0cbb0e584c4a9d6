#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "platekit/poly.hpp"
#include "platekit/quadrature.hpp"

using namespace platekit;

namespace {

// Exact monomial integral against which rule exactness is checked.
double exact_tri(int a, int b, const Vec2& v0, const Vec2& v1, const Vec2& v2) {
  return integrate_triangle(Poly2::monomial(a, b), v0, v1, v2);
}

void check_tri_rule_exactness(const TriRule& rule) {
  const Vec2 v0{0.12, -0.3}, v1{1.4, 0.2}, v2{0.3, 1.1};
  for (int a = 0; a <= rule.degree; ++a) {
    for (int b = 0; a + b <= rule.degree; ++b) {
      const double quad = integrate_tri(rule, v0, v1, v2, [&](Vec2 p) {
        return std::pow(p.x, a) * std::pow(p.y, b);
      });
      const double exact = exact_tri(a, b, v0, v1, v2);
      CHECK(quad == doctest::Approx(exact).epsilon(1e-11));
    }
  }
}

}  // namespace

TEST_CASE("triangle rules: weights, point locations, stated degree") {
  for (const TriRule* rule : {&tri_rule_7(), &tri_rule_16(), &tri_rule_high()}) {
    double sum = 0.0;
    for (size_t i = 0; i < rule->size(); ++i) {
      sum += rule->weights[i];
      for (double b : rule->bary[i]) {
        CHECK(b >= -1e-14);
        CHECK(b <= 1.0 + 1e-14);
      }
      CHECK(rule->bary[i][0] + rule->bary[i][1] + rule->bary[i][2] ==
            doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(tri_rule_7().size() == 7);
  CHECK(tri_rule_7().degree == 5);
  CHECK(tri_rule_16().size() == 16);
  CHECK(tri_rule_16().degree == 8);
  CHECK(tri_rule_high().degree >= 14);

  check_tri_rule_exactness(tri_rule_7());
  check_tri_rule_exactness(tri_rule_16());
  check_tri_rule_exactness(tri_rule_high());
}

TEST_CASE("sixteen-point rule reproduces the reference-triangle benchmark") {
  const Vec2 v0{0.0, 0.0}, v1{1.0, 0.0}, v2{0.0, 1.0};
  const double val = integrate_tri(tri_rule_16(), v0, v1, v2, [](Vec2 p) {
    return p.x * p.x * p.x * p.x * p.y * p.y * p.y * p.y;
  });
  CHECK(val == doctest::Approx(1.0 / 6300.0).epsilon(1e-13));
}

TEST_CASE("edge rules integrate monomials to their stated degree") {
  for (int n = 1; n <= 8; ++n) {
    const EdgeRule rule = gauss_legendre_01(n);
    CHECK(rule.degree == 2 * n - 1);
    double sum = 0.0;
    for (double w : rule.weights) {
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 0; k <= rule.degree; ++k) {
      const double quad =
          integrate_edge(rule, 1.0, [&](double t) { return std::pow(t, k); });
      CHECK(quad == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }

  // t^9 with the 5-point rule; edge length scales linearly.
  CHECK(integrate_edge(edge_rule_5(), 1.0, [](double t) { return std::pow(t, 9); }) ==
        doctest::Approx(0.1).epsilon(1e-14));
  CHECK(integrate_edge(edge_rule_5(), 3.0, [](double t) { return 1.0; }) ==
        doctest::Approx(3.0).epsilon(1e-14));
  CHECK(edge_rule_5().degree == 9);
  CHECK(edge_rule_high().degree >= 15);
}
