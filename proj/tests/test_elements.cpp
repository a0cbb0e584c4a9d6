#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "platekit/elements.hpp"
#include "platekit/skeleton.hpp"

using namespace platekit;

namespace {

// Random CCW triangle with bounded aspect ratio, deterministic per seed.
TriGeom random_triangle(std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (;;) {
    Vec2 a{dist(rng), dist(rng)}, b{dist(rng), dist(rng)}, c{dist(rng), dist(rng)};
    const double twice_area =
        (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (twice_area < 0.0) {
      std::swap(b, c);
    }
    const double diam = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    if (std::abs(twice_area) > 0.2 * diam * diam) {
      return make_tri_geom(a, b, c);
    }
  }
}

EdgeSigns random_signs(std::mt19937& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  return {coin(rng) * 2 - 1, coin(rng) * 2 - 1, coin(rng) * 2 - 1};
}

double duality_defect_scalar(const ScalarElement& el, const TriGeom& g,
                             const EdgeSigns& signs,
                             std::vector<double> (*dofs)(const TriGeom&,
                                                         const EdgeSigns&,
                                                         const Poly2&)) {
  double worst = 0.0;
  for (int i = 0; i < el.dim(); ++i) {
    const std::vector<double> d = dofs(g, signs, el.basis[static_cast<std::size_t>(i)]);
    for (int k = 0; k < el.dim(); ++k) {
      const double target = (k == i) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(d[static_cast<std::size_t>(k)] - target));
    }
  }
  return worst;
}

double duality_defect_tensor(const TriGeom& g, const EdgeSigns& signs, bool full) {
  const TensorElement el = xddiv_element(g, signs, full);
  double worst = 0.0;
  for (int i = 0; i < el.dim(); ++i) {
    const std::vector<double> d =
        xddiv_dofs(g, signs, full, el.basis[static_cast<std::size_t>(i)]);
    for (int k = 0; k < el.dim(); ++k) {
      const double target = (k == i) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(d[static_cast<std::size_t>(k)] - target));
    }
  }
  return worst;
}

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

TEST_CASE("cubic element is unisolvent on random triangles") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const TriGeom g = random_triangle(rng);
    const EdgeSigns signs = random_signs(rng);
    const ScalarElement el = p3_element(g, signs);
    REQUIRE(el.dim() == 10);
    CHECK(duality_defect_scalar(el, g, signs, &p3_dofs) <= 1e-9);
  }
}

TEST_CASE("bubble-enriched element is unisolvent on random triangles") {
  std::mt19937 rng(102);
  for (int trial = 0; trial < 25; ++trial) {
    const TriGeom g = random_triangle(rng);
    const EdgeSigns signs = random_signs(rng);
    const ScalarElement el = x4b_element(g, signs);
    REQUIRE(el.dim() == 12);
    CHECK(duality_defect_scalar(el, g, signs, &x4b_dofs) <= 1e-9);
  }
}

TEST_CASE("tensor elements are unisolvent on random triangles") {
  std::mt19937 rng(103);
  for (int trial = 0; trial < 25; ++trial) {
    const TriGeom g = random_triangle(rng);
    const EdgeSigns signs = random_signs(rng);
    CHECK(duality_defect_tensor(g, signs, true) <= 1e-9);
    CHECK(duality_defect_tensor(g, signs, false) <= 1e-9);
  }
}

TEST_CASE("raw tensor space: dimension, symmetry, linear traces") {
  const auto& raw = xddiv_raw_basis();
  REQUIRE(raw.size() == 15);
  std::mt19937 rng(104);
  const TriGeom g = random_triangle(rng);
  for (const TensorPoly2& m : raw) {
    // Entries have total degree at most 3, the nn trace is affine in the
    // edge parameter, and div div lands in the linears.
    CHECK(m.m11.effective_degree() <= 3);
    CHECK(m.m12.effective_degree() <= 3);
    CHECK(m.m22.effective_degree() <= 3);
    for (int j = 0; j < 3; ++j) {
      const Poly1 nn = nn_trace(m, g, j);
      for (int k = 2; k <= nn.degree(); ++k) {
        CHECK(std::abs(nn.coeff(k)) <= 1e-12);
      }
    }
    const Poly2 dd = m.div_div();
    for (int a = 0; a <= dd.degree(); ++a) {
      for (int b = 0; a + b <= dd.degree(); ++b) {
        if (a + b >= 2) {
          CHECK(std::abs(dd.coeff(a, b)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("reduced tensor element has constant nn traces") {
  std::mt19937 rng(105);
  const TriGeom g = random_triangle(rng);
  const TensorElement el = xddiv_element(g, kAllPositive, false);
  REQUIRE(el.dim() == 12);
  for (const TensorPoly2& m : el.basis) {
    for (int j = 0; j < 3; ++j) {
      const Poly1 nn = nn_trace(m, g, j);
      // The affine part of the trace vanishes: nn(t) - nn(0) == 0.
      CHECK(std::abs(nn(1.0) - nn(0.0)) <= 1e-9);
      CHECK(std::abs(nn(0.5) - nn(0.0)) <= 1e-9);
    }
  }
}

TEST_CASE("gradient-multiplier traces interpolate cubic fields") {
  std::mt19937 rng(106);
  for (int trial = 0; trial < 10; ++trial) {
    const TriGeom g = random_triangle(rng);
    const Poly2 p = random_poly(rng, 3);  // centered frame
    HctVertexData d;
    for (int k = 0; k < 3; ++k) {
      d.value[static_cast<std::size_t>(k)] = p(g.vc[static_cast<std::size_t>(k)]);
      d.grad[static_cast<std::size_t>(k)] =
          Vec2{p.dx()(g.vc[static_cast<std::size_t>(k)]),
               p.dy()(g.vc[static_cast<std::size_t>(k)])};
    }
    for (int j = 0; j < 3; ++j) {
      const EdgeTraces tr = hct_edge_trace(g, j, d);
      // The value trace of a cubic is the Hermite interpolant of its own
      // endpoint data, hence reproduced exactly.
      const Poly1 exact = p.restrict_segment(g.edge_start_c(j), g.edge_end_c(j));
      for (double t : {0.0, 0.3, 0.7, 1.0}) {
        CHECK(tr.value(t) == doctest::Approx(exact(t)).epsilon(1e-10));
      }
      // The normal-derivative trace is linear and matches at the endpoints.
      CHECK(tr.dn.degree() <= 1);
      const Vec2 n = g.normal[static_cast<std::size_t>(j)];
      const int ia = (j + 1) % 3, ib = (j + 2) % 3;
      CHECK(tr.dn(0.0) ==
            doctest::Approx(n.dot(d.grad[static_cast<std::size_t>(ia)])).epsilon(1e-10));
      CHECK(tr.dn(1.0) ==
            doctest::Approx(n.dot(d.grad[static_cast<std::size_t>(ib)])).epsilon(1e-10));
    }
  }
}

TEST_CASE("edge orientation flags only flip the odd edge moments") {
  std::mt19937 rng(107);
  const TriGeom g = random_triangle(rng);
  const Poly2 p = random_poly(rng, 3);
  const std::vector<double> plus = p3_dofs(g, kAllPositive, p);
  const std::vector<double> minus = p3_dofs(g, {-1, -1, -1}, p);
  for (int j = 0; j < 3; ++j) {
    // Mean value moments are orientation-independent...
    CHECK(plus[static_cast<std::size_t>(3 + 2 * j)] ==
          doctest::Approx(minus[static_cast<std::size_t>(3 + 2 * j)]).epsilon(1e-12));
    // ...while the first moments change sign with the direction.
    CHECK(plus[static_cast<std::size_t>(4 + 2 * j)] ==
          doctest::Approx(-minus[static_cast<std::size_t>(4 + 2 * j)]).epsilon(1e-12));
  }
}
