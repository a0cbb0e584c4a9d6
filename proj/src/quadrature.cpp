#include "platekit/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace platekit {

namespace {

void push_central(TriRule& r, double w) {
  r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

// Threefold orbit of (s, a, a) with s = 1 - 2a.
void push_orbit3(TriRule& r, double w, double a) {
  const double s = 1.0 - 2.0 * a;
  r.bary.push_back({s, a, a});
  r.bary.push_back({a, s, a});
  r.bary.push_back({a, a, s});
  for (int k = 0; k < 3; ++k) r.weights.push_back(w);
}

// Sixfold orbit of (a, b, c) with c = 1 - a - b.
void push_orbit6(TriRule& r, double w, double a, double b) {
  const double c = 1.0 - a - b;
  r.bary.push_back({a, b, c});
  r.bary.push_back({a, c, b});
  r.bary.push_back({b, a, c});
  r.bary.push_back({b, c, a});
  r.bary.push_back({c, a, b});
  r.bary.push_back({c, b, a});
  for (int k = 0; k < 6; ++k) r.weights.push_back(w);
}

}  // namespace

const TriRule& tri_rule_7() {
  static const TriRule rule = [] {
    TriRule r;
    r.degree = 5;
    const double s15 = std::sqrt(15.0);
    push_central(r, 9.0 / 40.0);
    // Orbit at (6 + sqrt(15)) / 21 with weight (155 + sqrt(15)) / 1200.
    push_orbit3(r, (155.0 + s15) / 1200.0, (6.0 + s15) / 21.0);
    // Orbit at (6 - sqrt(15)) / 21 with weight (155 - sqrt(15)) / 1200.
    push_orbit3(r, (155.0 - s15) / 1200.0, (6.0 - s15) / 21.0);
    return r;
  }();
  return rule;
}

const TriRule& tri_rule_16() {
  static const TriRule rule = [] {
    TriRule r;
    r.degree = 8;
    // Constants recovered from the degree <= 8 moment equations by a
    // 60-digit Gauss-Newton solve (max residual 1.6e-61).
    push_central(r, 0.14431560767778717);
    push_orbit3(r, 0.095091634267284625, 0.45929258829272316);
    push_orbit3(r, 0.10321737053471825, 0.17056930775176021);
    push_orbit3(r, 0.032458497623198080, 0.050547228317030975);
    push_orbit6(r, 0.027230314174434994, 0.0083947774099576053,
                0.26311282963463811);
    return r;
  }();
  return rule;
}

const TriRule& tri_rule_high() {
  static const TriRule rule = [] {
    // Collapsed tensor product of 8-point Gauss-Legendre rules:
    // x = s, y = t (1 - s) maps the unit square onto the reference triangle
    // with Jacobian (1 - s); exact for total degree 2 * 8 - 2 = 14.
    const EdgeRule gl = gauss_legendre_01(8);
    TriRule r;
    r.degree = 14;
    for (size_t i = 0; i < gl.size(); ++i) {
      for (size_t j = 0; j < gl.size(); ++j) {
        const double x = gl.t[i];
        const double y = gl.t[j] * (1.0 - gl.t[i]);
        // Normalized weights on the triangle (area factor handled by caller):
        // dx dy = (1 - s) ds dt and the reference triangle has area 1/2.
        const double w = 2.0 * gl.weights[i] * gl.weights[j] * (1.0 - gl.t[i]);
        r.bary.push_back({1.0 - x - y, x, y});
        r.weights.push_back(w);
      }
    }
    return r;
  }();
  return rule;
}

EdgeRule gauss_legendre_01(int n) {
  if (n < 1 || n > 64)
    throw std::invalid_argument("gauss_legendre_01: invalid point count");
  EdgeRule r;
  r.degree = 2 * n - 1;
  r.t.resize(static_cast<size_t>(n));
  r.weights.resize(static_cast<size_t>(n));
  // Newton iteration on Legendre polynomials over [-1, 1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) {
        p1 = x;
      }
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    // Map from [-1, 1] to [0, 1]; weights renormalized to sum to one.
    r.t[static_cast<size_t>(i)] = 0.5 * (1.0 - x);
    r.weights[static_cast<size_t>(i)] = 0.5 * w;
  }
  // Sort ascending for determinism.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (r.t[static_cast<size_t>(j)] < r.t[static_cast<size_t>(i)]) {
        std::swap(r.t[static_cast<size_t>(i)], r.t[static_cast<size_t>(j)]);
        std::swap(r.weights[static_cast<size_t>(i)],
                  r.weights[static_cast<size_t>(j)]);
      }
    }
  }
  return r;
}

const EdgeRule& edge_rule_5() {
  static const EdgeRule rule = gauss_legendre_01(5);
  return rule;
}

const EdgeRule& edge_rule_high() {
  static const EdgeRule rule = gauss_legendre_01(8);
  return rule;
}

double integrate_tri(const TriRule& rule, const Vec2& v0, const Vec2& v1,
                     const Vec2& v2, const std::function<double(Vec2)>& f) {
  const double area = 0.5 * std::abs((v1.x - v0.x) * (v2.y - v0.y) -
                                     (v2.x - v0.x) * (v1.y - v0.y));
  double s = 0.0;
  for (size_t i = 0; i < rule.size(); ++i)
    s += rule.weights[i] * f(rule.point(i, v0, v1, v2));
  return area * s;
}

double integrate_edge(const EdgeRule& rule, double edge_len,
                      const std::function<double(double)>& f) {
  double s = 0.0;
  for (size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.t[i]);
  return edge_len * s;
}

}  // namespace platekit
