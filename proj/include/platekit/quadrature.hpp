#pragma once

#include <array>
#include <functional>
#include <vector>

#include "platekit/geometry.hpp"
#include "platekit/poly.hpp"

namespace platekit {

// Symmetric quadrature rule on a triangle, stored in barycentric
// coordinates with weights normalized to sum to one. The integral of f over
// a triangle T is approximated by |T| * sum_i w_i f(x_i).
struct TriRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int degree = 0;  // exact for polynomials up to this total degree

  size_t size() const { return weights.size(); }
  Vec2 point(size_t i, const Vec2& v0, const Vec2& v1, const Vec2& v2) const {
    return v0 * bary[i][0] + v1 * bary[i][1] + v2 * bary[i][2];
  }
};

// Rule on the unit interval [0, 1] with weights summing to one; the integral
// of f over an edge E is approximated by |E| * sum_i w_i f(t_i).
struct EdgeRule {
  std::vector<double> t;
  std::vector<double> weights;
  int degree = 0;

  size_t size() const { return weights.size(); }
};

// 7-point degree-5 symmetric rule (load integration).
const TriRule& tri_rule_7();
// 16-point degree-8 symmetric rule (error integration).
const TriRule& tri_rule_16();
// 64-point degree-14 collapsed tensor-Gauss rule (consistency checks).
const TriRule& tri_rule_high();

// Gauss-Legendre rule with n points mapped to [0, 1]; exact degree 2n - 1.
EdgeRule gauss_legendre_01(int n);
// 5-point rule (degree 9) used for skeleton bilinear forms.
const EdgeRule& edge_rule_5();
// 8-point rule (degree 15) used for consistency checks.
const EdgeRule& edge_rule_high();

// Quadrature of a callable over the triangle spanned by (v0, v1, v2).
double integrate_tri(const TriRule& rule, const Vec2& v0, const Vec2& v1,
                     const Vec2& v2, const std::function<double(Vec2)>& f);

// Quadrature of a callable over [0, 1] scaled by edge length.
double integrate_edge(const EdgeRule& rule, double edge_len,
                      const std::function<double(double)>& f);

}  // namespace platekit
