#pragma once

#include <array>
#include <vector>

#include "platekit/mesh.hpp"
#include "platekit/poly.hpp"

namespace platekit {

// Per-element edge orientation flags: sign[j] = +1 when the CCW traversal of
// local edge j coincides with the global (low-to-high vertex id) direction.
using EdgeSigns = std::array<int, 3>;

constexpr EdgeSigns kAllPositive{1, 1, 1};

// ---------------------------------------------------------------------------
// Scalar elements. Basis polynomials live in the element's centroid-centered
// frame and are dual to the stated degrees of freedom. Edge moments are
// normalized by edge length (d t integrals over the unit parameter interval)
// and taken in the global edge direction.
// ---------------------------------------------------------------------------

struct ScalarElement {
  std::vector<Poly2> basis;
  int dim() const { return static_cast<int>(basis.size()); }
};

// Cubic element with 10 dofs:
//   [0..2]   vertex values
//   [3+2j]   edge j value moment against 1
//   [4+2j]   edge j value moment against 2t-1 (global direction)
//   [9]      mean value over the element
ScalarElement p3_element(const TriGeom& g, const EdgeSigns& signs);
std::vector<double> p3_dofs(const TriGeom& g, const EdgeSigns& signs, const Poly2& v);

// Quartic bubble-enriched cubic element with 12 dofs:
//   [0..2]   vertex values
//   [3+3j]   edge j value moment against 1
//   [4+3j]   edge j value moment against 2t-1 (global direction)
//   [5+3j]   edge j normal-derivative moment against 1 (global edge normal)
ScalarElement x4b_element(const TriGeom& g, const EdgeSigns& signs);
std::vector<double> x4b_dofs(const TriGeom& g, const EdgeSigns& signs, const Poly2& v);

// ---------------------------------------------------------------------------
// Tensor element for the mixed methods: symmetric-matrix fields spanned by
// symmetrized outer products of lowest-order and first-order Raviart-Thomas
// vector fields (dimension 15). The reduced variant constrains the linear
// part of the normal-normal trace on each edge to zero (dimension 12).
//
// Dofs (arc-length integrals; shear in the element's CCW convention, the
// 2t-1 weight in the global edge direction):
//   full:    edge j -> [4j..4j+3] = shear const, shear linear, nn const,
//            nn linear; [12+j] = corner jump at vertex j.
//   reduced: edge j -> [3j..3j+2] = shear const, shear linear, nn const;
//            [9+j] = corner jump at vertex j.
// ---------------------------------------------------------------------------

struct TensorElement {
  std::vector<TensorPoly2> basis;
  int dim() const { return static_cast<int>(basis.size()); }
};

TensorElement xddiv_element(const TriGeom& g, const EdgeSigns& signs, bool full);
std::vector<double> xddiv_dofs(const TriGeom& g, const EdgeSigns& signs, bool full,
                               const TensorPoly2& m);

// Raw basis of the 15-dimensional tensor space (element-independent,
// orthonormal coefficient vectors). Exposed for verification.
const std::vector<TensorPoly2>& xddiv_raw_basis();

// ---------------------------------------------------------------------------
// Clough-Tocher-style edge traces for the deflection-gradient multiplier of
// the mixed methods. The multiplier is determined on the skeleton by vertex
// values and gradients: its restriction to an edge is the Hermite cubic in
// those data, and its normal derivative is the linear interpolant of the
// endpoint normal derivatives.
// ---------------------------------------------------------------------------

struct HctVertexData {
  std::array<double, 3> value{};
  std::array<Vec2, 3> grad{};
};

struct EdgeTraces {
  Poly1 value;  // parameterized by the CCW traversal of the edge
  Poly1 dn;     // derivative along the element's outward normal
};

EdgeTraces hct_edge_trace(const TriGeom& g, int j, const HctVertexData& d);

}  // namespace platekit
