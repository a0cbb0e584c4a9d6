#pragma once

#include <vector>

#include "platekit/mesh.hpp"
#include "platekit/poly.hpp"

namespace platekit {

// ---------------------------------------------------------------------------
// Trace extraction on element boundaries.
//
// All traces are taken from within the element, in its centroid-centered
// frame, on local edge j (opposite vertex j). The parameter t runs over
// [0, 1] along the CCW traversal (from vertex j+1 to vertex j+2). The
// element's outward normal and CCW tangent are used throughout.
// ---------------------------------------------------------------------------

// Normal-normal trace n . M n (invariant under flipping the normal).
Poly1 nn_trace(const TensorPoly2& m, const TriGeom& g, int j);

// Tangential-normal trace t . M n.
Poly1 tmn_trace(const TensorPoly2& m, const TriGeom& g, int j);

// Effective shear trace n . div M + d/ds (t . M n); d/ds is the arc-length
// derivative along the CCW traversal.
Poly1 shear_trace(const TensorPoly2& m, const TriGeom& g, int j);

// Corner jump of t . M n at vertex j of the element boundary: value on the
// CCW-incoming edge minus value on the CCW-outgoing edge at that vertex.
double corner_jump(const TensorPoly2& m, const TriGeom& g, int j);

// p(1 - t): converts between the two parameterizations of an edge.
Poly1 flip_param(const Poly1& p);

// Central-difference evaluation of the effective shear trace at parameter
// points ts (compatibility mode). Derivatives of M's entries and the
// tangential derivative of t . M n are replaced by central differences with
// physical step |E| / 1000.
std::vector<double> shear_trace_central(const TensorPoly2& m, const TriGeom& g,
                                        int j, const std::vector<double>& ts);

// ---------------------------------------------------------------------------
// Multiplier spaces on the skeleton (primal methods).
//
// Components and their pairing with a broken field v:
//   shear:  + sign(T,E) <q, v>_E            (edge-constant q, ds integral)
//   nn:     -           <q, dv/dn_T>_E      (edge-constant q)
//   corner: -  q(T, x) v|_T(x)              (per-element vertex values)
// summed over elements T and their edges/vertices. The shear component is
// stored in the global edge orientation, hence the sign flip per element.
// Corner values at an interior vertex are constrained to zero sum; the space
// is represented by explicit basis vectors of the constrained subspace.
// ---------------------------------------------------------------------------

enum class MultKind {
  ShearNnCorner,  // broken-cubic primal method
  ShearNn,        // nodal-continuous primal method
  Nn,             // continuous primal method
};

struct CornerBasisEntry {
  int tri;
  int local_vertex;
  double coeff;
};

struct MultiplierSpace {
  MultKind kind;
  int n_edges = 0;
  int sf_offset = -1;      // shear block start (one dof per edge)
  int nn_offset = -1;      // nn block start (one dof per edge)
  int corner_offset = -1;  // corner block start
  int dim = 0;
  std::vector<std::vector<CornerBasisEntry>> corner_basis;

  int sf_index(int e) const { return sf_offset < 0 ? -1 : sf_offset + e; }
  int nn_index(int e) const { return nn_offset < 0 ? -1 : nn_offset + e; }
};

MultiplierSpace build_multiplier(const Mesh& mesh, MultKind kind);

// Expected dimension by the counting formulas (cross-check).
int multiplier_dim_formula(const Mesh& mesh, MultKind kind);

}  // namespace platekit
