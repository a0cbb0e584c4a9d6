#include "platekit/skeleton.hpp"

#include <stdexcept>
#include <string>

namespace platekit {

namespace {

// a . M b as a bivariate polynomial for fixed vectors a, b.
Poly2 contract(const TensorPoly2& m, const Vec2& a, const Vec2& b) {
  return m.m11 * (a.x * b.x) + m.m12 * (a.x * b.y + a.y * b.x) + m.m22 * (a.y * b.y);
}

double contract_at(const TensorPoly2& m, const Vec2& a, const Vec2& b, const Vec2& p) {
  return a.x * b.x * m.m11(p) + (a.x * b.y + a.y * b.x) * m.m12(p) + a.y * b.y * m.m22(p);
}

}  // namespace

Poly1 nn_trace(const TensorPoly2& m, const TriGeom& g, int j) {
  const Vec2 n = g.normal[j];
  return contract(m, n, n).restrict_segment(g.edge_start_c(j), g.edge_end_c(j));
}

Poly1 tmn_trace(const TensorPoly2& m, const TriGeom& g, int j) {
  return contract(m, g.tangent[j], g.normal[j])
      .restrict_segment(g.edge_start_c(j), g.edge_end_c(j));
}

Poly1 shear_trace(const TensorPoly2& m, const TriGeom& g, int j) {
  const auto div = m.div();
  const Vec2 n = g.normal[j];
  const Poly2 ndiv = div[0] * n.x + div[1] * n.y;
  const Poly1 along = ndiv.restrict_segment(g.edge_start_c(j), g.edge_end_c(j));
  return along + tmn_trace(m, g, j).derivative() * (1.0 / g.edge_len[j]);
}

double corner_jump(const TensorPoly2& m, const TriGeom& g, int j) {
  const Vec2 x = g.vc[j];
  const int incoming = (j + 1) % 3;
  const int outgoing = (j + 2) % 3;
  return contract_at(m, g.tangent[incoming], g.normal[incoming], x) -
         contract_at(m, g.tangent[outgoing], g.normal[outgoing], x);
}

Poly1 flip_param(const Poly1& p) {
  Poly1 out = Poly1::constant(0.0);
  Poly1 power = Poly1::constant(1.0);
  const Poly1 one_minus_t = Poly1::linear(1.0, -1.0);
  for (int k = 0; k <= p.degree(); ++k) {
    out = out + power * p.coeff(k);
    power = power * one_minus_t;
  }
  return out;
}

std::vector<double> shear_trace_central(const TensorPoly2& m, const TriGeom& g,
                                        int j, const std::vector<double>& ts) {
  const Vec2 a = g.edge_start_c(j);
  const Vec2 b = g.edge_end_c(j);
  const Vec2 t = g.tangent[j];
  const Vec2 n = g.normal[j];
  const double h = g.edge_len[j] / 1000.0;

  auto tmn_at = [&](const Vec2& p) { return contract_at(m, t, n, p); };

  std::vector<double> out;
  out.reserve(ts.size());
  for (double s : ts) {
    const Vec2 x = a + (b - a) * s;
    const double d1 = (m.m11(Vec2{x.x + h, x.y}) - m.m11(Vec2{x.x - h, x.y})) / (2.0 * h) +
                      (m.m12(Vec2{x.x, x.y + h}) - m.m12(Vec2{x.x, x.y - h})) / (2.0 * h);
    const double d2 = (m.m12(Vec2{x.x + h, x.y}) - m.m12(Vec2{x.x - h, x.y})) / (2.0 * h) +
                      (m.m22(Vec2{x.x, x.y + h}) - m.m22(Vec2{x.x, x.y - h})) / (2.0 * h);
    const double dtmn = (tmn_at(x + t * h) - tmn_at(x - t * h)) / (2.0 * h);
    out.push_back(n.x * d1 + n.y * d2 + dtmn);
  }
  return out;
}

MultiplierSpace build_multiplier(const Mesh& mesh, MultKind kind) {
  MultiplierSpace sp;
  sp.kind = kind;
  sp.n_edges = mesh.num_edges();

  int offset = 0;
  if (kind == MultKind::ShearNnCorner || kind == MultKind::ShearNn) {
    sp.sf_offset = offset;
    offset += sp.n_edges;
  }
  sp.nn_offset = offset;
  offset += sp.n_edges;

  if (kind == MultKind::ShearNnCorner) {
    sp.corner_offset = offset;
    // Incidences (element, local vertex) grouped by vertex, in element order.
    std::vector<std::vector<CornerBasisEntry>> at_vertex(
        static_cast<std::size_t>(mesh.num_vertices()));
    for (int t = 0; t < mesh.num_tris(); ++t) {
      for (int lv = 0; lv < 3; ++lv) {
        const int v = mesh.tris[static_cast<std::size_t>(t)][static_cast<std::size_t>(lv)];
        at_vertex[static_cast<std::size_t>(v)].push_back({t, lv, 1.0});
      }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const auto& inc = at_vertex[static_cast<std::size_t>(v)];
      if (mesh.vertex_on_boundary[static_cast<std::size_t>(v)]) {
        // Unconstrained: one basis vector per incidence.
        for (const auto& entry : inc) {
          sp.corner_basis.push_back({entry});
        }
      } else {
        // Zero-sum constraint at interior vertices: differences of
        // consecutive incidences.
        for (std::size_t i = 0; i + 1 < inc.size(); ++i) {
          CornerBasisEntry neg = inc[i + 1];
          neg.coeff = -1.0;
          sp.corner_basis.push_back({inc[i], neg});
        }
      }
    }
    offset += static_cast<int>(sp.corner_basis.size());
  }

  sp.dim = offset;
  if (sp.dim != multiplier_dim_formula(mesh, kind)) {
    throw std::logic_error("multiplier space dimension mismatch with counting formula");
  }
  return sp;
}

int multiplier_dim_formula(const Mesh& mesh, MultKind kind) {
  const int e = mesh.num_edges();
  const int t = mesh.num_tris();
  const int n_int = mesh.num_interior_vertices();
  switch (kind) {
    case MultKind::ShearNnCorner:
      return 2 * e + 3 * t - n_int;
    case MultKind::ShearNn:
      return 2 * e;
    case MultKind::Nn:
      return e;
  }
  return 0;
}

}  // namespace platekit
