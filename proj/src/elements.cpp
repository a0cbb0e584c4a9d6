#include "platekit/elements.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "platekit/skeleton.hpp"

namespace platekit {

namespace {

constexpr double kMaxDofCondition = 1e12;

Poly1 oriented(const Poly1& traversal, int sign) {
  return sign > 0 ? traversal : flip_param(traversal);
}

Poly1 weight_lin() { return Poly1::linear(-1.0, 2.0); }

// Monomial span of total degree <= deg in centered coordinates.
std::vector<Poly2> monomial_span(int deg) {
  std::vector<Poly2> out;
  for (int d = 0; d <= deg; ++d) {
    for (int b = 0; b <= d; ++b) {
      out.push_back(Poly2::monomial(d - b, b));
    }
  }
  return out;
}

// Barycentric coordinate as a polynomial in centered coordinates.
Poly2 barycentric(const TriGeom& g, int j) {
  return Poly2::affine(1.0 / 3.0, g.grad_lambda[j].x, g.grad_lambda[j].y);
}

// Dualize: given dofs(i, k) = dof_i(span_k), return basis_j = sum_k c(k, j)
// span_k with dof_i(basis_j) = delta_ij.
template <typename Field>
std::vector<Field> dualize(const Eigen::MatrixXd& dofs, const std::vector<Field>& span,
                           const char* what) {
  const int n = static_cast<int>(dofs.rows());
  if (dofs.cols() != n || static_cast<int>(span.size()) != static_cast<std::size_t>(n)) {
    throw std::logic_error(std::string(what) + ": dof matrix shape mismatch");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(dofs);
  if (!lu.isInvertible()) {
    throw std::runtime_error(std::string(what) + ": dof matrix is singular");
  }
  const Eigen::MatrixXd coeff = lu.solve(Eigen::MatrixXd::Identity(n, n));
  const double cond = dofs.cwiseAbs().rowwise().sum().maxCoeff() *
                      coeff.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(cond < kMaxDofCondition)) {
    throw std::runtime_error(std::string(what) + ": dof matrix is too ill-conditioned");
  }
  std::vector<Field> basis;
  basis.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Field b = span[0] * coeff(0, j);
    for (int k = 1; k < n; ++k) {
      b += span[static_cast<std::size_t>(k)] * coeff(k, j);
    }
    basis.push_back(b);
  }
  return basis;
}

template <typename Field, typename DofFn>
Eigen::MatrixXd dof_matrix(const std::vector<Field>& span, int ndof, const DofFn& dofs_of) {
  Eigen::MatrixXd d(ndof, static_cast<int>(span.size()));
  for (std::size_t k = 0; k < span.size(); ++k) {
    const std::vector<double> vals = dofs_of(span[k]);
    for (int i = 0; i < ndof; ++i) {
      d(i, static_cast<int>(k)) = vals[static_cast<std::size_t>(i)];
    }
  }
  return d;
}

// Coefficient packing for tensor fields with entries of total degree <= 3:
// 10 dense coefficients per component, components ordered (m11, m12, m22).
constexpr int kTensorEntryDeg = 3;
const int kCoeffsPerComp = Poly2::coeff_count(kTensorEntryDeg);

Eigen::VectorXd pack_tensor(const TensorPoly2& m) {
  Eigen::VectorXd v(3 * kCoeffsPerComp);
  const Poly2* comps[3] = {&m.m11, &m.m12, &m.m22};
  for (int c = 0; c < 3; ++c) {
    int i = 0;
    for (int d = 0; d <= kTensorEntryDeg; ++d) {
      for (int b = 0; b <= d; ++b) {
        v(c * kCoeffsPerComp + i++) = comps[c]->coeff(d - b, b);
      }
    }
  }
  return v;
}

TensorPoly2 unpack_tensor(const Eigen::VectorXd& v) {
  TensorPoly2 m{Poly2(kTensorEntryDeg), Poly2(kTensorEntryDeg), Poly2(kTensorEntryDeg)};
  Poly2* comps[3] = {&m.m11, &m.m12, &m.m22};
  for (int c = 0; c < 3; ++c) {
    int i = 0;
    for (int d = 0; d <= kTensorEntryDeg; ++d) {
      for (int b = 0; b <= d; ++b) {
        comps[c]->coeff_ref(d - b, b) = v(c * kCoeffsPerComp + i++);
      }
    }
  }
  return m;
}

std::vector<TensorPoly2> build_raw_tensor_basis() {
  // Generators of the lowest-order and first-order Raviart-Thomas spaces.
  struct VecField {
    Poly2 x, y;
  };
  const Poly2 zero = Poly2::constant(0.0);
  const Poly2 one = Poly2::constant(1.0);
  const Poly2 px = Poly2::monomial(1, 0);
  const Poly2 py = Poly2::monomial(0, 1);
  const Poly2 pxx = Poly2::monomial(2, 0);
  const Poly2 pxy = Poly2::monomial(1, 1);
  const Poly2 pyy = Poly2::monomial(0, 2);

  const std::vector<VecField> rt0 = {{one, zero}, {zero, one}, {px, py}};
  const std::vector<VecField> rt1 = {{one, zero}, {zero, one}, {px, zero}, {zero, px},
                                     {py, zero},  {zero, py},  {pxx, pxy}, {pxy, pyy}};

  Eigen::MatrixXd span(3 * kCoeffsPerComp, static_cast<int>(rt0.size() * rt1.size()));
  int col = 0;
  for (const auto& a : rt0) {
    for (const auto& b : rt1) {
      TensorPoly2 m(a.x * b.x, (a.x * b.y + a.y * b.x) * 0.5, a.y * b.y);
      span.col(col++) = pack_tensor(m);
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  if (rank != 15) {
    throw std::logic_error("tensor space has unexpected dimension");
  }
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(span.rows(), rank);
  std::vector<TensorPoly2> basis;
  basis.reserve(15);
  for (int j = 0; j < rank; ++j) {
    basis.push_back(unpack_tensor(q.col(j)));
  }
  return basis;
}

}  // namespace

const std::vector<TensorPoly2>& xddiv_raw_basis() {
  static const std::vector<TensorPoly2> raw = build_raw_tensor_basis();
  return raw;
}

std::vector<double> p3_dofs(const TriGeom& g, const EdgeSigns& signs, const Poly2& v) {
  std::vector<double> d(10, 0.0);
  for (int j = 0; j < 3; ++j) {
    d[static_cast<std::size_t>(j)] = v(g.vc[j]);
  }
  const Poly1 phi = weight_lin();
  for (int j = 0; j < 3; ++j) {
    const Poly1 tr = oriented(v.restrict_segment(g.edge_start_c(j), g.edge_end_c(j)),
                              signs[static_cast<std::size_t>(j)]);
    d[static_cast<std::size_t>(3 + 2 * j)] = tr.integrate01();
    d[static_cast<std::size_t>(4 + 2 * j)] = (tr * phi).integrate01();
  }
  d[9] = integrate_centered(v, g) / g.area;
  return d;
}

ScalarElement p3_element(const TriGeom& g, const EdgeSigns& signs) {
  const std::vector<Poly2> span = monomial_span(3);
  const Eigen::MatrixXd d =
      dof_matrix(span, 10, [&](const Poly2& v) { return p3_dofs(g, signs, v); });
  return ScalarElement{dualize(d, span, "cubic element")};
}

std::vector<double> x4b_dofs(const TriGeom& g, const EdgeSigns& signs, const Poly2& v) {
  std::vector<double> d(12, 0.0);
  for (int j = 0; j < 3; ++j) {
    d[static_cast<std::size_t>(j)] = v(g.vc[j]);
  }
  const Poly1 phi = weight_lin();
  const Poly2 vx = v.dx();
  const Poly2 vy = v.dy();
  for (int j = 0; j < 3; ++j) {
    const int s = signs[static_cast<std::size_t>(j)];
    const Poly1 tr = oriented(v.restrict_segment(g.edge_start_c(j), g.edge_end_c(j)), s);
    d[static_cast<std::size_t>(3 + 3 * j)] = tr.integrate01();
    d[static_cast<std::size_t>(4 + 3 * j)] = (tr * phi).integrate01();
    // Normal-derivative moment against the global edge normal, which is the
    // element's outward normal times the orientation sign.
    const Poly2 dn = vx * g.normal[j].x + vy * g.normal[j].y;
    const Poly1 trn = oriented(dn.restrict_segment(g.edge_start_c(j), g.edge_end_c(j)), s);
    d[static_cast<std::size_t>(5 + 3 * j)] = static_cast<double>(s) * trn.integrate01();
  }
  return d;
}

ScalarElement x4b_element(const TriGeom& g, const EdgeSigns& signs) {
  std::vector<Poly2> span = monomial_span(3);
  const Poly2 bubble = barycentric(g, 0) * barycentric(g, 1) * barycentric(g, 2);
  span.push_back(barycentric(g, 0) * bubble);
  span.push_back(barycentric(g, 1) * bubble);
  const Eigen::MatrixXd d =
      dof_matrix(span, 12, [&](const Poly2& v) { return x4b_dofs(g, signs, v); });
  return ScalarElement{dualize(d, span, "bubble-enriched element")};
}

std::vector<double> xddiv_dofs(const TriGeom& g, const EdgeSigns& signs, bool full,
                               const TensorPoly2& m) {
  const int per_edge = full ? 4 : 3;
  std::vector<double> d(static_cast<std::size_t>(3 * per_edge + 3), 0.0);
  const Poly1 phi = weight_lin();
  for (int j = 0; j < 3; ++j) {
    const int s = signs[static_cast<std::size_t>(j)];
    const double len = g.edge_len[j];
    const Poly1 sh = oriented(shear_trace(m, g, j), s);
    const Poly1 nn = oriented(nn_trace(m, g, j), s);
    d[static_cast<std::size_t>(per_edge * j + 0)] = len * sh.integrate01();
    d[static_cast<std::size_t>(per_edge * j + 1)] = len * (sh * phi).integrate01();
    d[static_cast<std::size_t>(per_edge * j + 2)] = len * nn.integrate01();
    if (full) {
      d[static_cast<std::size_t>(per_edge * j + 3)] = len * (nn * phi).integrate01();
    }
  }
  for (int j = 0; j < 3; ++j) {
    d[static_cast<std::size_t>(3 * per_edge + j)] = corner_jump(m, g, j);
  }
  return d;
}

TensorElement xddiv_element(const TriGeom& g, const EdgeSigns& signs, bool full) {
  const std::vector<TensorPoly2>& raw = xddiv_raw_basis();
  if (full) {
    const Eigen::MatrixXd d = dof_matrix(
        raw, 15, [&](const TensorPoly2& m) { return xddiv_dofs(g, signs, true, m); });
    return TensorElement{dualize(d, raw, "full tensor element")};
  }

  // Constrain the linear nn moment to zero on each edge, then dualize the
  // remaining 12 dofs on the constrained subspace.
  Eigen::MatrixXd constraints(3, 15);
  const Poly1 phi = weight_lin();
  for (int k = 0; k < 15; ++k) {
    const TensorPoly2& m = raw[static_cast<std::size_t>(k)];
    for (int j = 0; j < 3; ++j) {
      const Poly1 nn = oriented(nn_trace(m, g, j), signs[static_cast<std::size_t>(j)]);
      constraints(j, k) = g.edge_len[j] * (nn * phi).integrate01();
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(constraints);
  lu.setThreshold(1e-10);
  const Eigen::MatrixXd kernel_raw = lu.kernel();
  if (kernel_raw.cols() != 12) {
    throw std::runtime_error("reduced tensor element: unexpected constraint rank");
  }
  const Eigen::MatrixXd kernel =
      Eigen::HouseholderQR<Eigen::MatrixXd>(kernel_raw).householderQ() *
      Eigen::MatrixXd::Identity(15, 12);

  std::vector<TensorPoly2> span;
  span.reserve(12);
  for (int l = 0; l < 12; ++l) {
    TensorPoly2 m = raw[0] * kernel(0, l);
    for (int k = 1; k < 15; ++k) {
      m += raw[static_cast<std::size_t>(k)] * kernel(k, l);
    }
    span.push_back(m);
  }
  const Eigen::MatrixXd d = dof_matrix(
      span, 12, [&](const TensorPoly2& m) { return xddiv_dofs(g, signs, false, m); });
  return TensorElement{dualize(d, span, "reduced tensor element")};
}

EdgeTraces hct_edge_trace(const TriGeom& g, int j, const HctVertexData& d) {
  const int ia = (j + 1) % 3;
  const int ib = (j + 2) % 3;
  const double va = d.value[static_cast<std::size_t>(ia)];
  const double vb = d.value[static_cast<std::size_t>(ib)];
  const Vec2 ga = d.grad[static_cast<std::size_t>(ia)];
  const Vec2 gb = d.grad[static_cast<std::size_t>(ib)];
  const Vec2 t = g.tangent[j];
  const Vec2 n = g.normal[j];
  const double len = g.edge_len[j];

  // Parameter derivatives at the endpoints (arc length times tangent slope).
  const double da = len * t.dot(ga);
  const double db = len * t.dot(gb);

  // Cubic Hermite interpolant on [0,1]: value(0) = va, value(1) = vb,
  // value'(0) = da, value'(1) = db.
  const Poly1 value({va, da, -3.0 * va - 2.0 * da + 3.0 * vb - db,
                     2.0 * va + da - 2.0 * vb + db});

  // Normal derivative: linear interpolant of the endpoint values.
  const double na = n.dot(ga);
  const double nb = n.dot(gb);
  const Poly1 dn({na, nb - na});

  return EdgeTraces{value, dn};
}

}  // namespace platekit
