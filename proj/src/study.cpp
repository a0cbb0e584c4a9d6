#include "platekit/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "platekit/parallel.hpp"
#include "platekit/quadrature.hpp"

namespace platekit {

namespace {

// g(t) = t^2 (1 - t)^2 as a univariate factor along one axis.
Poly2 clamped_factor(bool along_x) {
  Poly2 p(4);
  auto set = [&](int k, double c) {
    if (along_x) {
      p.coeff_ref(k, 0) = c;
    } else {
      p.coeff_ref(0, k) = c;
    }
  };
  set(2, 1.0);
  set(3, -2.0);
  set(4, 1.0);
  return p;
}

double frob_sq_at(const TensorPoly2& m, const Vec2& q) {
  const double a = m.m11(q);
  const double b = m.m12(q);
  const double c = m.m22(q);
  return a * a + 2.0 * b * b + c * c;
}

// Constant symmetric gradient of the element's linear gradient-interpolant.
struct ConstTensor {
  double m11 = 0.0, m12 = 0.0, m22 = 0.0;
};

ConstTensor gradient_interpolant_strain(const TriGeom& g, const HctVertexData& psi) {
  ConstTensor e;
  for (int lv = 0; lv < 3; ++lv) {
    const Vec2 gl = g.grad_lambda[lv];
    const Vec2 gv = psi.grad[static_cast<std::size_t>(lv)];
    e.m11 += gl.x * gv.x;
    e.m22 += gl.y * gv.y;
    e.m12 += 0.5 * (gl.x * gv.y + gl.y * gv.x);
  }
  return e;
}

std::string table_label(const StudyTable& t) {
  std::string name = method_name(t.method);
  if (t.opts.full_ddiv) {
    name += "+full-ddiv";
  }
  return name;
}

}  // namespace

ManufacturedCase manufactured_case() {
  ManufacturedCase mc;
  mc.u = clamped_factor(true) * clamped_factor(false);
  mc.material = Material{};
  mc.load = mc.material.apply(hessian(mc.u)).div_div();

  // Construction-time sanity: clamped boundary data and the load identity.
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (const Vec2 p : {Vec2{s, 0.0}, Vec2{s, 1.0}, Vec2{0.0, s}, Vec2{1.0, s}}) {
      const double val = mc.u(p);
      const double dn = std::abs(mc.u.dx()(p)) + std::abs(mc.u.dy()(p));
      if (std::abs(val) > 1e-14 || dn > 1e-14) {
        throw std::logic_error("manufactured deflection is not clamped");
      }
    }
  }
  const Poly2 check = mc.material.apply(hessian(mc.u)).div_div() - mc.load;
  if (check.max_abs_coeff() > 1e-12) {
    throw std::logic_error("manufactured load mismatch");
  }
  return mc;
}

ErrorReport compute_errors(const Discretization& disc, const Eigen::VectorXd& x,
                           const ManufacturedCase& mc) {
  return compute_errors(disc, expand_solution(disc, x), mc);
}

ErrorReport compute_errors(const Discretization& disc, const SolutionFields& sol,
                           const ManufacturedCase& mc) {
  const Mesh& mesh = *disc.mesh;
  const int t_count = mesh.num_tris();
  const bool primal = is_primal(disc.method);
  const TriRule& rule = tri_rule_16();

  // Per-element squared contributions: {u, hess, m, divdiv, hess_recon}.
  std::vector<std::array<double, 5>> parts(static_cast<std::size_t>(t_count),
                                           {0.0, 0.0, 0.0, 0.0, 0.0});
  parallel_for(t_count, [&](int t) {
    const TriGeom& g = disc.geoms[static_cast<std::size_t>(t)];
    const Poly2 u_loc = mc.u.shifted(g.centroid.x, g.centroid.y);
    auto& out = parts[static_cast<std::size_t>(t)];
    if (primal) {
      const Poly2 du = u_loc - sol.u[static_cast<std::size_t>(t)];
      const TensorPoly2 dh = hessian(du);
      out[0] = integrate_tri(rule, g.v[0], g.v[1], g.v[2], [&](Vec2 p) {
        const double d = du(p - g.centroid);
        return d * d;
      });
      out[1] = integrate_tri(rule, g.v[0], g.v[1], g.v[2],
                             [&](Vec2 p) { return frob_sq_at(dh, p - g.centroid); });
    } else {
      const Poly2 f_loc = mc.load.shifted(g.centroid.x, g.centroid.y);
      const TensorPoly2 m_exact = disc.material.apply(hessian(u_loc));
      const TensorPoly2 dm = m_exact - sol.m[static_cast<std::size_t>(t)];
      const auto& c = sol.u_lin[static_cast<std::size_t>(t)];
      Poly2 uh = Poly2::affine(
          (c[0] + c[1] + c[2]) / 3.0,
          c[0] * g.grad_lambda[0].x + c[1] * g.grad_lambda[1].x + c[2] * g.grad_lambda[2].x,
          c[0] * g.grad_lambda[0].y + c[1] * g.grad_lambda[1].y + c[2] * g.grad_lambda[2].y);
      const Poly2 du = u_loc - uh;
      const Poly2 ddr = f_loc - sol.m[static_cast<std::size_t>(t)].div_div();
      const ConstTensor eps =
          gradient_interpolant_strain(g, sol.psi[static_cast<std::size_t>(t)]);
      const TensorPoly2 hess_u = hessian(u_loc);
      out[0] = integrate_tri(rule, g.v[0], g.v[1], g.v[2], [&](Vec2 p) {
        const double d = du(p - g.centroid);
        return d * d;
      });
      out[2] = integrate_tri(rule, g.v[0], g.v[1], g.v[2],
                             [&](Vec2 p) { return frob_sq_at(dm, p - g.centroid); });
      out[3] = integrate_tri(rule, g.v[0], g.v[1], g.v[2], [&](Vec2 p) {
        const double d = ddr(p - g.centroid);
        return d * d;
      });
      out[4] = integrate_tri(rule, g.v[0], g.v[1], g.v[2], [&](Vec2 p) {
        const Vec2 q = p - g.centroid;
        const double d11 = hess_u.m11(q) - eps.m11;
        const double d12 = hess_u.m12(q) - eps.m12;
        const double d22 = hess_u.m22(q) - eps.m22;
        return d11 * d11 + 2.0 * d12 * d12 + d22 * d22;
      });
    }
  });

  double sq_u = 0.0, sq_hess = 0.0, sq_m = 0.0, sq_dd = 0.0, sq_recon = 0.0;
  for (const auto& p : parts) {
    sq_u += p[0];
    sq_hess += p[1];
    sq_m += p[2];
    sq_dd += p[3];
    sq_recon += p[4];
  }

  ErrorReport rep;
  rep.err_u = std::sqrt(sq_u);
  if (primal) {
    rep.err_hess = std::sqrt(sq_hess);
    // Skeleton errors against the exact traces, one-sided (the exact moment
    // tensor is smooth).
    const EdgeRule& erule = edge_rule_5();
    double sq_sf = 0.0, sq_nn = 0.0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const int t0 = mesh.edge_tris[static_cast<std::size_t>(e)][0];
      const TriGeom& g = disc.geoms[static_cast<std::size_t>(t0)];
      int j = -1;
      for (int jj = 0; jj < 3; ++jj) {
        if (mesh.tri_edges[static_cast<std::size_t>(t0)][static_cast<std::size_t>(jj)] == e) {
          j = jj;
        }
      }
      const Poly2 u_loc = mc.u.shifted(g.centroid.x, g.centroid.y);
      const TensorPoly2 m_exact = disc.material.apply(hessian(u_loc));
      const double len = g.edge_len[j];
      if (!sol.mult_sf.empty()) {
        const double sigma = static_cast<double>(
            mesh.tri_edge_sign[static_cast<std::size_t>(t0)][static_cast<std::size_t>(j)]);
        const Poly1 sh = shear_trace(m_exact, g, j) * sigma;
        const double q = sol.mult_sf[static_cast<std::size_t>(e)];
        sq_sf += len * len * len *
                 integrate_edge(erule, len, [&](double t) {
                   const double d = sh(t) - q;
                   return d * d;
                 });
      }
      const Poly1 nn = nn_trace(m_exact, g, j);
      const double q = sol.mult_nn[static_cast<std::size_t>(e)];
      sq_nn += len * integrate_edge(erule, len, [&](double t) {
        const double d = nn(t) - q;
        return d * d;
      });
    }
    if (!sol.mult_sf.empty()) {
      rep.err_shear_w = std::sqrt(sq_sf);
    }
    rep.err_nn_w = std::sqrt(sq_nn);
  } else {
    rep.err_m = std::sqrt(sq_m);
    rep.err_divdiv = std::sqrt(sq_dd);
    rep.err_hess_recon = std::sqrt(sq_recon);
  }
  return rep;
}

std::optional<double> error_by_name(const ErrorReport& e, const std::string& name) {
  if (name == "err_u") return e.err_u;
  if (name == "err_hess") return e.err_hess;
  if (name == "err_M") return e.err_m;
  if (name == "err_divdiv") return e.err_divdiv;
  if (name == "err_shear_w") return e.err_shear_w;
  if (name == "err_nn_w") return e.err_nn_w;
  if (name == "err_hess_recon") return e.err_hess_recon;
  throw std::invalid_argument("unknown error field '" + name + "'");
}

StudyTable run_convergence(Method method, const std::vector<int>& levels,
                           MethodOptions opts) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) {
      throw std::invalid_argument("mesh level must be positive");
    }
    if (i > 0 && levels[i] != 2 * levels[i - 1]) {
      throw std::invalid_argument("mesh levels must double");
    }
  }
  const ManufacturedCase mc = manufactured_case();
  StudyTable table;
  table.method = method;
  table.opts = opts;
  for (int n : levels) {
    const Mesh mesh = build_uniform_square(n);
    const Discretization disc = discretize(mesh, method, opts, mc.material);
    const SaddleSystem sys = assemble(disc, mc.load);
    StudyRow row;
    row.n_tris = mesh.num_tris();
    row.h = mesh.mesh_size_parameter();
    const Eigen::VectorXd x = solve_saddle(
        sys, method_name(method) + " on the " + std::to_string(row.n_tris) +
                 "-element mesh",
        &row.solve);
    row.errors = compute_errors(disc, x, mc);
    table.rows.push_back(std::move(row));
  }
  return table;
}

double eoc(double e0, double h0, double e1, double h1) {
  return std::log(e0 / e1) / std::log(h0 / h1);
}

const std::vector<ReferenceCurve>& reference_table() {
  static const std::vector<ReferenceCurve> table = {
      {Method::PrimalNodal,
       {0.900e-03, 0.921e-04, 0.176e-04, 0.396e-05, 0.955e-06, 0.236e-06}},
      {Method::PrimalCont,
       {0.871e-03, 0.426e-04, 0.130e-04, 0.326e-05, 0.815e-06, 0.204e-06}},
      {Method::MixedHybrid,
       {0.557e-03, 0.215e-03, 0.579e-04, 0.146e-04, 0.361e-05, 0.896e-06}},
      {Method::MixedNN,
       {0.640e-03, 0.897e-04, 0.269e-04, 0.675e-05, 0.169e-05, 0.424e-06}},
  };
  return table;
}

double max_reference_deviation(const StudyTable& table) {
  const ReferenceCurve* curve = nullptr;
  for (const auto& c : reference_table()) {
    if (c.method == table.method) {
      curve = &c;
    }
  }
  if (curve == nullptr || table.opts.full_ddiv) {
    throw std::invalid_argument("no published deflection errors for " +
                                table_label(table));
  }
  double worst = 0.0;
  for (const StudyRow& row : table.rows) {
    for (std::size_t k = 0; k < kReferenceSizes.size(); ++k) {
      if (kReferenceSizes[k] == row.n_tris) {
        const double ref = curve->err_u[k];
        worst = std::max(worst, std::abs(row.errors.err_u - ref) / ref);
      }
    }
  }
  return worst;
}

const std::vector<std::string>& error_column_names() {
  static const std::vector<std::string> cols = {
      "err_u",       "err_hess", "err_M",         "err_divdiv",
      "err_shear_w", "err_nn_w", "err_hess_recon"};
  return cols;
}

namespace {

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

}  // namespace

void write_csv(const std::vector<StudyTable>& tables, const std::string& path,
               bool compare_paper) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << "method,N,h,err_u,err_hess,err_M,err_divdiv,err_shear_w,err_nn_w,"
         "err_hess_recon,eoc_u";
  if (compare_paper) {
    out << ",dev_u_paper";
  }
  out << '\n';
  for (const StudyTable& table : tables) {
    const ReferenceCurve* curve = nullptr;
    if (compare_paper && !table.opts.full_ddiv) {
      for (const auto& c : reference_table()) {
        if (c.method == table.method) {
          curve = &c;
        }
      }
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const StudyRow& row = table.rows[r];
      out << table_label(table) << ',' << row.n_tris << ',' << fmt_sci(row.h);
      for (const std::string& col : error_column_names()) {
        const std::optional<double> v = error_by_name(row.errors, col);
        out << ',';
        if (v.has_value()) {
          out << fmt_sci(*v);
        }
      }
      out << ',';
      if (r > 0) {
        const StudyRow& prev = table.rows[r - 1];
        out << fmt_sci(eoc(prev.errors.err_u, prev.h, row.errors.err_u, row.h));
      }
      if (compare_paper) {
        out << ',';
        if (curve != nullptr) {
          for (std::size_t k = 0; k < kReferenceSizes.size(); ++k) {
            if (kReferenceSizes[k] == row.n_tris) {
              out << fmt_sci(std::abs(row.errors.err_u - curve->err_u[k]) /
                             curve->err_u[k]);
            }
          }
        }
      }
      out << '\n';
    }
  }
  if (!out) {
    throw std::runtime_error("failed while writing '" + path + "'");
  }
}

void write_svg_plot(const std::vector<StudyTable>& tables, const std::string& path) {
  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;  // (h, err)
  };
  std::vector<Series> series;
  for (const StudyTable& table : tables) {
    for (const std::string& col : error_column_names()) {
      Series s;
      s.label = table_label(table) + " " + col;
      for (const StudyRow& row : table.rows) {
        const std::optional<double> v = error_by_name(row.errors, col);
        if (v.has_value() && *v > 0.0) {
          s.pts.emplace_back(row.h, *v);
        }
      }
      if (!s.pts.empty()) {
        series.push_back(std::move(s));
      }
    }
  }
  if (series.empty()) {
    throw std::invalid_argument("no error data to plot");
  }

  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  for (const auto& s : series) {
    for (const auto& [h, e] : s.pts) {
      lx0 = std::min(lx0, std::log10(h));
      lx1 = std::max(lx1, std::log10(h));
      ly0 = std::min(ly0, std::log10(e));
      ly1 = std::max(ly1, std::log10(e));
    }
  }
  // Make room for the reference slopes below the data.
  ly0 -= 0.5;
  ly1 += 0.3;
  lx0 -= 0.15;
  lx1 += 0.15;

  const double width = 720, height = 540;
  const double ml = 70, mr = 20, mt = 20, mb = 50;
  auto px = [&](double lh) {
    return ml + (lh - lx0) / (lx1 - lx0) * (width - ml - mr);
  };
  auto py = [&](double le) {
    return height - mb - (le - ly0) / (ly1 - ly0) * (height - mt - mb);
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf"};

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Decade gridlines and tick labels.
  out << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1));
       ++d) {
    out << "<line x1=\"" << px(d) << "\" y1=\"" << py(ly0) << "\" x2=\"" << px(d)
        << "\" y2=\"" << py(ly1) << "\"/>\n";
  }
  for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1));
       ++d) {
    out << "<line x1=\"" << px(lx0) << "\" y1=\"" << py(d) << "\" x2=\"" << px(lx1)
        << "\" y2=\"" << py(d) << "\"/>\n";
  }
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1));
       ++d) {
    out << "<text x=\"" << px(d) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1));
       ++d) {
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(d) + 4
        << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">h</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">error</text>\n";
  out << "</g>\n";

  // Frame.
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
      << "\" height=\"" << height - mt - mb
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // First- and second-order reference slopes anchored at the coarsest point of
  // the first series.
  {
    const auto& anchor = series[0].pts.front();
    const double la_h = std::log10(anchor.first);
    const double la_e = std::log10(anchor.second) - 0.35;
    for (int order = 1; order <= 2; ++order) {
      const double h_end = lx0 + 0.1;
      const double e_end = la_e + order * (h_end - la_h);
      out << "<line x1=\"" << px(la_h) << "\" y1=\"" << py(la_e) << "\" x2=\""
          << px(h_end) << "\" y2=\"" << py(e_end)
          << "\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";
      out << "<text x=\"" << px(h_end) + 4 << "\" y=\"" << py(e_end) + 4
          << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#555555\">O(h"
          << (order == 2 ? "^2" : "") << ")</text>\n";
    }
  }

  // Data series.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 7];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [h, e] : series[s].pts) {
      out << px(std::log10(h)) << "," << py(std::log10(e)) << " ";
    }
    out << "\"/>\n";
    for (const auto& [h, e] : series[s].pts) {
      out << "<circle cx=\"" << px(std::log10(h)) << "\" cy=\"" << py(std::log10(e))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 20 + 16 * static_cast<double>(s)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << color << "\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) {
    throw std::runtime_error("failed while writing '" + path + "'");
  }
}

}  // namespace platekit
