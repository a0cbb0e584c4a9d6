#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "platekit/assembly.hpp"
#include "platekit/solver.hpp"
#include "platekit/study.hpp"

using namespace platekit;

namespace {

struct BlockSpec {
  Method method;
  bool full_ddiv;
  std::vector<std::pair<std::string, int>> blocks;
};

// Independent entity-count arithmetic for the uniform square mesh.
struct Counts {
  int V, E, T, Vi, Ei;
  explicit Counts(int n)
      : V((n + 1) * (n + 1)),
        E(3 * n * n + 2 * n),
        T(2 * n * n),
        Vi((n - 1) * (n - 1)),
        Ei(3 * n * n - 2 * n) {}
};

}  // namespace

TEST_CASE("block dimensions match the counting formulas") {
  for (int n : {1, 2, 4}) {
    const Counts c(n);
    const Mesh mesh = build_uniform_square(n);
    const std::vector<BlockSpec> specs = {
        {Method::PrimalHybrid,
         false,
         {{"field", 10 * c.T}, {"multiplier", 2 * c.E + 3 * c.T - c.Vi}}},
        {Method::PrimalNodal,
         false,
         {{"field", c.Vi + 7 * c.T}, {"multiplier", 2 * c.E}}},
        {Method::PrimalCont,
         false,
         {{"field", c.Vi + 2 * c.Ei + 3 * c.T}, {"multiplier", c.E}}},
        {Method::MixedHybrid,
         false,
         {{"moment", 12 * c.T}, {"deflection", 3 * c.T}, {"gradient", 3 * c.Vi}}},
        {Method::MixedNN,
         false,
         {{"moment", c.E + 9 * c.T}, {"deflection", 3 * c.T}, {"gradient", 3 * c.Vi}}},
        {Method::MixedNN,
         true,
         {{"moment", 2 * c.E + 9 * c.T}, {"deflection", 3 * c.T}, {"gradient", 3 * c.Vi}}},
    };
    for (const BlockSpec& spec : specs) {
      MethodOptions opts;
      opts.full_ddiv = spec.full_ddiv;
      const Discretization disc = discretize(mesh, spec.method, opts);
      const std::vector<BlockInfo> formula =
          block_dims_formula(mesh, spec.method, opts);
      REQUIRE(disc.blocks.size() == spec.blocks.size());
      REQUIRE(formula.size() == spec.blocks.size());
      int offset = 0;
      for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
        CHECK(disc.blocks[k].name == spec.blocks[k].first);
        CHECK(disc.blocks[k].size == spec.blocks[k].second);
        CHECK(disc.blocks[k].offset == offset);
        CHECK(formula[k].size == spec.blocks[k].second);
        offset += spec.blocks[k].second;
      }
      CHECK(disc.total_dim() == offset);
    }
  }

  // The documented examples: 57 + 32 unknowns for the nodal method on the
  // 8-element mesh, 14 field unknowns on the 2-element mesh.
  const Discretization d2 = discretize(build_uniform_square(2), Method::PrimalNodal);
  CHECK(d2.blocks[0].size == 57);
  CHECK(d2.blocks[1].size == 32);
  CHECK(d2.total_dim() == 89);
  const Discretization d1 = discretize(build_uniform_square(1), Method::PrimalNodal);
  CHECK(d1.blocks[0].size == 14);
}

TEST_CASE("assembled matrices are symmetric bit for bit") {
  const Mesh mesh = build_uniform_square(2);
  const ManufacturedCase mc = manufactured_case();
  for (Method method : kAllMethods) {
    const Discretization disc = discretize(mesh, method, {}, mc.material);
    const SaddleSystem sys = assemble(disc, mc.load);
    const Eigen::SparseMatrix<double> k = sys.matrix();
    const Eigen::SparseMatrix<double> kt = Eigen::SparseMatrix<double>(k.transpose());
    CHECK((k - kt).norm() == 0.0);
    CHECK(sys.dim == disc.total_dim());
    CHECK(sys.rhs.size() == sys.dim);
  }
}

TEST_CASE("mixed compliance blocks are positive definite") {
  const Mesh mesh = build_uniform_square(2);
  const ManufacturedCase mc = manufactured_case();
  for (Method method : {Method::MixedHybrid, Method::MixedNN}) {
    const Discretization disc = discretize(mesh, method, {}, mc.material);
    const SaddleSystem sys = assemble(disc, mc.load);
    const Eigen::SparseMatrix<double> k = sys.matrix();
    const Eigen::SparseMatrix<double> a =
        k.topLeftCorner(disc.n_field, disc.n_field);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(a);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("broken-linear projection of the load") {
  const Mesh mesh = build_uniform_square(2);
  const ManufacturedCase mc = manufactured_case();
  const Discretization disc = discretize(mesh, Method::MixedHybrid, {}, mc.material);

  // A linear load is reproduced nodally.
  const Poly2 lin = Poly2::affine(0.7, 1.3, -0.4);
  const auto proj = l2_project_p1(disc, lin);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const Vec2 v = mesh.vertices[static_cast<std::size_t>(
          mesh.tris[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)])];
      CHECK(proj[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] ==
            doctest::Approx(lin(v)).epsilon(1e-12));
    }
  }

  // A quadratic load matches the per-element normal equations solved densely.
  const Poly2 quad = Poly2::monomial(2, 0);
  const auto proj2 = l2_project_p1(disc, quad);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const TriGeom g = entity_geometry(mesh, t);
    Eigen::Matrix3d mass;
    Eigen::Vector3d moments;
    std::array<Poly2, 3> lambda;
    for (int k = 0; k < 3; ++k) {
      lambda[static_cast<std::size_t>(k)] =
          Poly2::affine(1.0 / 3.0, g.grad_lambda[static_cast<std::size_t>(k)].x,
                        g.grad_lambda[static_cast<std::size_t>(k)].y);
    }
    const Poly2 quad_c = quad.shifted(g.centroid.x, g.centroid.y);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        mass(a, b) = integrate_centered(lambda[static_cast<std::size_t>(a)] *
                                            lambda[static_cast<std::size_t>(b)],
                                        g);
      }
      moments(a) =
          integrate_centered(lambda[static_cast<std::size_t>(a)] * quad_c, g);
    }
    const Eigen::Vector3d c = mass.ldlt().solve(moments);
    for (int k = 0; k < 3; ++k) {
      CHECK(proj2[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] ==
            doctest::Approx(c(k)).epsilon(1e-10));
    }
  }
}

TEST_CASE("multiplier equations annihilate the solved field (scaled)") {
  const ManufacturedCase mc = manufactured_case();
  for (Method method : {Method::PrimalHybrid, Method::PrimalNodal, Method::PrimalCont}) {
    const Mesh mesh = build_uniform_square(2);
    const Discretization disc = discretize(mesh, method, {}, mc.material);
    const SaddleSystem sys = assemble(disc, mc.load);
    const Eigen::VectorXd x = solve_saddle(sys, method_name(method));

    std::vector<double> num(static_cast<std::size_t>(sys.dim), 0.0);
    std::vector<double> den(static_cast<std::size_t>(sys.dim), 0.0);
    for (const auto& trip : sys.triplets) {
      const double term = trip.value() * x(trip.col());
      num[static_cast<std::size_t>(trip.row())] += term;
      den[static_cast<std::size_t>(trip.row())] += std::abs(term);
    }
    double max_den = 0.0;
    for (int r = disc.n_field; r < sys.dim; ++r) {
      max_den = std::max(max_den, den[static_cast<std::size_t>(r)]);
    }
    // Rows that pair only clamped boundary traces carry pure roundoff, so
    // each residual is judged against the largest multiplier-row magnitude.
    for (int r = disc.n_field; r < sys.dim; ++r) {
      CHECK(std::abs(num[static_cast<std::size_t>(r)]) <= 1e-9 * max_den);
    }
  }
}

TEST_CASE("mixed solutions satisfy the broken-linear load identity") {
  const ManufacturedCase mc = manufactured_case();
  for (bool full : {false, true}) {
    for (Method method : {Method::MixedHybrid, Method::MixedNN}) {
      if (full && method == Method::MixedHybrid) {
        continue;
      }
      MethodOptions opts;
      opts.full_ddiv = full;
      const Mesh mesh = build_uniform_square(2);
      const Discretization disc = discretize(mesh, method, opts, mc.material);
      const SaddleSystem sys = assemble(disc, mc.load);
      const Eigen::VectorXd x = solve_saddle(sys, method_name(method));
      const SolutionFields sol = expand_solution(disc, x);
      const auto proj = l2_project_p1(disc, mc.load);

      for (int t = 0; t < mesh.num_tris(); ++t) {
        const TriGeom& g = disc.geoms[static_cast<std::size_t>(t)];
        const auto& c = proj[static_cast<std::size_t>(t)];
        Poly2 pf = Poly2::affine(
            (c[0] + c[1] + c[2]) / 3.0,
            c[0] * g.grad_lambda[0].x + c[1] * g.grad_lambda[1].x +
                c[2] * g.grad_lambda[2].x,
            c[0] * g.grad_lambda[0].y + c[1] * g.grad_lambda[1].y +
                c[2] * g.grad_lambda[2].y);
        const Poly2 diff = sol.m[static_cast<std::size_t>(t)].div_div() - pf;
        const double defect = std::sqrt(integrate_centered(diff * diff, g));
        const Poly2 f_c = mc.load.shifted(g.centroid.x, g.centroid.y);
        const double scale = std::sqrt(integrate_centered(f_c * f_c, g));
        CHECK(defect <= 1e-8 * std::max(scale, 1e-3));
      }
    }
  }
}

TEST_CASE("shared nn dofs make the moment trace continuous") {
  const ManufacturedCase mc = manufactured_case();
  for (bool full : {false, true}) {
    MethodOptions opts;
    opts.full_ddiv = full;
    const Mesh mesh = build_uniform_square(2);
    const Discretization disc = discretize(mesh, Method::MixedNN, opts, mc.material);
    const SaddleSystem sys = assemble(disc, mc.load);
    const Eigen::VectorXd x = solve_saddle(sys, "nn continuity");
    const SolutionFields sol = expand_solution(disc, x);

    double max_trace = 0.0, max_jump = 0.0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (mesh.edge_on_boundary[static_cast<std::size_t>(e)]) {
        continue;
      }
      const int t0 = mesh.edge_tris[static_cast<std::size_t>(e)][0];
      const int t1 = mesh.edge_tris[static_cast<std::size_t>(e)][1];
      int j0 = -1, j1 = -1;
      for (int j = 0; j < 3; ++j) {
        if (mesh.tri_edges[static_cast<std::size_t>(t0)][static_cast<std::size_t>(j)] == e) j0 = j;
        if (mesh.tri_edges[static_cast<std::size_t>(t1)][static_cast<std::size_t>(j)] == e) j1 = j;
      }
      const Poly1 nn0 =
          nn_trace(sol.m[static_cast<std::size_t>(t0)], disc.geoms[static_cast<std::size_t>(t0)], j0);
      const Poly1 nn1 =
          nn_trace(sol.m[static_cast<std::size_t>(t1)], disc.geoms[static_cast<std::size_t>(t1)], j1);
      // The two CCW traversals of a shared edge run in opposite directions.
      for (double t : {0.0, 0.5, 1.0}) {
        max_trace = std::max(max_trace, std::abs(nn0(t)));
        max_jump = std::max(max_jump, std::abs(nn0(t) - nn1(1.0 - t)));
      }
    }
    CHECK(max_jump <= 1e-12 * std::max(max_trace, 1e-6));
  }
}

TEST_CASE("exact data reproduces every discrete equation") {
  const ManufacturedCase mc = manufactured_case();
  const Mesh mesh = build_uniform_square(1);
  for (Method method : kAllMethods) {
    const Discretization disc = discretize(mesh, method, {}, mc.material);
    const double res = consistency_residual(disc, mc.u, mc.load);
    CHECK(res <= 1e-10);
  }
}

TEST_CASE("triplet export writes one entry per stored coefficient") {
  const Mesh mesh = build_uniform_square(1);
  const ManufacturedCase mc = manufactured_case();
  const Discretization disc = discretize(mesh, Method::PrimalCont, {}, mc.material);
  const SaddleSystem sys = assemble(disc, mc.load);
  const std::string path = "triplets_test.txt";
  write_matrix_triplets(sys, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  long long r, c;
  double v;
  int count = 0;
  double diag_sum = 0.0;
  while (in >> r >> c >> v) {
    ++count;
    CHECK(r >= 0);
    CHECK(c >= 0);
    CHECK(r < sys.dim);
    CHECK(c < sys.dim);
    if (r == c) {
      diag_sum += v;
    }
  }
  std::remove(path.c_str());
  const Eigen::SparseMatrix<double> k = sys.matrix();
  CHECK(count == k.nonZeros());
  // Trace agrees with the assembled matrix.
  double trace = 0.0;
  for (int i = 0; i < k.outerSize(); ++i) {
    trace += k.coeff(i, i);
  }
  CHECK(diag_sum == doctest::Approx(trace).epsilon(1e-12));
}
