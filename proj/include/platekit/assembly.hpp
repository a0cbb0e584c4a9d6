#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

#include "platekit/elements.hpp"
#include "platekit/mesh.hpp"
#include "platekit/skeleton.hpp"

namespace platekit {

// The five discretizations of the clamped plate bending problem.
enum class Method {
  PrimalHybrid,  // broken cubics, shear + nn + corner multipliers
  PrimalNodal,   // vertex-continuous cubics, shear + nn multipliers
  PrimalCont,    // continuous bubble-enriched cubics, nn multiplier
  MixedHybrid,   // broken tensor field, deflection + gradient multipliers
  MixedNN,       // nn-continuous tensor field, deflection + gradient multipliers
};

constexpr std::array<Method, 5> kAllMethods{Method::PrimalHybrid, Method::PrimalNodal,
                                            Method::PrimalCont, Method::MixedHybrid,
                                            Method::MixedNN};

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);
bool is_primal(Method m);

struct MethodOptions {
  bool full_ddiv = false;       // MixedNN only: keep the full 15-dof tensor element
  bool compat_shear = false;    // central-difference shear traces in mixed pairings
  bool high_order_rhs = false;  // high-order quadrature for load integrals
};

struct BlockInfo {
  std::string name;
  int offset = 0;
  int size = 0;
};

// Global dof layout and per-element data of one discretization.
struct Discretization {
  const Mesh* mesh = nullptr;
  Method method{};
  MethodOptions opts{};
  Material material{};

  std::vector<TriGeom> geoms;
  std::vector<EdgeSigns> signs;

  // Field block. Primal methods fill scalar_elems, mixed methods fill
  // tensor_elems; field_map[t][i] is the global dof of local dof i (-1 when
  // the dof is constrained to zero).
  std::vector<ScalarElement> scalar_elems;
  std::vector<TensorElement> tensor_elems;
  std::vector<std::vector<int>> field_map;
  int n_field = 0;

  // Primal multiplier block (offset n_field).
  MultiplierSpace mult;

  // Mixed blocks: broken-linear deflection (3 dofs per element, offset
  // n_field) and gradient multiplier (3 dofs per interior vertex).
  int n_u = 0;
  int n_psi = 0;
  std::vector<int> psi_offset;  // global offset per vertex; -1 on the boundary

  std::vector<BlockInfo> blocks;
  int total_dim() const;

  int u_dof(int t, int k) const { return n_field + 3 * t + k; }
};

Discretization discretize(const Mesh& mesh, Method method, MethodOptions opts = {},
                          const Material& material = {});

// Block layout by the counting formulas alone (no element construction).
std::vector<BlockInfo> block_dims_formula(const Mesh& mesh, Method method,
                                          MethodOptions opts = {});

// Assembled saddle-point system K x = rhs. The triplet list carries both
// halves of every off-diagonal entry with the identical value, so the matrix
// is symmetric bit for bit.
struct SaddleSystem {
  int dim = 0;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs;

  Eigen::SparseMatrix<double> matrix() const;
};

// Assembles the system for the load given as a global-coordinate polynomial.
SaddleSystem assemble(const Discretization& disc, const Poly2& load);

// Per-element expansion of a solution vector.
struct SolutionFields {
  // Primal methods: deflection polynomial per element (centered frames) and
  // multiplier values.
  std::vector<Poly2> u;
  std::vector<double> mult_sf;                    // per edge, global orientation
  std::vector<double> mult_nn;                    // per edge
  std::vector<std::array<double, 3>> corner;      // per element, by local vertex

  // Mixed methods: moment tensor per element (centered frames), broken-linear
  // deflection coefficients on the barycentric basis, and gradient-multiplier
  // vertex data gathered per element (zero on the boundary).
  std::vector<TensorPoly2> m;
  std::vector<std::array<double, 3>> u_lin;
  std::vector<HctVertexData> psi;
};

SolutionFields expand_solution(const Discretization& disc, const Eigen::VectorXd& x);

// Element-wise L2 projection of the load onto broken linears, as coefficients
// on the barycentric basis.
std::vector<std::array<double, 3>> l2_project_p1(const Discretization& disc,
                                                 const Poly2& load);

// Maximum residual over all discrete equations when the exact smooth
// deflection (and the multiplier traces derived from it and its moment
// tensor) is inserted into the scheme. All integrals are evaluated exactly on
// polynomials. The residual is normalized by the largest row magnitude, so a
// perfectly consistent scheme reports machine-precision noise.
double consistency_residual(const Discretization& disc, const Poly2& exact_u,
                            const Poly2& load);

// Writes the assembled matrix as "row col value" triplets (17 significant
// digits, zero-based indices, one entry per line, duplicates summed).
void write_matrix_triplets(const SaddleSystem& system, const std::string& path);

}  // namespace platekit
