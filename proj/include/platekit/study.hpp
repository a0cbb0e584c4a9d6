#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "platekit/assembly.hpp"
#include "platekit/solver.hpp"

namespace platekit {

// Manufactured clamped-plate case on the unit square: a polynomial deflection
// with zero boundary values and normal derivatives, and the matching load.
struct ManufacturedCase {
  Poly2 u;
  Poly2 load;
  Material material;
};

ManufacturedCase manufactured_case();

// Error measures of one solve; quantities a method does not produce stay
// empty. All norms are L2 over the domain or the edge skeleton; the skeleton
// norms carry the powers of the local edge length indicated by the theory
// (3/2 for the shear multiplier, 1/2 for the nn multiplier).
struct ErrorReport {
  double err_u = 0.0;
  std::optional<double> err_hess;
  std::optional<double> err_m;
  std::optional<double> err_divdiv;
  std::optional<double> err_shear_w;
  std::optional<double> err_nn_w;
  std::optional<double> err_hess_recon;
};

// Error norms of expanded solution fields. The domain integrals use the
// 16-point rule, the skeleton integrals the 5-point edge rule.
ErrorReport compute_errors(const Discretization& disc, const SolutionFields& sol,
                           const ManufacturedCase& mc);
// Convenience overload expanding a raw solution vector first.
ErrorReport compute_errors(const Discretization& disc, const Eigen::VectorXd& x,
                           const ManufacturedCase& mc);

// The CSV error columns in emission order: err_u, err_hess, err_M,
// err_divdiv, err_shear_w, err_nn_w, err_hess_recon.
const std::vector<std::string>& error_column_names();

// Column accessor by CSV name; throws for unknown names, returns an empty
// optional for quantities the method does not produce.
std::optional<double> error_by_name(const ErrorReport& e, const std::string& name);

struct StudyRow {
  int n_tris = 0;
  double h = 0.0;  // 1 / sqrt(element count)
  ErrorReport errors;
  SolveReport solve;
};

struct StudyTable {
  Method method{};
  MethodOptions opts{};
  std::vector<StudyRow> rows;
};

// Runs the manufactured convergence study on uniform unit-square meshes. Each
// level is the grid resolution n (the mesh has 2 n^2 elements); consecutive
// levels must double n.
StudyTable run_convergence(Method method, const std::vector<int>& levels,
                           MethodOptions opts = {});

// EOC between consecutive refinements: log(e0/e1) / log(h0/h1).
double eoc(double e0, double h0, double e1, double h1);

// Published deflection errors of the four tabulated methods.
constexpr std::array<int, 6> kReferenceSizes{8, 32, 128, 512, 2048, 8192};

struct ReferenceCurve {
  Method method;
  std::array<double, 6> err_u;
};

const std::vector<ReferenceCurve>& reference_table();

// Largest relative deviation of the study's deflection errors from the
// published curve, over the rows whose element count appears in the table.
// Throws when the method has no published curve.
double max_reference_deviation(const StudyTable& table);

// CSV in the fixed column set, one row per (method, refinement), %.5e
// formatting, empty cells for quantities a method does not produce. When
// compare_paper is set, a trailing dev_u_paper column holds the relative
// deviation of err_u from the published curve (empty where none exists).
void write_csv(const std::vector<StudyTable>& tables, const std::string& path,
               bool compare_paper = false);

// Hand-rolled log-log SVG plot against h: one polyline per error column each
// table produces, plus first- and second-order reference slopes.
void write_svg_plot(const std::vector<StudyTable>& tables, const std::string& path);

}  // namespace platekit
