#include "platekit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "CLI11.hpp"
#include "platekit/study.hpp"

namespace platekit {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct SchemeFlags {
  bool full_ddiv = false;
  bool compat_shear = false;
  bool high_order_rhs = false;

  MethodOptions options() const {
    MethodOptions o;
    o.full_ddiv = full_ddiv;
    o.compat_shear = compat_shear;
    o.high_order_rhs = high_order_rhs;
    return o;
  }
};

void add_scheme_flags(CLI::App* cmd, SchemeFlags& f) {
  cmd->add_flag("--full-ddiv", f.full_ddiv,
                "Keep the full 15-dof tensor element in the nn-continuous mixed method");
  cmd->add_flag("--compat-shear", f.compat_shear,
                "Difference-quotient shear traces instead of exact tangential derivatives");
  cmd->add_flag("--high-order-rhs", f.high_order_rhs,
                "High-order quadrature for the load instead of the 7-point rule");
}

std::string known_methods() {
  std::string s;
  for (Method m : kAllMethods) {
    if (!s.empty()) {
      s += ", ";
    }
    s += method_name(m);
  }
  return s;
}

CLI::Validator method_validator() {
  return CLI::Validator(
      [](std::string& name) -> std::string {
        if (!parse_method(name).has_value()) {
          return "unknown method '" + name + "' (known: " + known_methods() + ")";
        }
        return {};
      },
      "METHOD");
}

std::string scheme_label(Method method, const SchemeFlags& flags) {
  std::string s = method_name(method);
  if (flags.full_ddiv) {
    s += "+full-ddiv";
  }
  return s;
}

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

void print_errors(const ErrorReport& errors, std::ostream& out) {
  for (const std::string& col : error_column_names()) {
    const std::optional<double> v = error_by_name(errors, col);
    if (v.has_value()) {
      out << col << ": " << fmt_sci(*v) << "\n";
    }
  }
}

int cmd_run(const std::string& method_str, int n, const SchemeFlags& flags,
            const std::string& csv_path, const std::string& matrix_path,
            std::ostream& out) {
  const Method method = *parse_method(method_str);
  const ManufacturedCase mc = manufactured_case();
  const Mesh mesh = build_uniform_square(n);
  const Discretization disc = discretize(mesh, method, flags.options(), mc.material);
  const SaddleSystem sys = assemble(disc, mc.load);

  StudyTable table;
  table.method = method;
  table.opts = flags.options();
  StudyRow row;
  row.n_tris = mesh.num_tris();
  row.h = mesh.mesh_size_parameter();
  const Eigen::VectorXd x =
      solve_saddle(sys,
                   scheme_label(method, flags) + " on the " +
                       std::to_string(row.n_tris) + "-element mesh",
                   &row.solve);
  row.errors = compute_errors(disc, x, mc);

  out << "method: " << scheme_label(method, flags) << "\n";
  out << "mesh: n = " << n << ", " << mesh.num_tris() << " elements, "
      << mesh.num_vertices() << " vertices, " << mesh.num_edges() << " edges\n";
  out << "h: " << fmt_sci(row.h) << "\n";
  for (const BlockInfo& block : disc.blocks) {
    out << "block " << block.name << ": " << block.size << " unknowns\n";
  }
  out << "total unknowns: " << disc.total_dim() << "\n";
  out << "solver path: " << (row.solve.used_sparse ? "sparse" : "dense") << "\n";
  out << "relative residual: " << fmt_sci(row.solve.residual_rel) << "\n";
  print_errors(row.errors, out);

  table.rows.push_back(row);
  if (!csv_path.empty()) {
    write_csv({table}, csv_path);
    out << "summary written to " << csv_path << "\n";
  }
  if (!matrix_path.empty()) {
    write_matrix_triplets(sys, matrix_path);
    out << "matrix written to " << matrix_path << " (dim " << sys.dim << ", "
        << sys.matrix().nonZeros() << " nonzeros)\n";
  }
  return kExitOk;
}

int cmd_study(const std::vector<std::string>& method_strs, const std::vector<int>& levels,
              const SchemeFlags& flags, const std::string& csv_path,
              const std::string& svg_path, bool compare_paper, std::ostream& out) {
  std::vector<Method> methods;
  if (method_strs.empty()) {
    methods = {Method::PrimalNodal, Method::PrimalCont, Method::MixedHybrid,
               Method::MixedNN};
  } else {
    for (const std::string& s : method_strs) {
      methods.push_back(*parse_method(s));
    }
  }

  std::vector<StudyTable> tables;
  for (Method method : methods) {
    tables.push_back(run_convergence(method, levels, flags.options()));
  }

  for (const StudyTable& table : tables) {
    out << scheme_label(table.method, flags) << ":\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const StudyRow& row = table.rows[r];
      out << "  N = " << row.n_tris << ", h = " << fmt_sci(row.h)
          << ", err_u = " << fmt_sci(row.errors.err_u);
      if (r > 0) {
        const StudyRow& prev = table.rows[r - 1];
        out << ", eoc_u = "
            << fmt_sci(eoc(prev.errors.err_u, prev.h, row.errors.err_u, row.h));
      }
      out << "\n";
    }
  }

  write_csv(tables, csv_path, compare_paper);
  out << "table written to " << csv_path << "\n";
  if (!svg_path.empty()) {
    write_svg_plot(tables, svg_path);
    out << "plot written to " << svg_path << "\n";
  }

  if (compare_paper) {
    bool ok = true;
    for (const StudyTable& table : tables) {
      const double dev = max_reference_deviation(table);
      out << "max deviation from the published deflection errors ("
          << scheme_label(table.method, flags) << "): " << fmt_sci(dev) << "\n";
      ok = ok && dev <= 0.05;
    }
    if (!ok) {
      out << "comparison FAILED (deviation above 5%)\n";
      return kExitNumerical;
    }
    out << "comparison passed (all deviations within 5%)\n";
  }
  return kExitOk;
}

int cmd_mesh_info(int n, std::ostream& out) {
  const Mesh mesh = build_uniform_square(n);
  out << "uniform unit-square mesh, n = " << n << "\n";
  out << "elements: " << mesh.num_tris() << "\n";
  out << "vertices: " << mesh.num_vertices() << " (" << mesh.num_interior_vertices()
      << " interior)\n";
  out << "edges: " << mesh.num_edges() << " (" << mesh.num_interior_edges()
      << " interior)\n";
  out << "h: " << fmt_sci(mesh.mesh_size_parameter()) << "\n";
  return kExitOk;
}

int cmd_export_matrix(const std::string& method_str, int n, const SchemeFlags& flags,
                      const std::string& out_path, std::ostream& out) {
  const Method method = *parse_method(method_str);
  const ManufacturedCase mc = manufactured_case();
  const Mesh mesh = build_uniform_square(n);
  const Discretization disc = discretize(mesh, method, flags.options(), mc.material);
  const SaddleSystem sys = assemble(disc, mc.load);
  write_matrix_triplets(sys, out_path);
  out << "matrix written to " << out_path << " (dim " << sys.dim << ", "
      << sys.matrix().nonZeros() << " nonzeros)\n";
  return kExitOk;
}

}  // namespace

int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid and mixed discretizations of the clamped plate bending problem"};
  app.name("platekit");
  app.set_config("--config", "", "Optional configuration file with key = value lines");
  app.require_subcommand(1);

  auto* run = app.add_subcommand(
      "run", "Solve the manufactured case on one mesh and report errors");
  run->configurable(true);
  std::string run_method;
  int run_n = 4;
  SchemeFlags run_flags;
  std::string run_csv, run_matrix;
  run->add_option("--method", run_method, "Scheme name (" + known_methods() + ")")
      ->required()
      ->check(method_validator());
  run->add_option("--n", run_n, "Grid resolution; the mesh has 2 n^2 elements")
      ->check(CLI::PositiveNumber);
  add_scheme_flags(run, run_flags);
  run->add_option("--csv", run_csv, "Write the error summary as a one-row CSV");
  run->add_option("--matrix", run_matrix, "Write the assembled matrix as triplets");

  auto* study = app.add_subcommand(
      "study", "Convergence study over a doubling sequence of meshes");
  study->configurable(true);
  std::vector<std::string> study_methods;
  std::vector<int> study_levels;
  SchemeFlags study_flags;
  std::string study_csv = "study.csv";
  std::string study_svg;
  bool compare_paper = false;
  study
      ->add_option("--method", study_methods,
                   "Scheme name(s); default: the four schemes with published errors")
      ->check(method_validator());
  study
      ->add_option("--levels", study_levels,
                   "Comma-separated grid resolutions, each double the previous")
      ->required()
      ->delimiter(',');
  add_scheme_flags(study, study_flags);
  study->add_option("--csv", study_csv, "Output table path (default study.csv)");
  study->add_option("--svg", study_svg, "Optional log-log convergence plot");
  study->add_flag("--compare-paper", compare_paper,
                  "Compare against the published deflection errors; fail above 5% "
                  "(the mixed_nn reference column corresponds to --full-ddiv)");

  auto* mesh_info =
      app.add_subcommand("mesh-info", "Entity counts of the uniform mesh");
  mesh_info->configurable(true);
  int mesh_n = 1;
  mesh_info->add_option("--n", mesh_n, "Grid resolution")->check(CLI::PositiveNumber);

  auto* export_matrix = app.add_subcommand(
      "export-matrix", "Assemble one system and write it as row/col/value triplets");
  export_matrix->configurable(true);
  std::string em_method;
  int em_n = 1;
  SchemeFlags em_flags;
  std::string em_out;
  export_matrix->add_option("--method", em_method, "Scheme name (" + known_methods() + ")")
      ->required()
      ->check(method_validator());
  export_matrix->add_option("--n", em_n, "Grid resolution")->check(CLI::PositiveNumber);
  add_scheme_flags(export_matrix, em_flags);
  export_matrix->add_option("--out", em_out, "Output path")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      return cmd_run(run_method, run_n, run_flags, run_csv, run_matrix, out);
    }
    if (study->parsed()) {
      if (study_levels.size() < 2) {
        err << "error: a study needs at least two levels\n";
        return kExitUsage;
      }
      return cmd_study(study_methods, study_levels, study_flags, study_csv, study_svg,
                       compare_paper, out);
    }
    if (mesh_info->parsed()) {
      return cmd_mesh_info(mesh_n, out);
    }
    if (export_matrix->parsed()) {
      return cmd_export_matrix(em_method, em_n, em_flags, em_out, out);
    }
    err << "error: no command given\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace platekit
