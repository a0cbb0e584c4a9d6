#pragma once

#include <Eigen/Sparse>
#include <string>

#include "platekit/assembly.hpp"

namespace platekit {

struct SolveReport {
  int dim = 0;
  bool used_sparse = false;
  double residual_rel = 0.0;  // |K x - rhs| / max(|rhs|, |K x|)
};

// Direct solve of the assembled saddle-point system: dense LU below the
// crossover size, sparse LU with column reordering above it. Throws
// std::runtime_error (mentioning `context`) when the factorization fails or
// the relative residual exceeds 1e-9.
Eigen::VectorXd solve_saddle(const SaddleSystem& system, const std::string& context,
                             SolveReport* report = nullptr);

// Crossover between the dense and sparse paths (number of unknowns).
constexpr int kDenseSolveLimit = 5000;

// Smallest generalized singular value of the multiplier coupling rows: a
// discrete stability probe. `row_weights` scales each coupling row before the
// singular value computation. Dense computation, intended for small meshes.
double min_coupling_singular_value(const Eigen::SparseMatrix<double>& coupling,
                                   const Eigen::VectorXd& row_weights);

}  // namespace platekit
