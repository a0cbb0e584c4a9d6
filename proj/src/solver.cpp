#include "platekit/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cstdio>
#include <stdexcept>

namespace platekit {

namespace {

constexpr double kResidualLimit = 1e-9;

// Residual r = rhs - k x accumulated in extended precision. In double, the
// matvec's own rounding is of order n*eps*sum|k_ij x_j|, which for the
// ill-conditioned fine-level systems reaches the 1e-9 scale and both masks
// refinement progress and inflates the reported residual.
Eigen::VectorXd exact_residual(const Eigen::SparseMatrix<double>& k,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& rhs,
                               double* rel) {
  std::vector<long double> acc(static_cast<std::size_t>(k.rows()), 0.0L);
  for (int c = 0; c < k.outerSize(); ++c) {
    const long double xc = static_cast<long double>(x(c));
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, c); it; ++it) {
      acc[static_cast<std::size_t>(it.row())] +=
          static_cast<long double>(it.value()) * xc;
    }
  }
  Eigen::VectorXd r(k.rows());
  long double r2 = 0.0L, kx2 = 0.0L;
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    const long double diff = static_cast<long double>(rhs(i)) - acc[static_cast<std::size_t>(i)];
    r(i) = static_cast<double>(diff);
    r2 += diff * diff;
    kx2 += acc[static_cast<std::size_t>(i)] * acc[static_cast<std::size_t>(i)];
  }
  const long double scale =
      std::max(static_cast<long double>(rhs.norm()), sqrtl(kx2));
  *rel = scale == 0.0L ? 0.0 : static_cast<double>(sqrtl(r2) / scale);
  return r;
}

}  // namespace

Eigen::VectorXd solve_saddle(const SaddleSystem& system, const std::string& context,
                             SolveReport* report) {
  const Eigen::SparseMatrix<double> k0 = system.matrix();

  // The saddle blocks carry very different mesh-size scalings, which drives
  // the condition number up quickly under refinement. Symmetric (Ruiz-style)
  // equilibration rescales rows and columns toward unit maxima; it keeps the
  // matrix symmetric and is fully deterministic.
  Eigen::VectorXd d = Eigen::VectorXd::Ones(system.dim);
  Eigen::SparseMatrix<double> k = k0;
  for (int iter = 0; iter < 12; ++iter) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(system.dim);
    for (int c = 0; c < k.outerSize(); ++c) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(k, c); it; ++it) {
        const double a = std::abs(it.value());
        m(it.row()) = std::max(m(it.row()), a);
        m(it.col()) = std::max(m(it.col()), a);
      }
    }
    bool balanced = true;
    Eigen::VectorXd s(system.dim);
    for (Eigen::Index i = 0; i < system.dim; ++i) {
      s(i) = m(i) > 0.0 ? 1.0 / std::sqrt(m(i)) : 1.0;
      if (m(i) > 0.0 && (m(i) < 0.5 || m(i) > 2.0)) {
        balanced = false;
      }
    }
    if (balanced) {
      break;
    }
    k = s.asDiagonal() * k * s.asDiagonal();
    d = d.cwiseProduct(s);
  }
  const Eigen::VectorXd scaled_rhs = d.cwiseProduct(system.rhs);

  SolveReport rep;
  rep.dim = system.dim;
  Eigen::VectorXd x;
  // Iterative refinement against the *original* matrix recovers the digits
  // lost to the remaining ill-conditioning. The factorization of the scaled
  // matrix k = S k0 S serves as the preconditioner: k0^{-1} r = S k^{-1} S r.
  const auto refine = [&](const auto& lu) {
    double best = 0.0;
    Eigen::VectorXd r = exact_residual(k0, x, system.rhs, &best);
    Eigen::VectorXd best_x = x;
    for (int round = 0; round < 20 && best > 1e-14; ++round) {
      x += d.cwiseProduct(lu.solve(d.cwiseProduct(r).eval()));
      double res = 0.0;
      r = exact_residual(k0, x, system.rhs, &res);
      if (res < best) {
        best = res;
        best_x = x;
      } else {
        break;
      }
    }
    x = best_x;
    rep.residual_rel = best;
  };
  if (system.dim < kDenseSolveLimit) {
    const Eigen::MatrixXd dense(k);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
    x = d.cwiseProduct(lu.solve(scaled_rhs).eval());
    refine(lu);
    rep.used_sparse = false;
  } else {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(k);
    lu.factorize(k);
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("linear system is singular (" + context + ")");
    }
    x = d.cwiseProduct(lu.solve(scaled_rhs).eval());
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("linear solve failed (" + context + ")");
    }
    refine(lu);
    rep.used_sparse = true;
  }
  if (!(rep.residual_rel <= kResidualLimit)) {
    char msg[64];
    std::snprintf(msg, sizeof(msg), "%.3e", rep.residual_rel);
    throw std::runtime_error("linear system is singular or too ill-conditioned (" +
                             context + "): relative residual " + msg);
  }
  if (report != nullptr) {
    *report = rep;
  }
  return x;
}

double min_coupling_singular_value(const Eigen::SparseMatrix<double>& coupling,
                                   const Eigen::VectorXd& row_weights) {
  if (coupling.rows() != row_weights.size()) {
    throw std::invalid_argument("row weight count does not match coupling rows");
  }
  Eigen::MatrixXd b(coupling);
  for (Eigen::Index r = 0; r < b.rows(); ++r) {
    b.row(r) *= std::sqrt(row_weights[r]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  return svd.singularValues().tail(1)(0);
}

}  // namespace platekit
