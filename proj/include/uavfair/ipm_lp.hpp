#ifndef UAVFAIR_IPM_LP_HPP
#define UAVFAIR_IPM_LP_HPP

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

namespace uavfair {

/// Column-sparse matrix for the LP constraint system Ax = b.
struct SparseColumns {
  int rows = 0;
  std::vector<std::vector<std::pair<int, double>>> cols;

  int num_cols() const { return int(cols.size()); }
  void add(int row, int col, double value) { cols[col].push_back({row, value}); }
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& y) const;
};

enum class LpStatus { optimal, max_iterations, numerical_failure };

struct LpResult {
  LpStatus status = LpStatus::numerical_failure;
  Eigen::VectorXd x;
  Eigen::VectorXd y;       // equality duals
  double objective = 0.0;  // c'x
  double gap = 0.0;        // final complementarity measure
  int iterations = 0;
  std::string message;
};

/// Minimizes c'x subject to Ax = b, 0 <= x, x_j <= upper_j (infinity allowed),
/// with a Mehrotra predictor-corrector method over dense normal equations.
/// Fully deterministic; optimality is certified by the complementarity gap
/// plus primal/dual residuals.
LpResult solve_standard_lp(const SparseColumns& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c,
                           const Eigen::VectorXd& upper,
                           double tol_gap = 1e-11, int max_iters = 200);

constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

}  // namespace uavfair

#endif
