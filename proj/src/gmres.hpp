#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ttss::detail {

struct GmresResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Restarted GMRES with right preconditioning.  x holds the initial guess.
GmresResult gmres(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                  const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& precond,
                  const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol, int restart,
                  int max_iters);

}  // namespace ttss::detail
