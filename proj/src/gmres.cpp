#include "gmres.hpp"

#include <cmath>
#include <vector>

namespace ttss::detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

GmresResult gmres(const std::function<void(const VectorXd&, VectorXd&)>& op,
                  const std::function<void(const VectorXd&, VectorXd&)>& precond,
                  const VectorXd& b, VectorXd& x, double tol, int restart, int max_iters) {
  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  const Eigen::Index n = b.size();
  VectorXd r(n), w(n), z(n);
  int total = 0;
  while (total < max_iters) {
    op(x, w);
    r = b - w;
    double beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      break;
    }
    const int m = std::min(restart, max_iters - total);
    MatrixXd v(n, m + 1);
    MatrixXd h = MatrixXd::Zero(m + 1, m);
    std::vector<double> cs(m), sn(m);
    VectorXd g = VectorXd::Zero(m + 1);
    g(0) = beta;
    v.col(0) = r / beta;
    int k = 0;
    for (; k < m; ++k) {
      precond(v.col(k), z);
      op(z, w);
      for (int i = 0; i <= k; ++i) {
        h(i, k) = v.col(i).dot(w);
        w -= h(i, k) * v.col(i);
      }
      // One reorthogonalization pass keeps the basis usable for long cycles.
      for (int i = 0; i <= k; ++i) {
        double c = v.col(i).dot(w);
        h(i, k) += c;
        w -= c * v.col(i);
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 0) v.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      double den = std::hypot(h(k, k), h(k + 1, k));
      cs[k] = den > 0 ? h(k, k) / den : 1.0;
      sn[k] = den > 0 ? h(k + 1, k) / den : 0.0;
      h(k, k) = den;
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn[k] * g(k);
      g(k) = cs[k] * g(k);
      ++total;
      res.relative_residual = std::abs(g(k + 1)) / bnorm;
      if (res.relative_residual <= tol || h(k, k) == 0.0) {
        ++k;
        break;
      }
    }
    VectorXd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    VectorXd update = v.leftCols(k) * y;
    precond(update, z);
    x += z;
    if (res.relative_residual <= tol) {
      op(x, w);
      res.relative_residual = (b - w).norm() / bnorm;
      res.converged = res.relative_residual <= 10 * tol;
      break;
    }
  }
  res.iterations = total;
  return res;
}

}  // namespace ttss::detail
