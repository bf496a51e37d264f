#include "ttss/superconsistency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ttss/errors.hpp"

namespace ttss {

namespace {

double bracketed_root(int n, double eps, double beta, double a, double b) {
  const double nn1 = double(n) * (n + 1);
  auto f = [&](double x) {
    auto v = legendre_eval(n, x);
    double d2 = (2.0 * x * v.dp - nn1 * v.p) / (1.0 - x * x);
    return std::pair{eps * v.dp - beta * v.p, eps * d2 - beta * v.dp};
  };
  double fa = f(a).first, fb = f(b).first;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw ConsistencyError("superconsistent node bracket has no sign change");
  double lo = a, hi = b;
  if (fa > 0) std::swap(lo, hi);
  double x = 0.5 * (a + b);
  for (int it = 0; it < 300; ++it) {
    auto [fx, dfx] = f(x);
    if (fx == 0.0) return x;
    if (fx < 0) lo = x; else hi = x;
    double xn = dfx != 0.0 ? x - fx / dfx : 0.5 * (lo + hi);
    if (!(xn > std::min(lo, hi) && xn < std::max(lo, hi))) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 2 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
      return xn;
    x = xn;
  }
  return x;
}

}  // namespace

std::vector<double> superconsistent_nodes(int n, double epsilon, double beta) {
  if (n < 2) throw InvalidArgument("superconsistent_nodes: degree must be >= 2");
  if (!(epsilon > 0)) throw InvalidArgument("superconsistent_nodes: epsilon must be positive");
  std::vector<double> x = gll_nodes(n);
  if (beta == 0.0) return {x.begin() + 1, x.end() - 1};
  if (beta < 0.0) {
    std::vector<double> z = superconsistent_nodes(n, epsilon, -beta);
    std::reverse(z.begin(), z.end());
    for (double& v : z) v = -v;
    return z;
  }
  std::vector<double> g = gauss_nodes(n);
  std::vector<double> z(n - 1);
  for (int j = 0; j < n - 1; ++j) z[j] = bracketed_root(n, epsilon, beta, g[j], x[j + 1]);
  return z;
}

ScGrid1D collocation_grid(int n, std::vector<double> coll_nodes) {
  if (static_cast<int>(coll_nodes.size()) != n - 1)
    throw InvalidArgument("collocation_grid: need n-1 collocation nodes");
  ScGrid1D g;
  g.base = make_grid(n);
  g.coll_nodes = std::move(coll_nodes);
  g.c0 = eval_matrix(g.base.rep_nodes, g.coll_nodes);
  g.c1 = deriv_eval_matrix(g.base.rep_nodes, g.coll_nodes, 1);
  g.c2 = deriv_eval_matrix(g.base.rep_nodes, g.coll_nodes, 2);
  return g;
}

ScGrid1D sc_grid(int n, double epsilon, double beta) {
  ScGrid1D g = collocation_grid(n, superconsistent_nodes(n, epsilon, beta));
  g.epsilon = epsilon;
  g.beta = beta;
  g.plain = false;
  return g;
}

ScGrid1D plain_grid(int n, double epsilon, double beta) {
  Grid1D base = make_grid(n);
  ScGrid1D g;
  g.coll_nodes.assign(base.rep_nodes.begin() + 1, base.rep_nodes.end() - 1);
  g.c0 = Matrix::Zero(n - 1, n + 1);
  for (int i = 0; i < n - 1; ++i) g.c0(i, i + 1) = 1.0;
  g.c1 = base.d1.middleRows(1, n - 1);
  g.c2 = base.d2.middleRows(1, n - 1);
  g.base = std::move(base);
  g.epsilon = epsilon;
  g.beta = beta;
  g.plain = true;
  return g;
}

Matrix embed_rows(const Matrix& interior, bool identity_boundary) {
  const Eigen::Index n = interior.cols() - 1;
  Matrix m = Matrix::Zero(n + 1, n + 1);
  m.middleRows(1, n - 1) = interior;
  if (identity_boundary) {
    m(0, 0) = 1.0;
    m(n, n) = 1.0;
  }
  return m;
}

Matrix assemble_sc_1d_operator(const ScGrid1D& g, double rho) {
  Matrix interior = g.beta * g.c1 - g.epsilon * g.c2 + rho * g.c0;
  return embed_rows(interior, true);
}

Vector rhs_collocator(const ScGrid1D& g, const std::function<double(double)>& b, double g_left,
                      double g_right) {
  const int n = g.degree();
  Vector r(n + 1);
  r(0) = g_left;
  r(n) = g_right;
  for (int j = 0; j < n - 1; ++j) r(j + 1) = b(g.coll_nodes[j]);
  return r;
}

}  // namespace ttss
