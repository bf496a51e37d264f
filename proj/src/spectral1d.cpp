#include "ttss/spectral1d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "ttss/errors.hpp"

namespace ttss {

namespace {

// Root of f on [a, b] (f(a), f(b) of opposite sign) by Newton with a
// bisection fallback.  f returns (value, derivative).
double safeguarded_newton(const std::function<std::pair<double, double>(double)>& f, double a,
                          double b, double x0) {
  double fa = f(a).first;
  double fb = f(b).first;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw ConsistencyError("root bracket without sign change");
  double lo = a, hi = b;
  if (fa > 0) std::swap(lo, hi);  // f(lo) < 0 < f(hi)
  double x = (x0 > std::min(a, b) && x0 < std::max(a, b)) ? x0 : 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    auto [fx, dfx] = f(x);
    if (fx == 0.0) return x;
    if (fx < 0) lo = x; else hi = x;
    double step = dfx != 0.0 ? fx / dfx : 0.0;
    double xn = x - step;
    bool inside = dfx != 0.0 && xn > std::min(lo, hi) && xn < std::max(lo, hi);
    if (!inside) {
      xn = 0.5 * (lo + hi);
      step = x - xn;
    }
    if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
      return xn;
    if (xn == x) return x;
    x = xn;
  }
  return x;
}

void symmetrize(std::vector<double>& x) {
  const std::size_t m = x.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    double v = 0.5 * (x[m - 1 - i] - x[i]);
    x[i] = -v;
    x[m - 1 - i] = v;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;
}

void check_distinct(std::span<const double> nodes) {
  std::vector<double> s(nodes.begin(), nodes.end());
  std::sort(s.begin(), s.end());
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] == s[i - 1]) throw InvalidArgument("duplicate interpolation nodes");
}

// log|w_j| and sign(w_j) of the barycentric weights 1/prod_{k!=j}(x_j - x_k).
void log_weights(std::span<const double> x, std::vector<double>& logw, std::vector<int>& sgn) {
  const std::size_t m = x.size();
  logw.assign(m, 0.0);
  sgn.assign(m, 1);
  for (std::size_t j = 0; j < m; ++j) {
    double acc = 0.0;
    int s = 1;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      double d = x[j] - x[k];
      acc -= std::log(std::abs(d));
      if (d < 0) s = -s;
    }
    logw[j] = acc;
    sgn[j] = s;
  }
}

// Values and derivatives (up to `order`) of all Lagrange basis functions at t.
// Everything is carried relative to the nearest node so t == x_m is exact.
void lagrange_row(std::span<const double> x, const std::vector<double>& logw,
                  const std::vector<int>& sgn, double t, int order, double* l0, double* l1,
                  double* l2) {
  const std::size_t m = x.size();
  std::size_t near = 0;
  for (std::size_t k = 1; k < m; ++k)
    if (std::abs(t - x[k]) < std::abs(t - x[near])) near = k;
  const double delta = t - x[near];

  double logp = 0.0, a_sum = 0.0, b_sum = 0.0;
  int sp = 1;
  for (std::size_t k = 0; k < m; ++k) {
    if (k == near) continue;
    double d = t - x[k];
    logp += std::log(std::abs(d));
    if (d < 0) sp = -sp;
    a_sum += 1.0 / d;
    b_sum += 1.0 / (d * d);
  }

  // q_j = w_j * prod_{k != j, near} (t - x_k); l_j = q_j * delta for j != near.
  std::vector<double> logq(m);
  std::vector<int> sq(m);
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    if (j == near) {
      logq[j] = logw[j] + logp;
      sq[j] = sgn[j] * sp;
    } else {
      double d = t - x[j];
      logq[j] = logw[j] + logp - std::log(std::abs(d));
      sq[j] = sgn[j] * sp * (d < 0 ? -1 : 1);
    }
    shift = std::max(shift, logq[j]);
  }

  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double q = sq[j] * std::exp(logq[j] - shift);
    double v = (j == near) ? q : q * delta;
    l0[j] = v;
    total += v;
    if (order >= 1) {
      if (j == near) {
        l1[j] = q * a_sum;
        if (order >= 2) l2[j] = q * (a_sum * a_sum - b_sum);
      } else {
        double inv = 1.0 / (t - x[j]);
        double a = a_sum - inv;
        double b = b_sum - inv * inv;
        l1[j] = q * (1.0 + a * delta);
        if (order >= 2) l2[j] = q * (2.0 * a + (a * a - b) * delta);
      }
    }
  }
  // sum_j l_j(t) = 1 fixes the common scale.
  for (std::size_t j = 0; j < m; ++j) {
    l0[j] /= total;
    if (order >= 1) l1[j] /= total;
    if (order >= 2) l2[j] /= total;
  }
}

Matrix lagrange_matrix(std::span<const double> nodes, std::span<const double> targets,
                       int order) {
  check_distinct(nodes);
  std::vector<double> logw;
  std::vector<int> sgn;
  log_weights(nodes, logw, sgn);
  const std::size_t m = nodes.size();
  Matrix out(targets.size(), m);
  std::vector<double> l0(m), l1(m), l2(m);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    lagrange_row(nodes, logw, sgn, targets[i], order, l0.data(), l1.data(), l2.data());
    const std::vector<double>& src = order == 0 ? l0 : (order == 1 ? l1 : l2);
    for (std::size_t j = 0; j < m; ++j) out(i, j) = src[j];
  }
  return out;
}

}  // namespace

LegendreValue legendre_eval(int n, double x) {
  if (n < 0) throw InvalidArgument("legendre_eval: negative degree");
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  for (int k = 1; k < n; ++k) {
    double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    double d2 = d0 + (2.0 * k + 1.0) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  return {p1, d1};
}

std::vector<double> gauss_nodes(int n) {
  if (n < 1) throw InvalidArgument("gauss_nodes: degree must be >= 1");
  std::vector<double> out(n);
  const double pi = std::numbers::pi;
  auto f = [n](double x) {
    auto v = legendre_eval(n, x);
    return std::pair{v.p, v.dp};
  };
  for (int k = 1; k <= n; ++k) {
    // Bruns: theta_k in ((k - 1/2) pi / (n + 1/2), k pi / (n + 1/2)).
    double a = std::cos(k * pi / (n + 0.5));
    double b = std::cos((k - 0.5) * pi / (n + 0.5));
    double guess = std::cos((k - 0.25) * pi / (n + 0.5));
    out[n - k] = safeguarded_newton(f, a, b, guess);
  }
  symmetrize(out);
  return out;
}

std::vector<double> gll_nodes(int n) {
  if (n < 2) throw InvalidArgument("gll_nodes: degree must be >= 2");
  std::vector<double> g = gauss_nodes(n);
  std::vector<double> out(n + 1);
  out[0] = -1.0;
  out[n] = 1.0;
  const double nn1 = double(n) * (n + 1);
  auto f = [n, nn1](double x) {
    auto v = legendre_eval(n, x);
    double d2 = (2.0 * x * v.dp - nn1 * v.p) / (1.0 - x * x);
    return std::pair{v.dp, d2};
  };
  const double pi = std::numbers::pi;
  for (int j = 1; j < n; ++j) {
    double guess = -std::cos(pi * j / n);
    out[j] = safeguarded_newton(f, g[j - 1], g[j], guess);
  }
  symmetrize(out);
  return out;
}

Matrix diff_matrix(std::span<const double> nodes) {
  check_distinct(nodes);
  const int n = static_cast<int>(nodes.size()) - 1;
  if (n < 1) throw InvalidArgument("diff_matrix: need at least two nodes");
  std::vector<double> pn(n + 1);
  for (int i = 0; i <= n; ++i) pn[i] = legendre_eval(n, nodes[i]).p;
  Matrix d = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    double row = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = pn[i] / ((nodes[i] - nodes[j]) * pn[j]);
      row += d(i, j);
    }
    d(i, i) = -row;
  }
  // Corner entries are known in closed form; x_0 = -1 and x_n = +1.
  const double corner = double(n) * (n + 1) / 4.0;
  d(0, 0) = -corner;
  d(n, n) = corner;
  return d;
}

Matrix eval_matrix(std::span<const double> nodes, std::span<const double> targets) {
  return lagrange_matrix(nodes, targets, 0);
}

Matrix deriv_eval_matrix(std::span<const double> nodes, std::span<const double> targets,
                         int order) {
  if (order != 1 && order != 2)
    throw InvalidArgument("deriv_eval_matrix: order must be 1 or 2, got " + std::to_string(order));
  return lagrange_matrix(nodes, targets, order);
}

Grid1D make_grid(int n) {
  Grid1D g;
  g.degree = n;
  g.rep_nodes = gll_nodes(n);
  g.d1 = diff_matrix(g.rep_nodes);
  g.d2 = diff2_matrix(g);
  return g;
}

Matrix diff2_matrix(const Grid1D& grid) {
  Matrix d2 = deriv_eval_matrix(grid.rep_nodes, grid.rep_nodes, 2);
#ifndef NDEBUG
  if (grid.d1.rows() == d2.rows()) {
    Matrix dd = grid.d1 * grid.d1;
    double scale = std::max(1.0, dd.cwiseAbs().maxCoeff());
    if ((dd - d2).cwiseAbs().maxCoeff() > 1e-7 * scale)
      throw ConsistencyError("diff2_matrix disagrees with D*D");
  }
#endif
  return d2;
}

}  // namespace ttss
