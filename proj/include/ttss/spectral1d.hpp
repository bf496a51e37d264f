#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ttss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LegendreValue {
  double p;
  double dp;
};

// P_n(x) and P_n'(x) by the three-term recurrence.
LegendreValue legendre_eval(int n, double x);

// -1, the n-1 zeros of P_n', +1.  Exactly antisymmetric.
std::vector<double> gll_nodes(int n);

// The n zeros of P_n.
std::vector<double> gauss_nodes(int n);

// GLL differentiation matrix from the closed-form entries.  The nodes must be
// a GLL set (any degree); the degree is inferred from their count.
Matrix diff_matrix(std::span<const double> nodes);

// M(i,j) = l_j(t_i) for the Lagrange basis on `nodes`.
Matrix eval_matrix(std::span<const double> nodes, std::span<const double> targets);

// M(i,j) = l_j^(order)(t_i), order 1 or 2.
Matrix deriv_eval_matrix(std::span<const double> nodes, std::span<const double> targets,
                         int order);

struct Grid1D {
  int degree = 0;
  std::vector<double> rep_nodes;
  Matrix d1;
  Matrix d2;
};

Grid1D make_grid(int n);

Matrix diff2_matrix(const Grid1D& grid);

}  // namespace ttss
