#pragma once

#include <functional>
#include <vector>

#include "ttss/spectral1d.hpp"

namespace ttss {

// Representation grid plus the n-1 interior collocation nodes z and the
// Lagrange evaluation / derivative rows at z.
struct ScGrid1D {
  Grid1D base;
  double epsilon = 1.0;
  double beta = 0.0;
  bool plain = false;
  std::vector<double> coll_nodes;
  Matrix c0;  // (n-1) x (n+1)
  Matrix c1;
  Matrix c2;

  int degree() const { return base.degree; }
};

// Roots of eps*P_n' - beta*P_n in (-1, 1), sorted.  beta = 0 gives the
// interior GLL nodes; beta < 0 mirrors the beta > 0 set.
std::vector<double> superconsistent_nodes(int n, double epsilon, double beta);

ScGrid1D sc_grid(int n, double epsilon, double beta);

// z = interior GLL nodes; epsilon and beta are only recorded.
ScGrid1D plain_grid(int n, double epsilon = 1.0, double beta = 0.0);

// Collocation rows at arbitrary interior points.
ScGrid1D collocation_grid(int n, std::vector<double> coll_nodes);

// (n+1) x (n+1) matrix with `interior` in rows 1..n-1 and either identity or
// zero rows at both ends.
Matrix embed_rows(const Matrix& interior, bool identity_boundary);

// Rows 1..n-1: beta*c1 - eps*c2 + rho*c0; rows 0 and n: identity rows.
Matrix assemble_sc_1d_operator(const ScGrid1D& g, double rho);

Vector rhs_collocator(const ScGrid1D& g, const std::function<double(double)>& b,
                      double g_left = 0.0, double g_right = 0.0);

}  // namespace ttss
