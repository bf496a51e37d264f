#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttss/tensor_train.hpp"

namespace ttss {

enum class LocalSolver { Auto, Direct, Iterative };

// Galerkin: local systems are X^T A X.  MinRes: local systems minimise the
// global residual (Galerkin on A^T A).  Auto starts with Galerkin and switches
// to MinRes from the best iterate when a sweep blows the residual up or stalls
// far above the rounding level.
enum class Projection { Auto, Galerkin, MinRes };

struct SolverConfig {
  int max_sweeps = 40;
  double residual_tol = 1e-8;
  double rounding_tol = 1e-10;
  int enrichment_rank = 2;
  int max_rank = 64;
  LocalSolver local_solver = LocalSolver::Auto;
  Projection projection = Projection::Auto;
  double divergence_factor = 10.0;  // Auto: switch when residual > factor * best
  // Auto: also switch on stagnation while best > factor * rounding_tol; below
  // that the plateau is a truncation effect.
  double stall_switch_factor = 1e3;
  int local_direct_max = 2000;  // Auto: dense LU up to this local size
  int gmres_restart = 60;
  int gmres_max_iters = 600;
  int stagnation_window = 5;
  double stagnation_factor = 0.99;
  std::uint64_t seed = 2024;
  bool verbose = false;

  void validate() const;
};

struct SolveReport {
  std::vector<double> residual_history;
  std::vector<int> rank_history;
  std::vector<double> compression_history;
  double wall_time = 0.0;
  bool converged = false;
  bool stagnated = false;
  int minres_from_sweep = 0;  // 0: Galerkin throughout
  int best_sweep = 0;
  double best_residual = 0.0;
  double rounding_tol = 0.0;
  std::size_t local_direct_solves = 0;
  std::size_t local_iterative_solves = 0;
};

struct SolveResult {
  TTVector x;
  SolveReport report;
};

// Rank-adaptive alternating solver with residual-based enrichment.  Returns
// the best iterate by residual.
SolveResult solve(const TTOperator& a, const TTVector& rhs, const std::optional<TTVector>& x0,
                  const SolverConfig& cfg);

// ||a x - rhs||_F / ||rhs||_F in exact TT arithmetic.
double residual(const TTOperator& a, const TTVector& x, const TTVector& rhs);

}  // namespace ttss
