#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ttss/operator_assembly.hpp"
#include "ttss/problem.hpp"
#include "ttss/tt_solver.hpp"

namespace ttss {

struct MarchConfig {
  double dt = 0.0;
  double t_end = 1.0;
  TimeScheme scheme = TimeScheme::BackwardEuler;
  double step_rounding_tol = 1e-8;
  int stride = 1;  // keep every stride-th state (the final state is always kept)

  void validate() const;
  static MarchConfig from_spec(const ProblemSpec& spec);
};

struct StepDiagnostics {
  int step = 0;
  double t = 0.0;
  double peak_norm = 0.0;
  int max_rank = 0;
  double compression = 0.0;
  double residual = 0.0;
};

struct Trajectory {
  std::vector<double> times;       // times of the kept states
  std::vector<TTVector> states;
  std::vector<StepDiagnostics> diagnostics;  // one per step, step 0 is the initial state
  int steps = 0;

  std::string diagnostics_csv() const;
};

// Optional scalar diagnostic of a state (for example a sup-norm on a grid).
using PeakFunction = std::function<double(const TTVector&)>;

int march_steps(const MarchConfig& cfg);

// Identity rows of a masked system: x <- m.x + (1-m).target.
TTVector enforce_identity_rows(const TTVector& x, const std::vector<std::vector<double>>& mask,
                               const TTVector& target);

// Interior source at time t for a marching scheme (no time derivative term
// from the equation, but the manufactured one is included).
TTVector source_at(const DiscreteOperatorSet& ops, const ProblemSpec& spec, double t);

// f^{k+1} - dt*L f^{k+1} = f^k + dt*b^{k+1} on interior rows.  Throws
// StagnationError carrying the step index when an inner solve stalls.
Trajectory backward_euler_march(const DiscreteOperatorSet& ops, const ProblemSpec& spec, const MarchConfig& cfg,
                                const SolverConfig& solver = {}, const PeakFunction& peak = {});

// Trapezoidal splitting: (I + dt/2 A) f^{k+1} = (I - dt/2 A) f^k + dt/2 (b^k + b^{k+1}).
Trajectory crank_nicolson_march(const DiscreteOperatorSet& ops, const ProblemSpec& spec, const MarchConfig& cfg,
                                const SolverConfig& solver = {}, const PeakFunction& peak = {});

struct SpaceTimeResult {
  TTVector x;  // modes: spatial..., time
  SolveReport report;
  TimeGrid time;
};

SpaceTimeResult spacetime_solve(const ProblemSpec& spec, const SolverConfig& solver = {});
SpaceTimeResult spacetime_solve(const DiscreteOperatorSet& ops, const ProblemSpec& spec,
                                const SolverConfig& solver = {});

// Spatial slice of a space-time solution at time index k.
TTVector time_slice(const TTVector& x, int k);

}  // namespace ttss
