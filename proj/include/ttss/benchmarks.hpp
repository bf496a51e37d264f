#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ttss/diagnostics.hpp"
#include "ttss/operator_assembly.hpp"
#include "ttss/problem.hpp"
#include "ttss/time_integration.hpp"
#include "ttss/tt_solver.hpp"

namespace ttss {

struct BenchmarkResult {
  std::string name;
  nlohmann::json parameters = nlohmann::json::object();
  // One entry per solved case, each tagged with its degree (and epsilon,
  // method, scheme where relevant).
  nlohmann::json cases = nlohmann::json::array();
  std::vector<SolveReport> reports;
  std::vector<std::string> artifacts;
  double wall_time = 0.0;

  nlohmann::json to_json() const;
};

nlohmann::json report_to_json(const SolveReport& r);

// Problem builders (domain [-1,1]^dims, time last).
ProblemSpec manufactured_spec(int degree, bool low_frequency, int dims = 6, double epsilon = 1e-4,
                              double t_end = 1.0);
ProblemSpec constant_spec(int degree, int dims = 6, double epsilon = 1e-6, double t_end = 1.0);
ProblemSpec boundary_layer_spec(int degree, int dims = 6, double epsilon = 1e-5);
ProblemSpec hughes_spec(int degree, double epsilon, Stabilization s);
ProblemSpec bump_spec(int degree = 16, TimeScheme scheme = TimeScheme::SpaceTime);
ProblemSpec viscosity_spec(int degree, Stabilization s);

// Exact solution sampled on the space-time grid of a solved problem.
TTVector exact_spacetime_samples(const DiscreteOperatorSet& ops, const ProblemSpec& spec);

struct ManufacturedConfig {
  std::vector<int> degrees{8, 12, 16, 20, 24, 28, 32};
  bool low_frequency = true;
  int dims = 6;
  double epsilon = 1e-4;
  SolverConfig solver;
};
BenchmarkResult benchmark_manufactured_6d(const ManufacturedConfig& cfg);

struct ConstantConfig {
  std::vector<int> degrees{8, 16, 24};
  int dims = 6;
  double epsilon = 1e-6;
  SolverConfig solver;
};
BenchmarkResult benchmark_constant6d(const ConstantConfig& cfg);

struct BoundaryLayerConfig {
  int degree = 39;
  int dims = 6;
  double epsilon = 1e-5;
  SolverConfig solver;
  std::vector<double> tolerance_scan;  // extra rounding tolerances to report
};
// -eps Lap f + ones . grad f = 1 with homogeneous data (residual/rank study).
BenchmarkResult benchmark_boundary_layer6d(const BoundaryLayerConfig& cfg);

struct HughesConfig {
  std::vector<double> epsilons{1e-3, 1e-6, 1e-9};
  int degree = 63;
  double reference_factor = 1e3;
  std::optional<std::vector<double>> plain_epsilons;  // unset: plain at every epsilon
  SolverConfig solver;
};
BenchmarkResult benchmark_hughes(const HughesConfig& cfg);

struct BumpConfig {
  TimeScheme scheme = TimeScheme::SpaceTime;
  int degree = 16;
  double dt = 0.0;  // 0: pi/160
  int eval_points = 128;
  Placement placement{};  // applied to both dimensions
  SolverConfig solver;
};
BenchmarkResult benchmark_bump(const BumpConfig& cfg);

// Normalized peak max|f|/16 on an m x m uniform grid.
double bump_peak(const TTVector& x, const std::vector<std::vector<double>>& nodes, int m = 128);

struct ViscosityConfig {
  std::vector<int> degrees{63, 387, 1023};
  SolverConfig solver;
};
BenchmarkResult benchmark_artificial_viscosity(const ViscosityConfig& cfg);

// Full-format cost estimate for the manufactured run (never executed).
std::string full_format_estimate(int degree, int modes);

}  // namespace ttss
