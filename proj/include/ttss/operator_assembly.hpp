#pragma once

#include <utility>
#include <vector>

#include "ttss/problem.hpp"
#include "ttss/superconsistency.hpp"
#include "ttss/tensor_train.hpp"

namespace ttss {

struct DiscreteOperatorSet {
  std::vector<ScGrid1D> grids;
  Companions companions = Companions::Identity;
  TTVector epsilon_tt;
  std::vector<TTVector> beta_tt;
  TTVector rho_tt;
  TTOperator diffusion;      // diag(eps) * sum_l D2_l
  TTOperator convection;     // sum_l diag(beta_l) * D1_l
  TTOperator reaction;       // diag(rho) * kron(E_l)
  TTOperator interior;       // -diffusion + convection + reaction
  TTOperator mask_interior;  // kron(diag(0,1,...,1,0))
  TTOperator mass;           // identity, or kron(E_l) with collocated companions
  TTOperator spatial;        // mask*interior + (I - mask)

  std::vector<int> modes() const;
};

struct TimeGrid {
  std::vector<double> nodes;  // GLL nodes on [-1, 1]
  std::vector<double> times;  // mapped to [0, T]
  Matrix d1;                  // d/dt in physical time
};

// Node values used for coefficient rows: -1, z_1..z_{n-1}, +1.
std::vector<double> collocation_points(const ScGrid1D& g);

// (eps*, beta*) used for node placement in dimension `dim`.
std::pair<double, double> placement_scalars(const ProblemSpec& spec, int dim);

std::vector<ScGrid1D> build_grids(const ProblemSpec& spec);

// Separable function sampled on per-dimension point lists, derivative order
// per dimension (empty = none).
TTVector sample_separable(const SeparableFunction& f, const std::vector<std::vector<double>>& points,
                          const std::vector<int>& derivs = {}, double round_tol = 1e-14);

// Coefficient sampled at the collocation points of each grid.
TTVector coefficient_tt(const SeparableFunction& f, const std::vector<ScGrid1D>& grids);

// sum_l C_1 x ... x L_l x ... x C_d with TT rank 2; C_k = identity when
// `companions` is empty.
TTOperator op_sum_local(const std::vector<Matrix>& locals, const std::vector<Matrix>& companions = {});

// Companion factors for each dimension.
std::vector<Matrix> companion_factors(const std::vector<ScGrid1D>& grids, Companions c);

TTOperator assemble_diffusion(const std::vector<ScGrid1D>& grids, const TTVector& epsilon_tt,
                              Companions c = Companions::Identity);
TTOperator assemble_convection(const std::vector<ScGrid1D>& grids, const std::vector<TTVector>& beta_tts,
                               Companions c = Companions::Identity);
TTOperator assemble_reaction(const std::vector<ScGrid1D>& grids, const TTVector& rho_tt);
TTOperator interior_mask(const std::vector<ScGrid1D>& grids);
std::vector<std::vector<double>> interior_mask_factors(const std::vector<ScGrid1D>& grids);

DiscreteOperatorSet assemble(const ProblemSpec& spec, double op_round_tol = 1e-13);

// Interior source at the collocation rows: b, or for a manufactured problem
// the discrete-consistent image of the exact solution.  `times` selects the
// space-time variant (time mode last).
TTVector collocated_source(const DiscreteOperatorSet& ops, const ProblemSpec& spec,
                           const std::vector<double>* times = nullptr);

// Boundary data at the representation nodes (time t for marching).
TTVector boundary_samples(const DiscreteOperatorSet& ops, const ProblemSpec& spec, double t = 0.0);
TTVector initial_samples(const DiscreteOperatorSet& ops, const ProblemSpec& spec);

std::pair<TTOperator, TTVector> impose_dirichlet(const DiscreteOperatorSet& ops, const ProblemSpec& spec);

TimeGrid time_grid(const ProblemSpec& spec);
std::pair<TTOperator, TTVector> assemble_spacetime(const DiscreteOperatorSet& ops, const ProblemSpec& spec);

// Append a trailing mode: ones for vectors, identity for operators.
TTVector append_ones(const TTVector& v, int n);
TTOperator append_identity(const TTOperator& op, int n);

}  // namespace ttss
