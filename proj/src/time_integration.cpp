#include "ttss/time_integration.hpp"

#include <cmath>
#include <sstream>

#include "ttss/errors.hpp"

namespace ttss {

namespace {

// mask*(M + s*interior) + (I - mask)
TTOperator step_operator(const DiscreteOperatorSet& ops, double s) {
  const auto mask = interior_mask_factors(ops.grids);
  TTOperator body = op_add(ops.mass, op_scale(ops.interior, s));
  TTOperator comp = op_add(op_identity(ops.modes()), op_scale(ops.mask_interior, -1.0));
  return op_round(op_add(op_mask_rows(body, mask), comp), 1e-13);
}

StepDiagnostics diagnose(int step, double t, const TTVector& x, double res, const PeakFunction& peak) {
  StepDiagnostics d;
  d.step = step;
  d.t = t;
  d.peak_norm = peak ? peak(x) : 0.0;
  d.max_rank = x.max_rank();
  d.compression = compression_ratio(x);
  d.residual = res;
  return d;
}

Trajectory march(const DiscreteOperatorSet& ops, const ProblemSpec& spec, const MarchConfig& cfg,
                 const SolverConfig& solver, const PeakFunction& peak, bool crank_nicolson) {
  cfg.validate();
  solver.validate();
  const auto mask = interior_mask_factors(ops.grids);
  const TTVector m = tt_rank1(mask);
  const int steps = march_steps(cfg);

  Trajectory traj;
  traj.steps = steps;
  TTVector f = initial_samples(ops, spec);
  f = enforce_identity_rows(f, mask, boundary_samples(ops, spec, 0.0));
  traj.times.push_back(0.0);
  traj.states.push_back(f);
  traj.diagnostics.push_back(diagnose(0, 0.0, f, 0.0, peak));

  double cached_dt = -1.0;
  TTOperator lhs, explicit_part;
  TTVector b_prev = crank_nicolson ? source_at(ops, spec, 0.0) : TTVector{};
  double t = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double dt = std::min(cfg.dt, cfg.t_end - t);
    const double t1 = k == steps ? cfg.t_end : t + dt;
    if (dt != cached_dt) {
      const double s = crank_nicolson ? 0.5 * dt : dt;
      lhs = step_operator(ops, s);
      if (crank_nicolson) explicit_part = op_add(ops.mass, op_scale(ops.interior, -s));
      cached_dt = dt;
    }
    TTVector b_next = source_at(ops, spec, t1);
    TTVector interior_rhs;
    if (crank_nicolson) {
      interior_rhs = tt_add(tt_apply(explicit_part, f), tt_scale(tt_add(b_prev, b_next), 0.5 * dt));
    } else {
      interior_rhs = tt_add(tt_apply(ops.mass, f), tt_scale(b_next, dt));
    }
    const TTVector g = boundary_samples(ops, spec, t1);
    TTVector rhs = tt_add(tt_hadamard(m, interior_rhs), tt_sub(g, tt_hadamard(m, g)));
    rhs = tt_round(rhs, 0.01 * cfg.step_rounding_tol);

    SolveResult r = solve(lhs, rhs, f, solver);
    if (r.report.stagnated && !r.report.converged) {
      std::ostringstream os;
      os << "time step " << k << " (t = " << t1 << "): inner solve stagnated at residual "
         << r.report.best_residual;
      throw StagnationError(os.str(), k, r.report.best_residual);
    }
    f = tt_round(r.x, cfg.step_rounding_tol);
    f = enforce_identity_rows(f, mask, g);
    t = t1;
    b_prev = std::move(b_next);

    traj.diagnostics.push_back(diagnose(k, t, f, r.report.best_residual, peak));
    if (k % cfg.stride == 0 || k == steps) {
      traj.times.push_back(t);
      traj.states.push_back(f);
    }
  }
  return traj;
}

}  // namespace

void MarchConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("march: dt must be positive");
  if (!(t_end > 0.0)) throw InvalidArgument("march: t_end must be positive");
  if (dt > t_end * (1.0 + 1e-12)) throw InvalidArgument("march: dt exceeds t_end");
  if (!(step_rounding_tol > 0.0)) throw InvalidArgument("march: step_rounding_tol must be positive");
  if (stride < 1) throw InvalidArgument("march: stride must be at least 1");
  if (scheme == TimeScheme::SpaceTime) throw InvalidArgument("march: space-time is not a marching scheme");
}

MarchConfig MarchConfig::from_spec(const ProblemSpec& spec) {
  if (!spec.time) throw InvalidArgument("march: problem has no time block");
  MarchConfig c;
  c.dt = spec.time->dt;
  c.t_end = spec.time->t_end;
  c.scheme = spec.time->scheme;
  c.step_rounding_tol = spec.time->step_rounding_tol;
  c.stride = spec.time->stride;
  return c;
}

int march_steps(const MarchConfig& cfg) {
  return std::max(1, static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
}

std::string Trajectory::diagnostics_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "step,t,peak_norm,max_rank,compression,residual\n";
  for (const auto& d : diagnostics)
    os << d.step << ',' << d.t << ',' << d.peak_norm << ',' << d.max_rank << ',' << d.compression << ','
       << d.residual << '\n';
  return os.str();
}

TTVector enforce_identity_rows(const TTVector& x, const std::vector<std::vector<double>>& mask,
                               const TTVector& target) {
  const TTVector m = tt_rank1(mask);
  TTVector outside = tt_sub(target, tt_hadamard(m, target));
  return tt_round(tt_add(tt_hadamard(m, x), outside), 1e-15);
}

TTVector source_at(const DiscreteOperatorSet& ops, const ProblemSpec& spec, double t) {
  const int d = static_cast<int>(ops.grids.size());
  ProblemSpec s = spec;
  s.time.reset();
  if (!s.rhs.empty() && s.rhs.arity() == d + 1) s.rhs = freeze_time(spec.rhs, t);
  TTVector time_term;
  if (s.exact && s.exact->arity() == d + 1) {
    s.exact = freeze_time(*spec.exact, t);
    std::vector<std::vector<double>> pts;
    for (const auto& g : ops.grids)
      pts.push_back(ops.companions == Companions::Collocated ? collocation_points(g) : g.base.rep_nodes);
    time_term = sample_separable(freeze_time(*spec.exact, t, 1), pts);
  }
  TTVector src = collocated_source(ops, s);
  if (time_term.dims() > 0) src = tt_round(tt_add(src, time_term), 1e-14);
  return src;
}

Trajectory backward_euler_march(const DiscreteOperatorSet& ops, const ProblemSpec& spec, const MarchConfig& cfg,
                                const SolverConfig& solver, const PeakFunction& peak) {
  return march(ops, spec, cfg, solver, peak, false);
}

Trajectory crank_nicolson_march(const DiscreteOperatorSet& ops, const ProblemSpec& spec, const MarchConfig& cfg,
                                const SolverConfig& solver, const PeakFunction& peak) {
  return march(ops, spec, cfg, solver, peak, true);
}

SpaceTimeResult spacetime_solve(const ProblemSpec& spec, const SolverConfig& solver) {
  return spacetime_solve(assemble(spec), spec, solver);
}

SpaceTimeResult spacetime_solve(const DiscreteOperatorSet& ops, const ProblemSpec& spec,
                                const SolverConfig& solver) {
  if (!spec.time) throw InvalidArgument("spacetime_solve: problem has no time block");
  auto [a, rhs] = assemble_spacetime(ops, spec);
  SpaceTimeResult out;
  out.time = time_grid(spec);
  SolveResult r = solve(a, rhs, std::nullopt, solver);
  auto mask = interior_mask_factors(ops.grids);
  std::vector<double> tmask(out.time.nodes.size(), 1.0);
  tmask.front() = 0.0;
  mask.push_back(tmask);
  out.x = enforce_identity_rows(r.x, mask, rhs);
  out.report = std::move(r.report);
  return out;
}

TTVector time_slice(const TTVector& x, int k) {
  const int d = x.dims();
  if (d < 2) throw ShapeError("time_slice: need at least one spatial mode");
  const Core3& last = x.core(d - 1);
  if (k < 0 || k >= last.n()) throw InvalidArgument("time_slice: index out of range");
  std::vector<Core3> cores(x.cores().begin(), x.cores().end() - 1);
  Core3& prev = cores.back();
  Core3 merged(prev.r0(), prev.n(), 1);
  for (int a = 0; a < prev.r0(); ++a)
    for (int i = 0; i < prev.n(); ++i) {
      double s = 0.0;
      for (int b = 0; b < prev.r1(); ++b) s += prev(a, i, b) * last(b, k, 0);
      merged(a, i, 0) = s;
    }
  prev = std::move(merged);
  return TTVector(std::move(cores));
}

}  // namespace ttss
