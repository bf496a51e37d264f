#include "ttss/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "ttss/errors.hpp"
#include "ttss/spectral1d.hpp"

namespace ttss {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// f(x_dim) in dimension `dim`, constant 1 in the others.
SeparableFunction along(int dims, int dim, const Factor& f) {
  std::vector<Factor> fs(dims, Factor(Univariate::constant(1.0)));
  fs[dim] = f;
  return SeparableFunction::product(std::move(fs));
}

std::vector<std::vector<double>> rep_nodes(const DiscreteOperatorSet& ops) {
  std::vector<std::vector<double>> nodes;
  for (const auto& g : ops.grids) nodes.push_back(g.base.rep_nodes);
  return nodes;
}

double mean_over(const std::vector<double>& x, const std::vector<double>& v, double lo, double hi) {
  double s = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= lo && x[i] <= hi) {
      s += v[i];
      ++n;
    }
  return n ? s / n : std::nan("");
}

json solve_summary(const SolveReport& r, const TTVector& x) {
  return {{"residual", r.best_residual},
          {"converged", r.converged},
          {"stagnated", r.stagnated},
          {"sweeps", r.residual_history.size()},
          {"max_rank", x.max_rank()},
          {"ranks", x.ranks()},
          {"compression", compression_ratio(x)},
          {"solve_time_s", r.wall_time}};
}

std::string placement_name(const Placement& p) {
  switch (p.kind) {
    case Placement::Kind::Auto: return "auto";
    case Placement::Kind::Fixed: return "fixed";
    case Placement::Kind::Gauss: return "gauss";
    case Placement::Kind::Gll: return "gll";
  }
  return "?";
}

std::string scheme_name(TimeScheme s) {
  switch (s) {
    case TimeScheme::SpaceTime: return "spacetime";
    case TimeScheme::BackwardEuler: return "be";
    case TimeScheme::CrankNicolson: return "cn";
  }
  return "?";
}

BenchmarkResult spacetime_convergence(const std::string& name, const std::vector<int>& degrees,
                                      const std::function<ProblemSpec(int)>& make, const SolverConfig& solver) {
  BenchmarkResult res;
  res.name = name;
  const auto t0 = Clock::now();
  for (int n : degrees) {
    const auto t1 = Clock::now();
    const ProblemSpec spec = make(n);
    const DiscreteOperatorSet ops = assemble(spec);
    SpaceTimeResult st = spacetime_solve(ops, spec, solver);
    const TTVector exact = exact_spacetime_samples(ops, spec);
    json c = solve_summary(st.report, st.x);
    c["degree"] = n;
    c["dofs_per_dim"] = n + 1;
    c["total_dofs"] = std::pow(double(n + 1), double(spec.dims + 1));
    c["error"] = relative_error(st.x, exact);
    c["max_error"] = max_abs_difference(st.x, exact);
    c["exact_max_rank"] = exact.max_rank();
    c["full_format"] = full_format_estimate(n + 1, spec.dims + 1);
    c["wall_time_s"] = seconds_since(t1);
    res.cases.push_back(c);
    res.reports.push_back(st.report);
  }
  res.wall_time = seconds_since(t0);
  return res;
}

}  // namespace

json report_to_json(const SolveReport& r) {
  return {{"residuals", r.residual_history},
          {"ranks", r.rank_history},
          {"compression", r.compression_history},
          {"wall_time_s", r.wall_time},
          {"converged", r.converged},
          {"stagnated", r.stagnated},
          {"best_sweep", r.best_sweep},
          {"best_residual", r.best_residual},
          {"rounding_tol", r.rounding_tol},
          {"local_direct_solves", r.local_direct_solves},
          {"local_iterative_solves", r.local_iterative_solves}};
}

json BenchmarkResult::to_json() const {
  json j;
  j["name"] = name;
  j["parameters"] = parameters;
  j["cases"] = cases;
  j["reports"] = json::array();
  for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
  j["artifacts"] = artifacts;
  j["wall_time_s"] = wall_time;
  return j;
}

ProblemSpec manufactured_spec(int degree, bool low_frequency, int dims, double epsilon, double t_end) {
  ProblemSpec s;
  s.dims = dims;
  s.degrees.assign(dims, degree);
  s.epsilon = SeparableFunction::constant(epsilon, dims);
  for (int l = 0; l < dims; ++l) s.beta.push_back(along(dims, l, Univariate::sin_pi_k(1.0)));
  // 1/2 - (x+11/10)(x-1/2)(x+1/2)(x-11/10)
  const Univariate quartic = Univariate::poly({0.1975, 0.0, 1.46, 0.0, -1.0});
  s.rho = SeparableFunction::product(std::vector<Factor>(dims, Factor(quartic)));
  Factor space = low_frequency ? Factor(Univariate::sin_pi_k(1.0))
                               : Factor({Univariate::sin_pi_k(1.0), Univariate::sin_pi_k(80.0, 0.3)});
  std::vector<Factor> fs(dims, space);
  fs.push_back(Univariate::exp(1.0));
  s.exact = SeparableFunction::product(std::move(fs));
  TimeSpec t;
  t.t_end = t_end;
  t.scheme = TimeScheme::SpaceTime;
  s.time = t;
  return s;
}

ProblemSpec constant_spec(int degree, int dims, double epsilon, double t_end) {
  ProblemSpec s;
  s.dims = dims;
  s.degrees.assign(dims, degree);
  s.epsilon = SeparableFunction::constant(epsilon, dims);
  for (int l = 0; l < dims; ++l) s.beta.push_back(SeparableFunction::constant(1.0, dims));
  s.rho = SeparableFunction::constant(0.0, dims);
  std::vector<Factor> fs(dims, Factor(Univariate::sin_pi_k(1.0)));
  fs.push_back(Univariate::exp(-1.0));
  s.exact = SeparableFunction::product(std::move(fs));
  TimeSpec t;
  t.t_end = t_end;
  s.time = t;
  return s;
}

ProblemSpec boundary_layer_spec(int degree, int dims, double epsilon) {
  return sweep_problem(dims, degree, epsilon, SweepMethod::T2S2);
}

ProblemSpec hughes_spec(int degree, double epsilon, Stabilization st) {
  ProblemSpec s;
  s.dims = 2;
  s.degrees = {degree, degree};
  s.epsilon = SeparableFunction::constant(epsilon, 2);
  s.beta = {SeparableFunction::constant(1.0, 2), SeparableFunction::constant(3.0, 2)};
  s.rho = SeparableFunction::constant(0.0, 2);
  s.rhs = SeparableFunction::constant(0.0, 2);
  // 1 on every boundary point with x1 <= 0, 0 elsewhere.
  s.dirichlet = SeparableFunction::product(
      {Univariate::step(0.0, 1.0, 0.0), Univariate::constant(1.0).support(-1.0, 1.0)});
  s.stabilization = st;
  return s;
}

ProblemSpec bump_spec(int degree, TimeScheme scheme) {
  ProblemSpec s;
  s.dims = 2;
  s.degrees = {degree, degree};
  s.epsilon = SeparableFunction::constant(1e-6, 2);
  s.beta = {SeparableFunction::product({Univariate::constant(1.0), Univariate::poly({0.0, -1.0})}),
            SeparableFunction::product({Univariate::poly({0.0, 1.0}), Univariate::constant(1.0)})};
  s.rho = SeparableFunction::constant(0.0, 2);
  s.rhs = SeparableFunction::constant(0.0, 2);
  s.dirichlet = SeparableFunction::constant(0.0, 2);
  // 16 (1-4x1^2)^2 (1-4(x2-1/2)^2)^2 on -1/2 <= x1 < 1/2, 0 < x2 < 1.
  s.initial = SeparableFunction::product(
      {Univariate::poly({1.0, 0.0, -8.0, 0.0, 16.0}).support(-0.5, 0.5),
       Univariate::poly({0.0, 0.0, 16.0, -32.0, 16.0}).support(0.0, 1.0)},
      16.0);
  TimeSpec t;
  t.t_end = std::numbers::pi;
  t.scheme = scheme;
  t.dt = std::numbers::pi / 160.0;
  s.time = t;
  return s;
}

ProblemSpec viscosity_spec(int degree, Stabilization st) {
  ProblemSpec s;
  s.dims = 1;
  s.degrees = {degree};
  s.epsilon = SeparableFunction::constant(1e-5, 1);
  s.beta = {SeparableFunction::constant(0.5, 1)};
  s.rho = SeparableFunction::constant(0.0, 1);
  s.rhs = SeparableFunction::constant(1.0, 1);
  s.dirichlet = SeparableFunction::constant(0.0, 1);
  s.stabilization = st;
  return s;
}

TTVector exact_spacetime_samples(const DiscreteOperatorSet& ops, const ProblemSpec& spec) {
  if (!spec.exact) throw InvalidArgument("exact_spacetime_samples: no exact solution");
  auto pts = rep_nodes(ops);
  pts.push_back(time_grid(spec).times);
  return sample_separable(*spec.exact, pts);
}

BenchmarkResult benchmark_manufactured_6d(const ManufacturedConfig& cfg) {
  BenchmarkResult r = spacetime_convergence(
      "manufactured6d", cfg.degrees,
      [&](int n) { return manufactured_spec(n, cfg.low_frequency, cfg.dims, cfg.epsilon); }, cfg.solver);
  r.parameters = {{"dims", cfg.dims},
                  {"epsilon", cfg.epsilon},
                  {"low_frequency", cfg.low_frequency},
                  {"degrees", cfg.degrees},
                  {"t_end", 1.0},
                  {"rounding_tol", cfg.solver.rounding_tol},
                  {"residual_tol", cfg.solver.residual_tol}};
  return r;
}

BenchmarkResult benchmark_constant6d(const ConstantConfig& cfg) {
  BenchmarkResult r = spacetime_convergence(
      "constant6d", cfg.degrees, [&](int n) { return constant_spec(n, cfg.dims, cfg.epsilon); }, cfg.solver);
  r.parameters = {{"dims", cfg.dims},
                  {"epsilon", cfg.epsilon},
                  {"degrees", cfg.degrees},
                  {"t_end", 1.0},
                  {"rounding_tol", cfg.solver.rounding_tol},
                  {"residual_tol", cfg.solver.residual_tol}};
  return r;
}

BenchmarkResult benchmark_boundary_layer6d(const BoundaryLayerConfig& cfg) {
  BenchmarkResult res;
  res.name = "boundary_layer6d";
  res.parameters = {{"dims", cfg.dims},
                    {"degree", cfg.degree},
                    {"epsilon", cfg.epsilon},
                    {"rounding_tol", cfg.solver.rounding_tol},
                    {"tolerance_scan", cfg.tolerance_scan}};
  const auto t0 = Clock::now();
  const ProblemSpec spec = boundary_layer_spec(cfg.degree, cfg.dims, cfg.epsilon);
  const DiscreteOperatorSet ops = assemble(spec);
  auto [a, rhs] = impose_dirichlet(ops, spec);
  std::vector<double> tols{cfg.solver.rounding_tol};
  tols.insert(tols.end(), cfg.tolerance_scan.begin(), cfg.tolerance_scan.end());
  for (double tol : tols) {
    SolverConfig sc = cfg.solver;
    sc.rounding_tol = tol;
    SolveResult r = solve(a, rhs, std::nullopt, sc);
    json c = solve_summary(r.report, r.x);
    c["degree"] = cfg.degree;
    c["epsilon"] = cfg.epsilon;
    c["rounding_tol"] = tol;
    c["residual_history"] = r.report.residual_history;
    c["rank_history"] = r.report.rank_history;
    c["oscillation_count"] = oscillation_count(midline(r.x, rep_nodes(ops), 0));
    res.cases.push_back(c);
    res.reports.push_back(r.report);
  }
  res.wall_time = seconds_since(t0);
  return res;
}

BenchmarkResult benchmark_hughes(const HughesConfig& cfg) {
  BenchmarkResult res;
  res.name = "hughes";
  res.parameters = {{"degree", cfg.degree},
                    {"epsilons", cfg.epsilons},
                    {"beta", {1.0, 3.0}},
                    {"reference_factor", cfg.reference_factor}};
  const auto t0 = Clock::now();
  struct Run {
    std::vector<double> xs, line;
    SolveReport rep;
    TTVector x;
  };
  std::map<std::pair<double, int>, Run> runs;
  auto run = [&](double eps, Stabilization st) -> const Run& {
    auto key = std::make_pair(eps, static_cast<int>(st));
    auto it = runs.find(key);
    if (it != runs.end()) return it->second;
    const ProblemSpec spec = hughes_spec(cfg.degree, eps, st);
    const DiscreteOperatorSet ops = assemble(spec);
    auto [a, rhs] = impose_dirichlet(ops, spec);
    SolveResult r = solve(a, rhs, std::nullopt, cfg.solver);
    Run out{ops.grids[0].base.rep_nodes, midline(r.x, rep_nodes(ops), 0), r.report, r.x};
    return runs.emplace(key, std::move(out)).first->second;
  };
  auto wants_plain = [&](double eps) {
    return !cfg.plain_epsilons ||
           std::find(cfg.plain_epsilons->begin(), cfg.plain_epsilons->end(), eps) !=
               cfg.plain_epsilons->end();
  };
  for (double eps : cfg.epsilons) {
    const int expected = oscillation_count(run(eps * cfg.reference_factor, Stabilization::Superconsistent).line);
    for (Stabilization st : {Stabilization::Plain, Stabilization::Superconsistent}) {
      if (st == Stabilization::Plain && !wants_plain(eps)) continue;
      const Run& r = run(eps, st);
      const auto& xs = r.xs;
      const auto& line = r.line;
      json c = solve_summary(r.rep, r.x);
      c["degree"] = cfg.degree;
      c["epsilon"] = eps;
      c["method"] = st == Stabilization::Plain ? "plain" : "t2s2";
      c["oscillation_count"] = oscillation_count(line);
      c["expected_count"] = expected;
      c["plateau_left"] = mean_over(xs, line, -0.9, 0.0);
      c["plateau_right"] = mean_over(xs, line, 0.6, 0.95);
      double lo = line[0], hi = line[0];
      for (double v : line) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      c["line_min"] = lo;
      c["line_max"] = hi;
      c["midline"] = line;
      c["midline_x"] = xs;
      res.cases.push_back(c);
      res.reports.push_back(r.rep);
    }
  }
  res.wall_time = seconds_since(t0);
  return res;
}

double bump_peak(const TTVector& x, const std::vector<std::vector<double>>& nodes, int m) {
  std::vector<double> u(m);
  for (int i = 0; i < m; ++i) u[i] = -1.0 + 2.0 * i / (m - 1);
  const DenseTensor f = tt_full(tt_interpolate(x, nodes, {u, u}));
  double p = 0.0;
  for (double v : f.data) p = std::max(p, std::abs(v));
  return p / 16.0;
}

namespace {

// max |f_T(x) - f_0(-x)| / 16 on the uniform grid.
double mirror_error(const TTVector& f0, const TTVector& ft, const std::vector<std::vector<double>>& nodes, int m) {
  std::vector<double> u(m);
  for (int i = 0; i < m; ++i) u[i] = -1.0 + 2.0 * i / (m - 1);
  std::vector<double> v(u.rbegin(), u.rend());
  const DenseTensor a = tt_full(tt_interpolate(ft, nodes, {u, u}));
  const DenseTensor b = tt_full(tt_interpolate(f0, nodes, {v, v}));
  double e = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) e = std::max(e, std::abs(a.data[i] - b.data[i]));
  return e / 16.0;
}

}  // namespace

BenchmarkResult benchmark_bump(const BumpConfig& cfg) {
  BenchmarkResult res;
  res.name = "bump";
  ProblemSpec spec = bump_spec(cfg.degree, cfg.scheme);
  if (cfg.dt > 0.0) spec.time->dt = cfg.dt;
  spec.placement.assign(2, cfg.placement);
  res.parameters = {{"degree", cfg.degree},
                    {"scheme", scheme_name(cfg.scheme)},
                    {"dt", spec.time->dt},
                    {"t_end", spec.time->t_end},
                    {"epsilon", 1e-6},
                    {"placement", placement_name(cfg.placement)},
                    {"eval_points", cfg.eval_points}};
  const auto t0 = Clock::now();
  const DiscreteOperatorSet ops = assemble(spec);
  const auto nodes = rep_nodes(ops);
  const int m = cfg.eval_points;
  json c;
  c["degree"] = cfg.degree;
  c["scheme"] = scheme_name(cfg.scheme);
  json series = json::array();
  TTVector f0 = initial_samples(ops, spec), ft;
  if (cfg.scheme == TimeScheme::SpaceTime) {
    SpaceTimeResult st = spacetime_solve(ops, spec, cfg.solver);
    for (std::size_t k = 0; k < st.time.times.size(); ++k)
      series.push_back({{"t", st.time.times[k]}, {"peak", bump_peak(time_slice(st.x, int(k)), nodes, m)}});
    ft = time_slice(st.x, int(st.time.times.size()) - 1);
    c.update(solve_summary(st.report, st.x));
    res.reports.push_back(st.report);
  } else {
    MarchConfig mc = MarchConfig::from_spec(spec);
    mc.stride = march_steps(mc);
    auto peak = [&](const TTVector& x) { return bump_peak(x, nodes, m); };
    Trajectory tr = cfg.scheme == TimeScheme::BackwardEuler ? backward_euler_march(ops, spec, mc, cfg.solver, peak)
                                                            : crank_nicolson_march(ops, spec, mc, cfg.solver, peak);
    for (const auto& d : tr.diagnostics)
      series.push_back({{"t", d.t}, {"peak", d.peak_norm}, {"max_rank", d.max_rank}, {"residual", d.residual}});
    ft = tr.states.back();
    c["steps"] = tr.steps;
    c["diagnostics_csv"] = tr.diagnostics_csv();
    c["max_rank"] = ft.max_rank();
  }
  c["initial_peak"] = bump_peak(f0, nodes, m);
  c["final_peak"] = series.back()["peak"];
  c["mirror_error"] = mirror_error(f0, ft, nodes, m);
  c["series"] = series;
  res.cases.push_back(c);
  res.wall_time = seconds_since(t0);
  return res;
}

BenchmarkResult benchmark_artificial_viscosity(const ViscosityConfig& cfg) {
  BenchmarkResult res;
  res.name = "viscosity";
  res.parameters = {{"degrees", cfg.degrees}, {"beta", 0.5}, {"epsilon", 1e-5}};
  const auto t0 = Clock::now();
  struct Sol {
    std::vector<double> nodes, values;
  };
  auto run = [&](int n, Stabilization st, double eps_scale, SolveReport* rep) {
    ProblemSpec spec = viscosity_spec(n, st);
    if (eps_scale != 1.0) spec.epsilon = SeparableFunction::constant(1e-5 * eps_scale, 1);
    const DiscreteOperatorSet ops = assemble(spec);
    auto [a, rhs] = impose_dirichlet(ops, spec);
    SolveResult r = solve(a, rhs, std::nullopt, cfg.solver);
    if (rep) *rep = r.report;
    return Sol{ops.grids[0].base.rep_nodes, tt_full(r.x).data};
  };
  const int nref = *std::max_element(cfg.degrees.begin(), cfg.degrees.end());
  const Sol ref = run(nref, Stabilization::Plain, 1.0, nullptr);
  for (int n : cfg.degrees) {
    const int expected = oscillation_count(run(n, Stabilization::Superconsistent, 1e3, nullptr).values);
    for (Stabilization st : {Stabilization::Superconsistent, Stabilization::Plain}) {
      SolveReport rep;
      const Sol s = run(n, st, 1.0, &rep);
      const Matrix e = eval_matrix(s.nodes, ref.nodes);
      const Vector on_ref = e * Eigen::Map<const Vector>(s.values.data(), Eigen::Index(s.values.size()));
      double delta = 0.0;
      for (std::size_t i = 0; i < ref.values.size(); ++i) delta = std::max(delta, std::abs(on_ref[i] - ref.values[i]));
      json c;
      c["degree"] = n;
      c["method"] = st == Stabilization::Plain ? "plain" : "t2s2";
      c["oscillation_count"] = oscillation_count(s.values);
      c["expected_count"] = expected;
      c["max_delta_vs_reference"] = delta;
      c["reference_degree"] = nref;
      c["residual"] = rep.best_residual;
      c["max_value"] = *std::max_element(s.values.begin(), s.values.end());
      res.cases.push_back(c);
      res.reports.push_back(rep);
    }
  }
  res.wall_time = seconds_since(t0);
  return res;
}

std::string full_format_estimate(int points, int modes) {
  const double dofs = std::pow(double(points), double(modes));
  const double flops = dofs * dofs;
  const double seconds = flops / 2.7e18;
  const double years = seconds / (365.25 * 24 * 3600);
  const double bytes = dofs * 8.0;
  std::ostringstream os;
  os.precision(3);
  os << points << "^" << modes << " = " << dofs << " unknowns; quadratic solve ~" << flops << " flop, ~" << years
     << " years at 2.7e18 flop/s; dense vector " << bytes << " bytes";
  return os.str();
}

}  // namespace ttss
