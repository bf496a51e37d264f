#include "ttss/operator_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ttss/errors.hpp"

namespace ttss {

namespace {

constexpr double kRound = 1e-14;

// Points where each dimension of an exact-solution term is sampled for one
// operator term: `where[k]` 0 = representation nodes, 1 = collocation points.
std::vector<std::vector<double>> point_lists(const DiscreteOperatorSet& ops, const std::vector<int>& where) {
  std::vector<std::vector<double>> pts;
  for (std::size_t k = 0; k < ops.grids.size(); ++k)
    pts.push_back(where[k] ? collocation_points(ops.grids[k]) : ops.grids[k].base.rep_nodes);
  return pts;
}

TTVector add_round(const TTVector& a, const TTVector& b) { return tt_round(tt_add(a, b), kRound); }

TTVector with_time(const TTVector& v, const std::vector<double>* times) {
  return times ? append_ones(v, static_cast<int>(times->size())) : v;
}

// Adds a trailing point list for the time mode when needed and the function
// depends on time; time-independent functions are extended with ones.
TTVector sample_space_time(const SeparableFunction& f, std::vector<std::vector<double>> pts,
                           std::vector<int> derivs, const std::vector<double>* times, int time_deriv = 0) {
  const int d = static_cast<int>(pts.size());
  derivs.resize(d, 0);
  if (f.arity() == d + 1) {
    if (!times) throw InvalidArgument("time-dependent data in a stationary problem");
    pts.push_back(*times);
    derivs.push_back(time_deriv);
    return sample_separable(f, pts, derivs);
  }
  if (time_deriv > 0) return tt_zeros([&] {
      std::vector<int> m;
      for (auto& p : pts) m.push_back(static_cast<int>(p.size()));
      if (times) m.push_back(static_cast<int>(times->size()));
      return m;
    }());
  return with_time(sample_separable(f, pts, derivs), times);
}

}  // namespace

std::vector<int> DiscreteOperatorSet::modes() const {
  std::vector<int> m;
  for (const auto& g : grids) m.push_back(g.degree() + 1);
  return m;
}

std::vector<double> collocation_points(const ScGrid1D& g) {
  std::vector<double> p;
  p.push_back(-1.0);
  p.insert(p.end(), g.coll_nodes.begin(), g.coll_nodes.end());
  p.push_back(1.0);
  return p;
}

std::pair<double, double> placement_scalars(const ProblemSpec& spec, int dim) {
  const std::vector<double> axis = gll_nodes(spec.degrees[dim]);
  std::vector<double> pt(spec.dims, 0.0);
  double eps_star = std::numeric_limits<double>::infinity();
  double beta_star = 0.0;
  for (double x : axis) {
    pt[dim] = x;
    eps_star = std::min(eps_star, spec.epsilon.eval(pt));
    double b = spec.beta[dim].eval(pt);
    if (std::abs(b) > std::abs(beta_star)) beta_star = b;
  }
  return {eps_star, beta_star};
}

std::vector<ScGrid1D> build_grids(const ProblemSpec& spec) {
  std::vector<ScGrid1D> grids;
  for (int k = 0; k < spec.dims; ++k) {
    const int n = spec.degrees[k];
    if (spec.stabilization == Stabilization::Plain) {
      auto [e, b] = placement_scalars(spec, k);
      grids.push_back(plain_grid(n, e, b));
      continue;
    }
    Placement p = spec.placement.empty() ? Placement{} : spec.placement[k];
    switch (p.kind) {
      case Placement::Kind::Auto: {
        auto [e, b] = placement_scalars(spec, k);
        grids.push_back(sc_grid(n, e, b));
        break;
      }
      case Placement::Kind::Fixed:
        grids.push_back(sc_grid(n, p.epsilon, p.beta));
        break;
      case Placement::Kind::Gll:
        grids.push_back(sc_grid(n, 1.0, 0.0));
        break;
      case Placement::Kind::Gauss: {
        std::vector<double> g = gauss_nodes(n);
        if (p.beta < 0) g.erase(g.begin()); else g.pop_back();
        ScGrid1D grid = collocation_grid(n, g);
        grid.epsilon = 0.0;
        grid.beta = p.beta < 0 ? -1.0 : 1.0;
        grids.push_back(std::move(grid));
        break;
      }
    }
  }
  return grids;
}

TTVector sample_separable(const SeparableFunction& f, const std::vector<std::vector<double>>& points,
                          const std::vector<int>& derivs, double round_tol) {
  const int d = static_cast<int>(points.size());
  std::vector<int> modes;
  for (const auto& p : points) modes.push_back(static_cast<int>(p.size()));
  if (f.empty()) return tt_zeros(modes);
  if (f.arity() != d) throw ShapeError("sample_separable: arity does not match the point lists");
  if (!derivs.empty() && static_cast<int>(derivs.size()) != d)
    throw ShapeError("sample_separable: one derivative order per dimension expected");
  std::vector<SeparableTerm> terms;
  for (const auto& t : f.terms) {
    SeparableTerm s;
    s.scale = t.scale;
    for (int k = 0; k < d; ++k) {
      const int m = derivs.empty() ? 0 : derivs[k];
      std::vector<double> v(points[k].size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = t.factors[k].eval(points[k][i], m);
      s.factors.push_back(std::move(v));
    }
    terms.push_back(std::move(s));
  }
  TTVector out = tt_from_separable(terms);
  return terms.size() > 1 ? tt_round(out, round_tol) : out;
}

TTVector coefficient_tt(const SeparableFunction& f, const std::vector<ScGrid1D>& grids) {
  std::vector<std::vector<double>> pts;
  for (const auto& g : grids) pts.push_back(collocation_points(g));
  return sample_separable(f, pts);
}

std::vector<Matrix> companion_factors(const std::vector<ScGrid1D>& grids, Companions c) {
  std::vector<Matrix> out;
  for (const auto& g : grids)
    out.push_back(c == Companions::Collocated ? embed_rows(g.c0, true)
                                              : Matrix::Identity(g.degree() + 1, g.degree() + 1));
  return out;
}

TTOperator op_sum_local(const std::vector<Matrix>& locals, const std::vector<Matrix>& companions) {
  const int d = static_cast<int>(locals.size());
  if (d == 0) throw ShapeError("op_sum_local: no factors");
  if (!companions.empty() && static_cast<int>(companions.size()) != d)
    throw ShapeError("op_sum_local: one companion per dimension");
  if (d == 1) return op_kron(locals);
  std::vector<Core4> cores;
  for (int k = 0; k < d; ++k) {
    const Matrix& l = locals[k];
    const int m = static_cast<int>(l.rows()), n = static_cast<int>(l.cols());
    if (m != n) throw ShapeError("op_sum_local: local operators must be square");
    const Matrix id = companions.empty() ? Matrix::Identity(m, n) : companions[k];
    if (id.rows() != m || id.cols() != n) throw ShapeError("op_sum_local: companion shape");
    if (k == 0) {
      Core4 c(1, m, n, 2);
      c.set_slice(0, 0, l);
      c.set_slice(0, 1, id);
      cores.push_back(std::move(c));
    } else if (k == d - 1) {
      Core4 c(2, m, n, 1);
      c.set_slice(0, 0, id);
      c.set_slice(1, 0, l);
      cores.push_back(std::move(c));
    } else {
      Core4 c(2, m, n, 2);
      c.set_slice(0, 0, id);
      c.set_slice(1, 0, l);
      c.set_slice(1, 1, id);
      cores.push_back(std::move(c));
    }
  }
  return TTOperator(std::move(cores));
}

TTOperator assemble_diffusion(const std::vector<ScGrid1D>& grids, const TTVector& epsilon_tt, Companions c) {
  std::vector<Matrix> d2;
  for (const auto& g : grids) d2.push_back(embed_rows(g.c2, false));
  TTOperator lap = op_sum_local(d2, companion_factors(grids, c));
  if (epsilon_tt.modes() != lap.row_modes()) throw ShapeError("assemble_diffusion: coefficient modes");
  return op_compose(op_diag(epsilon_tt), lap);
}

TTOperator assemble_convection(const std::vector<ScGrid1D>& grids, const std::vector<TTVector>& beta_tts,
                               Companions c) {
  const int d = static_cast<int>(grids.size());
  if (static_cast<int>(beta_tts.size()) != d) throw ShapeError("assemble_convection: one coefficient per dimension");
  const std::vector<Matrix> ids = companion_factors(grids, c);
  TTOperator total;
  for (int l = 0; l < d; ++l) {
    std::vector<Matrix> f = ids;
    f[l] = embed_rows(grids[l].c1, false);
    if (beta_tts[l].dims() != d)
      throw ShapeError("assemble_convection: coefficient modes");
    TTOperator term = op_compose(op_diag(beta_tts[l]), op_kron(f));
    total = l == 0 ? term : op_round(op_add(total, term), 1e-13);
  }
  return total;
}

TTOperator assemble_reaction(const std::vector<ScGrid1D>& grids, const TTVector& rho_tt) {
  std::vector<Matrix> e;
  for (const auto& g : grids) e.push_back(embed_rows(g.c0, true));
  return op_compose(op_diag(rho_tt), op_kron(e));
}

std::vector<std::vector<double>> interior_mask_factors(const std::vector<ScGrid1D>& grids) {
  std::vector<std::vector<double>> m;
  for (const auto& g : grids) {
    std::vector<double> v(g.degree() + 1, 1.0);
    v.front() = 0.0;
    v.back() = 0.0;
    m.push_back(std::move(v));
  }
  return m;
}

TTOperator interior_mask(const std::vector<ScGrid1D>& grids) {
  std::vector<Matrix> f;
  for (const auto& v : interior_mask_factors(grids))
    f.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())).asDiagonal());
  return op_kron(f);
}

DiscreteOperatorSet assemble(const ProblemSpec& spec, double op_round_tol) {
  spec.validate();
  DiscreteOperatorSet ops;
  ops.grids = build_grids(spec);
  ops.companions = spec.companions;
  ops.epsilon_tt = coefficient_tt(spec.epsilon, ops.grids);
  for (const auto& b : spec.beta) ops.beta_tt.push_back(coefficient_tt(b, ops.grids));
  ops.rho_tt = coefficient_tt(spec.rho, ops.grids);
  ops.diffusion = assemble_diffusion(ops.grids, ops.epsilon_tt, ops.companions);
  ops.convection = assemble_convection(ops.grids, ops.beta_tt, ops.companions);
  ops.reaction = assemble_reaction(ops.grids, ops.rho_tt);
  ops.interior = op_round(op_add(op_add(op_scale(ops.diffusion, -1.0), ops.convection), ops.reaction),
                          op_round_tol);
  ops.mask_interior = interior_mask(ops.grids);
  ops.mass = op_kron(companion_factors(ops.grids, ops.companions));
  TTOperator complement = op_add(op_identity(ops.modes()), op_scale(ops.mask_interior, -1.0));
  ops.spatial = op_round(op_add(op_mask_rows(ops.interior, interior_mask_factors(ops.grids)), complement),
                         op_round_tol);
  return ops;
}

TTVector collocated_source(const DiscreteOperatorSet& ops, const ProblemSpec& spec,
                           const std::vector<double>* times) {
  const int d = static_cast<int>(ops.grids.size());
  std::vector<int> modes = ops.modes();
  if (times) modes.push_back(static_cast<int>(times->size()));
  TTVector src = tt_zeros(modes);
  if (!spec.rhs.empty())
    src = add_round(src, sample_space_time(spec.rhs, point_lists(ops, std::vector<int>(d, 1)), {}, times));
  if (!spec.exact) return src;

  const SeparableFunction& f = *spec.exact;
  const TTVector eps = with_time(ops.epsilon_tt, times);
  const TTVector rho = with_time(ops.rho_tt, times);
  const int side = ops.companions == Companions::Collocated ? 1 : 0;
  for (int l = 0; l < d; ++l) {
    std::vector<int> where(d, side), derivs(d, 0);
    where[l] = 1;
    derivs[l] = 2;
    TTVector f2 = sample_space_time(f, point_lists(ops, where), derivs, times);
    src = add_round(src, tt_scale(tt_hadamard(eps, f2), -1.0));
    derivs[l] = 1;
    TTVector f1 = sample_space_time(f, point_lists(ops, where), derivs, times);
    src = add_round(src, tt_hadamard(with_time(ops.beta_tt[l], times), f1));
  }
  TTVector f0 = sample_space_time(f, point_lists(ops, std::vector<int>(d, 1)), {}, times);
  src = add_round(src, tt_hadamard(rho, f0));
  if (times) src = add_round(src, sample_space_time(f, point_lists(ops, std::vector<int>(d, side)), {}, times, 1));
  return src;
}

TTVector boundary_samples(const DiscreteOperatorSet& ops, const ProblemSpec& spec, double t) {
  const int d = static_cast<int>(ops.grids.size());
  const SeparableFunction* g = !spec.dirichlet.empty() ? &spec.dirichlet : (spec.exact ? &*spec.exact : nullptr);
  auto pts = point_lists(ops, std::vector<int>(d, 0));
  if (!g) return tt_zeros(ops.modes());
  if (g->arity() == d + 1) return sample_separable(freeze_time(*g, t), pts);
  return sample_separable(*g, pts);
}

TTVector initial_samples(const DiscreteOperatorSet& ops, const ProblemSpec& spec) {
  const int d = static_cast<int>(ops.grids.size());
  auto pts = point_lists(ops, std::vector<int>(d, 0));
  if (!spec.initial.empty()) return sample_separable(spec.initial, pts);
  if (spec.exact) {
    if (spec.exact->arity() == d + 1) return sample_separable(freeze_time(*spec.exact, 0.0), pts);
    return sample_separable(*spec.exact, pts);
  }
  return tt_zeros(ops.modes());
}

std::pair<TTOperator, TTVector> impose_dirichlet(const DiscreteOperatorSet& ops, const ProblemSpec& spec) {
  TTVector mask = tt_rank1(interior_mask_factors(ops.grids));
  TTVector src = collocated_source(ops, spec);
  TTVector g = boundary_samples(ops, spec);
  TTVector rhs = tt_add(tt_hadamard(mask, src), tt_sub(g, tt_hadamard(mask, g)));
  return {ops.spatial, tt_round(rhs, kRound)};
}

TimeGrid time_grid(const ProblemSpec& spec) {
  if (!spec.time) throw InvalidArgument("time_grid: problem has no time block");
  const int nt = spec.time->degree > 0 ? spec.time->degree : spec.degrees.front();
  TimeGrid tg;
  tg.nodes = gll_nodes(nt);
  const double T = spec.time->t_end;
  for (double tau : tg.nodes) tg.times.push_back(0.5 * (tau + 1.0) * T);
  tg.d1 = (2.0 / T) * diff_matrix(tg.nodes);
  return tg;
}

TTVector append_ones(const TTVector& v, int n) {
  std::vector<Core3> cores = v.cores();
  Core3 c(1, n, 1);
  for (int i = 0; i < n; ++i) c(0, i, 0) = 1.0;
  cores.push_back(std::move(c));
  return TTVector(std::move(cores));
}

TTOperator append_identity(const TTOperator& op, int n) {
  std::vector<Core4> cores = op.cores();
  Core4 c(1, n, n, 1);
  for (int i = 0; i < n; ++i) c(0, i, i, 0) = 1.0;
  cores.push_back(std::move(c));
  return TTOperator(std::move(cores));
}

std::pair<TTOperator, TTVector> assemble_spacetime(const DiscreteOperatorSet& ops, const ProblemSpec& spec) {
  if (!spec.time) throw InvalidArgument("assemble_spacetime: problem has no time block");
  const TimeGrid tg = time_grid(spec);
  const int nt = static_cast<int>(tg.nodes.size());
  const std::vector<int> space = ops.modes();

  std::vector<Matrix> kron_dt = companion_factors(ops.grids, ops.companions);
  kron_dt.push_back(tg.d1);
  TTOperator full = op_add(op_kron(kron_dt), append_identity(ops.interior, nt));

  std::vector<std::vector<double>> mask = interior_mask_factors(ops.grids);
  std::vector<double> tmask(nt, 1.0);
  tmask.front() = 0.0;
  mask.push_back(tmask);
  std::vector<Matrix> mdiag;
  for (const auto& v : mask)
    mdiag.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())).asDiagonal());
  std::vector<int> st_modes = space;
  st_modes.push_back(nt);
  TTOperator complement = op_add(op_identity(st_modes), op_scale(op_kron(mdiag), -1.0));
  TTOperator a = op_round(op_add(op_mask_rows(full, mask), complement), 1e-13);

  // Right-hand side: interior source, spatial boundary data, initial slice.
  const TTVector m_st = tt_rank1(mask);
  TTVector src = collocated_source(ops, spec, &tg.times);
  TTVector rhs = tt_hadamard(m_st, src);

  const int d = static_cast<int>(space.size());
  const SeparableFunction* g = !spec.dirichlet.empty() ? &spec.dirichlet : (spec.exact ? &*spec.exact : nullptr);
  if (g) {
    TTVector gst = sample_space_time(*g, point_lists(ops, std::vector<int>(d, 0)), {}, &tg.times);
    TTVector m_space = append_ones(tt_rank1(interior_mask_factors(ops.grids)), nt);
    rhs = add_round(rhs, tt_sub(gst, tt_hadamard(m_space, gst)));
  }
  std::vector<std::vector<double>> init_mask = interior_mask_factors(ops.grids);
  std::vector<double> e0(nt, 0.0);
  e0.front() = 1.0;
  init_mask.push_back(e0);
  TTVector f0 = append_ones(initial_samples(ops, spec), nt);
  rhs = add_round(rhs, tt_hadamard(tt_rank1(init_mask), f0));
  return {a, rhs};
}

}  // namespace ttss
