#include "ttss/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "ttss/errors.hpp"
#include "ttss/operator_assembly.hpp"
#include "ttss/spectral1d.hpp"

namespace ttss {

double relative_error(const TTVector& approx, const TTVector& exact) {
  if (approx.modes() != exact.modes()) throw ShapeError("relative_error: mode sizes differ");
  const double ne = tt_norm(exact);
  if (ne == 0.0) throw InvalidArgument("relative_error: reference tensor is zero");
  return tt_norm(tt_sub(approx, exact)) / ne;
}

double max_abs_difference(const TTVector& a, const TTVector& b, std::size_t exact_cap, int samples,
                          std::uint64_t seed) {
  if (a.modes() != b.modes()) throw ShapeError("max_abs_difference: mode sizes differ");
  const std::vector<int> modes = a.modes();
  double total = 1.0;
  for (int n : modes) total *= n;
  const TTVector diff = tt_sub(a, b);
  double m = 0.0;
  if (total <= static_cast<double>(exact_cap)) {
    for (double v : tt_full(diff, exact_cap).data) m = std::max(m, std::abs(v));
    return m;
  }
  std::mt19937_64 rng(seed);
  std::vector<int> idx(modes.size());
  for (int s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < modes.size(); ++k)
      idx[k] = std::uniform_int_distribution<int>(0, modes[k] - 1)(rng);
    m = std::max(m, std::abs(tt_entry(diff, idx)));
  }
  return m;
}

int oscillation_count(const std::vector<double>& values, double floor_rel) {
  if (values.size() < 3) return 0;
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  const double floor = floor_rel * vmax;
  int count = 0, last = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (std::abs(d) <= floor) continue;
    const int s = d > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

TTVector tt_interpolate(const TTVector& x, const std::vector<std::vector<double>>& nodes,
                        const std::vector<std::vector<double>>& targets) {
  const int d = x.dims();
  if (static_cast<int>(nodes.size()) != d || static_cast<int>(targets.size()) != d)
    throw ShapeError("tt_interpolate: one node and target list per dimension");
  std::vector<Core3> cores;
  for (int k = 0; k < d; ++k) {
    const Core3& c = x.core(k);
    if (static_cast<int>(nodes[k].size()) != c.n()) throw ShapeError("tt_interpolate: node count");
    const Matrix e = eval_matrix(nodes[k], targets[k]);
    const int m = static_cast<int>(e.rows());
    Core3 out(c.r0(), m, c.r1());
    for (int b = 0; b < c.r1(); ++b) {
      ConstMatrixMap in(c.data() + std::size_t(c.r0()) * c.n() * b, c.r0(), c.n());
      MatrixMap o(out.data() + std::size_t(c.r0()) * m * b, c.r0(), m);
      o.noalias() = in * e.transpose();
    }
    cores.push_back(std::move(out));
  }
  return TTVector(std::move(cores));
}

std::vector<double> midline(const TTVector& x, const std::vector<std::vector<double>>& nodes, int dim) {
  std::vector<std::vector<double>> targets;
  for (int k = 0; k < x.dims(); ++k) targets.push_back(k == dim ? nodes[k] : std::vector<double>{0.0});
  return tt_full(tt_interpolate(x, nodes, targets)).data;
}

std::string to_string(SweepMethod m) { return m == SweepMethod::Plain ? "plain" : "t2s2"; }

std::string SweepTable::flags_csv() const {
  std::ostringstream os;
  os << "degree";
  for (double e : epsilons) os << ',' << e;
  os << '\n';
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    os << degrees[i];
    for (std::size_t j = 0; j < epsilons.size(); ++j) os << ',' << at(i, j).flag;
    os << '\n';
  }
  return os.str();
}

std::string SweepTable::cells_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "method,dims,degree,epsilon,flag,count,expected,residual,max_rank,seconds\n";
  for (const auto& c : cells)
    os << to_string(method) << ',' << dims << ',' << c.degree << ',' << c.epsilon << ',' << c.flag << ','
       << c.count << ',' << c.expected << ',' << c.residual << ',' << c.max_rank << ',' << c.seconds << '\n';
  return os.str();
}

ProblemSpec sweep_problem(int dims, int degree, double epsilon, SweepMethod method) {
  ProblemSpec s;
  s.dims = dims;
  s.degrees.assign(dims, degree);
  s.epsilon = SeparableFunction::constant(epsilon, dims);
  for (int k = 0; k < dims; ++k) s.beta.push_back(SeparableFunction::constant(1.0, dims));
  s.rho = SeparableFunction::constant(0.0, dims);
  s.rhs = SeparableFunction::constant(1.0, dims);
  s.dirichlet = SeparableFunction::constant(0.0, dims);
  s.stabilization = method == SweepMethod::Plain ? Stabilization::Plain : Stabilization::Superconsistent;
  return s;
}

namespace {

struct LineResult {
  std::vector<double> line;
  double residual = 0.0;
  int max_rank = 0;
};

LineResult solve_line(int dims, int degree, double eps, SweepMethod method, const SolverConfig& cfg) {
  const ProblemSpec spec = sweep_problem(dims, degree, eps, method);
  const DiscreteOperatorSet ops = assemble(spec);
  auto [a, rhs] = impose_dirichlet(ops, spec);
  SolveResult r = solve(a, rhs, std::nullopt, cfg);
  std::vector<std::vector<double>> nodes;
  for (const auto& g : ops.grids) nodes.push_back(g.base.rep_nodes);
  return {midline(r.x, nodes, 0), r.report.best_residual, r.x.max_rank()};
}

}  // namespace

std::optional<int> CountCache::find(int dims, int degree, double eps) const {
  auto it = counts_.find({dims, degree, std::llround(std::log10(eps) * 1e6)});
  if (it == counts_.end()) return std::nullopt;
  return it->second;
}

void CountCache::store(int dims, int degree, double eps, int count) {
  counts_[{dims, degree, std::llround(std::log10(eps) * 1e6)}] = count;
}

SweepTable stability_sweep(int dims, const std::vector<int>& degrees, const std::vector<double>& epsilons,
                           SweepMethod method, const SweepOptions& opts) {
  SweepTable t;
  t.dims = dims;
  t.method = method;
  t.degrees = degrees;
  t.epsilons = epsilons;
  auto cache = opts.cache ? opts.cache : std::make_shared<CountCache>();
  for (int n : degrees) {
    for (double eps : epsilons) {
      SweepCell c;
      c.degree = n;
      c.epsilon = eps;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const double ref_eps = eps * opts.reference_factor;
        std::optional<int> expected = cache->find(dims, n, ref_eps);
        if (!expected) {
          LineResult ref = solve_line(dims, n, ref_eps, SweepMethod::T2S2, opts.solver);
          expected = oscillation_count(ref.line, opts.floor_rel);
          cache->store(dims, n, ref_eps, *expected);
        }
        c.expected = *expected;
        LineResult r = solve_line(dims, n, eps, method, opts.solver);
        c.count = oscillation_count(r.line, opts.floor_rel);
        c.residual = r.residual;
        c.max_rank = r.max_rank;
        c.flag = c.count > c.expected ? 1 : 0;
        if (method == SweepMethod::T2S2) cache->store(dims, n, eps, c.count);
      } catch (const std::exception& e) {
        c.flag = 2;
        c.note = e.what();
      }
      c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (opts.verbose)
        std::fprintf(stderr, "%s n=%d eps=%.3g flag=%d count=%d expected=%d residual=%.2e %.1fs\n",
                     to_string(method).c_str(), n, eps, c.flag, c.count, c.expected, c.residual, c.seconds);
      t.cells.push_back(c);
    }
  }
  return t;
}

InterfaceFit fit_interface(const SweepTable& table) {
  InterfaceFit fit;
  // Column order by decreasing epsilon.
  std::vector<std::size_t> order(table.epsilons.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return table.epsilons[a] > table.epsilons[b]; });
  for (std::size_t i = 0; i < table.degrees.size(); ++i) {
    for (std::size_t q = 1; q < order.size(); ++q) {
      if (table.at(i, order[q]).flag == 1 && table.at(i, order[q - 1]).flag == 0) {
        fit.degrees.push_back(table.degrees[i]);
        fit.epsilons.push_back(std::sqrt(table.epsilons[order[q]] * table.epsilons[order[q - 1]]));
        break;
      }
    }
  }
  const std::size_t m = fit.degrees.size();
  if (m < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double x = std::log(fit.degrees[k]), y = std::log(fit.epsilons[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (den == 0.0) return fit;
  fit.slope = (m * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.ok = true;
  return fit;
}

}  // namespace ttss
