// Acceptance runner: `acceptance <1..11|all> [--out DIR] [--stretch] [--budget S]`.
// Prints one PASS/FAIL line per criterion; exit status 1 if any gating check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "CLI11.hpp"
#include "ttss/benchmarks.hpp"
#include "ttss/diagnostics.hpp"
#include "ttss/operator_assembly.hpp"
#include "ttss/spectral1d.hpp"
#include "ttss/superconsistency.hpp"
#include "ttss/tensor_train.hpp"
#include "ttss/tt_solver.hpp"

using namespace ttss;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool gating = true;
  bool skipped = false;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string trim_sep(std::string s) {
  while (s.size() >= 2 && s.compare(s.size() - 2, 2, "; ") == 0) s.resize(s.size() - 2);
  return s;
}

struct Ctx {
  fs::path out;
  bool stretch = false;
  double budget = 180.0;

  void save(const std::string& name, const std::string& text) const {
    if (out.empty()) return;
    fs::create_directories(out);
    std::ofstream(out / name) << text;
  }
};

Vector flat(const TTVector& v) {
  auto d = tt_full(v);
  return Eigen::Map<Vector>(d.data.data(), Eigen::Index(d.data.size()));
}

// ---- 1: spectral exactness ------------------------------------------------

// P_k, P_k', P_k'' for k = 0..n at x; long double recurrence, second
// derivative from the Legendre equation (closed form at the end points).
void legendre_table(int n, double x, std::vector<double>& p, std::vector<double>& dp, std::vector<double>& d2p) {
  p.assign(n + 1, 0.0);
  dp.assign(n + 1, 0.0);
  d2p.assign(n + 1, 0.0);
  long double a = 1, b = x, db = 1;
  for (int k = 0; k <= n; ++k) {
    if (k == 0) {
      p[0] = 1;
    } else if (k == 1) {
      p[1] = x;
      dp[1] = 1;
    } else {
      const long double c = ((2 * k - 1) * x * b - (k - 1) * a) / k;
      const long double dc = k * b + x * db;  // P_k' = k P_{k-1} + x P_{k-1}'
      a = b;
      b = c;
      db = dc;
      p[k] = double(c);
      dp[k] = double(dc);
    }
    if (std::abs(x) == 1.0) {
      const long double s = (x > 0 || k % 2 == 0) ? 1 : -1;
      d2p[k] = double(s * (long double)(k - 1) * k * (k + 1) * (k + 2) / 8);
    } else {
      d2p[k] = double((2 * x * (long double)dp[k] - (long double)k * (k + 1) * p[k]) / (1 - (long double)x * x));
    }
  }
}

Outcome criterion1(const Ctx&) {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  double worst = 0.0;
  std::ostringstream os;
  for (int n : {4, 8, 16, 64, 300}) {
    const Grid1D g = make_grid(n);
    std::vector<double> targets;
    for (int i = 0; i < 40; ++i) targets.push_back(ud(rng));
    const Matrix e = eval_matrix(g.rep_nodes, targets);
    const Matrix e1 = deriv_eval_matrix(g.rep_nodes, targets, 1);
    const Matrix e2 = deriv_eval_matrix(g.rep_nodes, targets, 2);
    double err_n = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const int deg = trial == 0 ? n : std::uniform_int_distribution<int>(0, n)(rng);
      std::vector<double> c(deg + 1);
      for (double& v : c) v = nd(rng);
      auto sample = [&](const std::vector<double>& xs, Vector& f, Vector& f1, Vector& f2) {
        f.resize(Eigen::Index(xs.size()));
        f1.resizeLike(f);
        f2.resizeLike(f);
        std::vector<double> p, dp, d2p;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          legendre_table(deg, xs[i], p, dp, d2p);
          long double s0 = 0, s1 = 0, s2 = 0;
          for (int k = 0; k <= deg; ++k) {
            s0 += (long double)c[k] * p[k];
            s1 += (long double)c[k] * dp[k];
            s2 += (long double)c[k] * d2p[k];
          }
          f[Eigen::Index(i)] = double(s0);
          f1[Eigen::Index(i)] = double(s1);
          f2[Eigen::Index(i)] = double(s2);
        }
      };
      Vector f, f1, f2, t0, t1, t2;
      sample(g.rep_nodes, f, f1, f2);
      sample(targets, t0, t1, t2);
      auto rel = [](const Vector& got, const Vector& want) {
        const double s = want.cwiseAbs().maxCoeff();
        return (got - want).cwiseAbs().maxCoeff() / (s > 0 ? s : 1.0);
      };
      err_n = std::max({err_n, rel(g.d1 * f, f1), rel(g.d2 * f, f2), rel(e * f, t0)});
      if (deg >= 1) err_n = std::max(err_n, rel(e1 * f, t1));
      if (deg >= 2) err_n = std::max(err_n, rel(e2 * f, t2));
    }
    os << " n=" << n << ":" << fmt("%.1e", err_n);
    worst = std::max(worst, err_n);
  }
  return {worst <= 1e-8, "max relative error" + os.str()};
}

// ---- 2: superconsistent limits ----------------------------------------------

Outcome criterion2(const Ctx&) {
  const int n = 7;
  const auto gll = gll_nodes(n);
  const auto gauss = gauss_nodes(n);
  const auto diff = superconsistent_nodes(n, 10.0, 1.0);
  const auto conv = superconsistent_nodes(n, 1e-12, 1.0);
  double d_gll = 0.0, d_gauss = 0.0;
  for (int j = 0; j < n - 1; ++j) {
    d_gll = std::max(d_gll, std::abs(diff[j] - gll[j + 1]));
    double best = 1e300;
    for (double g : gauss) best = std::min(best, std::abs(conv[j] - g));
    d_gauss = std::max(d_gauss, best);
  }
  return {d_gll <= 1e-3 && d_gauss <= 1e-6,
          "eps=10 vs GLL " + fmt("%.2e", d_gll) + ", eps=1e-12 vs Gauss " + fmt("%.2e", d_gauss)};
}

// ---- 3: TT contracts ---------------------------------------------------------

Outcome criterion3(const Ctx&) {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> nd;
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto random_tt = [&](const std::vector<int>& modes, int rank) {
    std::vector<Core3> cores;
    const int d = int(modes.size());
    for (int k = 0; k < d; ++k) {
      Core3 c(k == 0 ? 1 : rank, modes[k], k == d - 1 ? 1 : rank);
      for (double& x : c.storage()) x = nd(rng);
      cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
  };
  auto random_op = [&](const std::vector<int>& modes, int rank) {
    std::vector<Core4> cores;
    const int d = int(modes.size());
    for (int k = 0; k < d; ++k) {
      Core4 c(k == 0 ? 1 : rank, modes[k], modes[k], k == d - 1 ? 1 : rank);
      for (double& x : c.storage()) x = nd(rng);
      cores.push_back(std::move(c));
    }
    return TTOperator(std::move(cores));
  };
  int bound_fail = 0, arith_fail = 0;
  double worst_bound = 0.0, worst_arith = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int d = uni(4, 6);
    std::vector<int> modes(d);
    for (int& m : modes) m = uni(2, d == 6 ? 4 : 5);
    const double tol = std::pow(10.0, -uni(1, 8));
    // low-rank signal plus noise so truncation actually happens
    const TTVector base = random_tt(modes, uni(1, 3));
    DenseTensor dense = tt_full(base);
    const double scale = flat(base).norm() / std::sqrt(double(dense.data.size()));
    for (double& v : dense.data) v += 1e-3 * scale * nd(rng);
    const Vector a = Eigen::Map<Vector>(dense.data.data(), Eigen::Index(dense.data.size()));
    const TTVector s = tt_svd(dense, tol);
    const double svd_ratio = (flat(s) - a).norm() / (tol * a.norm());
    // rounding of a redundant sum: x + y - y
    const TTVector y = random_tt(modes, 2);
    const TTVector redundant = tt_add(tt_add(s, y), tt_scale(y, -1.0));
    const double tol2 = std::pow(10.0, -uni(1, 8));
    const TTVector r = tt_round(redundant, tol2);
    const Vector fr = flat(redundant);
    const double round_ratio = (flat(r) - fr).norm() / (tol2 * fr.norm());
    worst_bound = std::max({worst_bound, svd_ratio, round_ratio});
    if (svd_ratio > 1.0 + 1e-9 || round_ratio > 1.0 + 1e-9) ++bound_fail;

    // arithmetic against dense
    const TTVector u = random_tt(modes, uni(1, 4)), v = random_tt(modes, uni(1, 4));
    const Vector fu = flat(u), fv = flat(v);
    auto rel = [](const Vector& got, const Vector& want) { return (got - want).norm() / want.norm(); };
    double e = std::max(rel(flat(tt_add(u, v)), fu + fv), rel(flat(tt_hadamard(u, v)), fu.cwiseProduct(fv)));
    std::vector<int> small(d);
    for (int& m : small) m = uni(2, 3);
    const TTOperator op = random_op(small, uni(1, 3));
    const TTVector w = random_tt(small, uni(1, 3));
    const Vector fw = flat(w);
    e = std::max(e, rel(flat(tt_apply(op, w)), op_full(op) * fw));
    worst_arith = std::max(worst_arith, e);
    if (e > 1e-12) ++arith_fail;
  }
  return {bound_fail == 0 && arith_fail == 0,
          "200 tensors: worst error/bound " + fmt("%.3f", worst_bound) + " (" + std::to_string(bound_fail) +
              " over), worst dense mismatch " + fmt("%.1e", worst_arith) + " (" + std::to_string(arith_fail) +
              " over 1e-12)"};
}

// ---- 4: dense-oracle solver equivalence --------------------------------------

Outcome criterion4(const Ctx&) {
  struct Case {
    std::string name;
    ProblemSpec spec;
  };
  std::vector<Case> cases;
  for (int d = 1; d <= 3; ++d)
    for (int n : {4, 7, 10})
      for (double eps : {1.0, 1e-2})
        for (SweepMethod m : {SweepMethod::T2S2, SweepMethod::Plain})
          cases.push_back({"cd d=" + std::to_string(d) + " n=" + std::to_string(n) + " eps=" + fmt("%g", eps) + " " +
                               to_string(m),
                           sweep_problem(d, n, eps, m)});
  for (int n : {6, 10}) {
    cases.push_back({"hughes n=" + std::to_string(n), hughes_spec(n, 1e-2, Stabilization::Superconsistent)});
    cases.push_back({"viscosity n=" + std::to_string(n), viscosity_spec(n, Stabilization::Superconsistent)});
    cases.push_back({"bump space-time n=" + std::to_string(n), bump_spec(n, TimeScheme::SpaceTime)});
    cases.push_back({"constant space-time 2-D n=" + std::to_string(n), constant_spec(n, 2, 1e-2)});
  }
  SolverConfig cfg;
  cfg.rounding_tol = 1e-13;
  cfg.residual_tol = 1e-13;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& c : cases) {
    const DiscreteOperatorSet ops = assemble(c.spec);
    auto [a, rhs] = c.spec.time ? assemble_spacetime(ops, c.spec) : impose_dirichlet(ops, c.spec);
    const Vector dense = Eigen::PartialPivLU<Matrix>(op_full(a)).solve(flat(rhs));
    const SolveResult r = solve(a, rhs, std::nullopt, cfg);
    const double e = (flat(r.x) - dense).norm() / dense.norm();
    if (e > worst) {
      worst = e;
      worst_name = c.name;
    }
  }
  return {worst <= 1e-8, std::to_string(cases.size()) + " systems, worst relative difference " + fmt("%.1e", worst) +
                             " (" + worst_name + ")"};
}

// ---- 5: artificial viscosity -------------------------------------------------

Outcome criterion5(const Ctx& ctx) {
  const BenchmarkResult r = benchmark_artificial_viscosity({});
  ctx.save("viscosity.json", r.to_json().dump(2));
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : r.cases) {
    const int n = c["degree"];
    const std::string m = c["method"];
    const int count = c["oscillation_count"];
    if (m == "t2s2" && (n == 63 || n == 387)) {
      os << "t2s2 n=" << n << " count " << count << "; ";
      ok = ok && count == 0;
    }
    if (m == "plain" && n == 387) {
      os << "plain n=387 count " << count << "; ";
      ok = ok && count > 0;
    }
    if (m == "t2s2" && n == 1023) {
      const double delta = c["max_delta_vs_reference"];
      os << "n=1023 t2s2 vs plain " << fmt("%.2e", delta);
      ok = ok && delta <= 5e-6;
    }
  }
  return {ok, trim_sep(os.str())};
}

// ---- 6: Hughes -----------------------------------------------------------------

Outcome criterion6(const Ctx& ctx) {
  HughesConfig cfg;
  cfg.plain_epsilons = std::vector<double>{1e-3};
  const BenchmarkResult r = benchmark_hughes(cfg);
  ctx.save("hughes.json", r.to_json().dump(2));
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : r.cases) {
    const std::string m = c["method"];
    const double eps = c["epsilon"];
    const int count = c["oscillation_count"];
    if (m == "plain") {
      os << "plain eps=" << eps << " count " << count << "; ";
      ok = ok && count > 0;
    } else {
      const double pl = c["plateau_left"], pr = c["plateau_right"];
      os << "t2s2 eps=" << eps << " count " << count << " plateaus " << fmt("%.4f", pl) << "/" << fmt("%.4f", pr)
         << "; ";
      ok = ok && count == 0 && std::abs(pl - 1.0) <= 0.05 && std::abs(pr) <= 0.05;
    }
  }
  return {ok, trim_sep(os.str())};
}

// ---- 7: bump -------------------------------------------------------------------

Outcome criterion7(const Ctx& ctx) {
  bool ok = true;
  std::ostringstream os;
  for (TimeScheme s : {TimeScheme::BackwardEuler, TimeScheme::CrankNicolson, TimeScheme::SpaceTime}) {
    BumpConfig cfg;
    cfg.scheme = s;
    const BenchmarkResult r = benchmark_bump(cfg);
    const std::string name = r.parameters["scheme"];
    ctx.save("bump_" + name + ".json", r.to_json().dump(2));
    const double peak = r.cases.at(0)["final_peak"];
    const bool in = s == TimeScheme::BackwardEuler ? (peak >= 0.85 && peak <= 0.95) : (peak >= 0.97 && peak <= 1.03);
    ok = ok && in;
    os << name << " " << fmt("%.4f", peak) << (in ? "" : " (out of range)") << "; ";
  }
  return {ok, "final normalized peak " + trim_sep(os.str())};
}

// ---- 8: stability mini-map -------------------------------------------------------

std::vector<double> sweep_epsilons() {
  std::vector<double> e;
  // eight points per decade where the plain interface lives, then decades
  for (int k = 0; k <= 16; ++k) e.push_back(std::pow(10.0, -1.0 - k / 8.0));
  for (int k = 4; k <= 8; ++k) e.push_back(std::pow(10.0, -double(k)));
  return e;
}

Outcome criterion8(const Ctx& ctx) {
  const std::vector<int> degrees{8, 16, 24, 32, 40};
  const auto eps = sweep_epsilons();
  SweepOptions o;
  o.solver.max_sweeps = 20;
  o.cache = std::make_shared<CountCache>();
  const SweepTable t2 = stability_sweep(3, degrees, eps, SweepMethod::T2S2, o);
  const SweepTable pl = stability_sweep(3, degrees, eps, SweepMethod::Plain, o);
  ctx.save("sweep_t2s2_flags.csv", t2.flags_csv());
  ctx.save("sweep_t2s2_cells.csv", t2.cells_csv());
  ctx.save("sweep_plain_flags.csv", pl.flags_csv());
  ctx.save("sweep_plain_cells.csv", pl.cells_csv());
  int t2_bad = 0, t2_fail = 0, pl_osc = 0;
  for (const auto& c : t2.cells) {
    if (c.flag != 0) ++t2_bad;
    if (c.flag == 2) ++t2_fail;
  }
  for (const auto& c : pl.cells)
    if (c.flag == 1) ++pl_osc;
  const InterfaceFit fit = fit_interface(pl);
  std::ostringstream os;
  os << "t2s2 nonzero flags " << t2_bad << "/" << t2.cells.size() << " (" << t2_fail << " solver failures); plain "
     << "oscillatory cells " << pl_osc << "; interface";
  for (std::size_t k = 0; k < fit.degrees.size(); ++k) os << " n=" << fit.degrees[k] << ":" << fmt("%.3g", fit.epsilons[k]);
  os << "; slope " << (fit.ok ? fmt("%.2f", fit.slope) : std::string("n/a")) << " (target -2 +/- 0.4)";
  const bool slope_ok = fit.ok && std::abs(fit.slope + 2.0) <= 0.4;
  return {t2_bad == 0 && pl_osc > 0 && slope_ok, os.str()};
}

// ---- 9: 6-D boundary layer -------------------------------------------------------

Outcome criterion9(const Ctx& ctx) {
  BoundaryLayerConfig cfg;
  cfg.solver.rounding_tol = 1e-4;
  const BenchmarkResult r = benchmark_boundary_layer6d(cfg);
  ctx.save("boundary_layer6d.json", r.to_json().dump(2));
  const auto& c = r.cases.at(0);
  const int rank = c["max_rank"];
  const double comp = c["compression"], res = c["residual"];
  const bool ok = rank >= 8 && rank <= 16 && comp >= 1e-7 && comp <= 1e-5 && res <= 5e-2;
  return {ok, "max rank " + std::to_string(rank) + ", compression " + fmt("%.2e", comp) + ", residual " +
                  fmt("%.2e", res) + " (rounding 1e-4)"};
}

// ---- 10: 6-D constant coefficients ------------------------------------------------

Outcome criterion10(const Ctx& ctx) {
  ConstantConfig cfg;
  const BenchmarkResult r = benchmark_constant6d(cfg);
  ctx.save("constant6d.json", r.to_json().dump(2));
  // the rounding tolerance bounds the attainable accuracy: errors below it
  // are the plateau
  const double plateau = cfg.solver.rounding_tol;
  std::vector<double> err;
  std::ostringstream os;
  for (const auto& c : r.cases) {
    err.push_back(c["error"]);
    os << "n=" << int(c["degree"]) << ":" << fmt("%.2e", err.back()) << " ";
  }
  bool ok = err.size() == cfg.degrees.size();
  int checked = 0;
  for (std::size_t k = 1; ok && k < err.size(); ++k) {
    if (err[k - 1] <= plateau) break;
    ++checked;
    ok = err[k] <= err[k - 1] / 10.0;
  }
  ok = ok && checked > 0;
  os << "(" << checked << " refinement(s) before the " << fmt("%.0e", plateau) << " plateau)";
  return {ok, trim_sep(os.str())};
}

// ---- 11: stretch -------------------------------------------------------------------

Outcome criterion11(const Ctx& ctx) {
  Outcome o;
  o.gating = false;
  if (!ctx.stretch) {
    o.skipped = true;
    o.detail = "stretch run not requested (pass --stretch)";
    return o;
  }
  ManufacturedConfig cfg;
  cfg.degrees = {300};
  cfg.low_frequency = false;
  const BenchmarkResult r = benchmark_manufactured_6d(cfg);
  ctx.save("manufactured6d_stretch.json", r.to_json().dump(2));
  const auto& c = r.cases.at(0);
  const double err = c["error"], comp = c["compression"];
  o.pass = err <= 1e-9 && comp <= 1e-11;
  o.detail = "error " + fmt("%.2e", err) + ", compression " + fmt("%.2e", comp) + ", wall " + fmt("%.0f", r.wall_time) +
             " s vs budget " + fmt("%.0f", ctx.budget) + " s" + (r.wall_time > ctx.budget ? " (over budget)" : "");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string which = "all";
  std::string out;
  Ctx ctx;
  app.add_option("criterion", which, "1..11 or all");
  app.add_option("--out", out, "directory for benchmark artifacts");
  app.add_flag("--stretch", ctx.stretch, "run the degree-300 stretch case");
  app.add_option("--budget", ctx.budget, "wall-clock budget for the stretch case (s)");
  CLI11_PARSE(app, argc, argv);
  ctx.out = out;

  const std::map<int, std::pair<std::function<Outcome(const Ctx&)>, double>> all{
      {1, {criterion1, 10}},     {2, {criterion2, 1}},     {3, {criterion3, 120}},  {4, {criterion4, 120}},
      {5, {criterion5, 60}},     {6, {criterion6, 300}},   {7, {criterion7, 600}},  {8, {criterion8, 1800}},
      {9, {criterion9, 900}},    {10, {criterion10, 1200}}, {11, {criterion11, 1e300}}};
  std::vector<int> run;
  if (which == "all") {
    for (const auto& [k, v] : all) run.push_back(k);
  } else {
    try {
      run.push_back(std::stoi(which));
    } catch (const std::exception&) {
      std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
      return 2;
    }
    if (!all.count(run[0])) {
      std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
      return 2;
    }
  }
  int failures = 0;
  for (int k : run) {
    const auto& [fn, limit] = all.at(k);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn(ctx);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
      o.gating = k != 11;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= limit;
    const bool pass = o.pass && in_time;
    const char* tag = o.skipped ? "SKIP" : pass ? "PASS" : "FAIL";
    std::printf("CRITERION %d %s%s: %s [%.1f s%s]\n", k, tag, o.gating ? "" : " (non-gating)", o.detail.c_str(), secs,
                in_time ? "" : (", over the " + fmt("%.0f", limit) + " s limit").c_str());
    std::fflush(stdout);
    if (!pass && o.gating && !o.skipped) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
