#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ttss/benchmarks.hpp"
#include "ttss/config.hpp"
#include "ttss/diagnostics.hpp"
#include "ttss/errors.hpp"
#include "ttss/operator_assembly.hpp"
#include "ttss/superconsistency.hpp"
#include "ttss/time_integration.hpp"
#include "ttss/tt_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ttss;

namespace {

constexpr int kExitStagnation = 2;
constexpr int kExitConfig = 3;

// "8..40", "8..40:4" or "8,16,24"
std::vector<int> parse_degrees(const std::string& s) {
  std::vector<int> out;
  auto dots = s.find("..");
  if (dots == std::string::npos) {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
  }
  int step = 4;
  std::string rest = s.substr(dots + 2);
  if (auto c = rest.find(':'); c != std::string::npos) {
    step = std::stoi(rest.substr(c + 1));
    rest = rest.substr(0, c);
  }
  const int a = std::stoi(s.substr(0, dots)), b = std::stoi(rest);
  if (step <= 0 || a > b) throw ConfigError("bad degree range " + s);
  for (int n = a; n <= b; n += step) out.push_back(n);
  return out;
}

// "1e-1..1e-8" (one per decade), "1e-1..1e-8:4" (four per decade) or a list
// Comma-separated items, each a value or a range hi..lo[:per_decade].
std::vector<double> parse_epsilons(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stod(tok));
      continue;
    }
    int per = 1;
    std::string rest = tok.substr(dots + 2);
    if (auto c = rest.find(':'); c != std::string::npos) {
      per = std::stoi(rest.substr(c + 1));
      rest = rest.substr(0, c);
    }
    if (per <= 0) throw ConfigError("bad epsilon range " + tok);
    const double a = std::log10(std::stod(tok.substr(0, dots))), b = std::log10(std::stod(rest));
    const int steps = static_cast<int>(std::lround(std::abs(b - a) * per));
    for (int k = 0; k <= steps; ++k) {
      const double e = std::pow(10.0, a + (b - a) * k / std::max(steps, 1));
      if (out.empty() || std::abs(std::log10(out.back() / e)) > 1e-9) out.push_back(e);
    }
  }
  if (out.empty()) throw ConfigError("empty epsilon list");
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  os << text;
}

int run_solve(const std::string& config, const std::string& out_dir) {
  RunConfig rc = load_run_config(config);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  const ProblemSpec& spec = rc.problem;
  const DiscreteOperatorSet ops = assemble(spec);
  json report;
  bool stagnated = false;
  if (spec.time && spec.time->scheme != TimeScheme::SpaceTime) {
    const MarchConfig mc = MarchConfig::from_spec(spec);
    Trajectory tr;
    try {
      // peak column: max nodal |f| (sampled above the dense cap)
      auto peak = [](const TTVector& x) { return max_abs_difference(x, tt_zeros(x.modes())); };
      tr = spec.time->scheme == TimeScheme::BackwardEuler ? backward_euler_march(ops, spec, mc, rc.solver, peak)
                                                          : crank_nicolson_march(ops, spec, mc, rc.solver, peak);
    } catch (const StagnationError& e) {
      std::cerr << "ttss: " << e.what() << "\n";
      return kExitStagnation;
    }
    write_text(out / "trajectory.csv", tr.diagnostics_csv());
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      std::ostringstream name;
      name << "state_" << std::setw(5) << std::setfill('0') << k << ".tts";
      save_tt((out / name.str()).string(), tr.states[k]);
    }
    save_tt((out / "solution.tts").string(), tr.states.back());
    report = {{"steps", tr.steps}, {"times", tr.times}, {"final_max_rank", tr.states.back().max_rank()}};
  } else {
    SolveReport rep;
    TTVector x;
    if (spec.time) {
      SpaceTimeResult st = spacetime_solve(ops, spec, rc.solver);
      rep = st.report;
      x = st.x;
      report["time_nodes"] = st.time.times;
    } else {
      auto [a, rhs] = impose_dirichlet(ops, spec);
      SolveResult r = solve(a, rhs, std::nullopt, rc.solver);
      rep = r.report;
      x = r.x;
    }
    save_tt((out / "solution.tts").string(), x);
    report.update(report_to_json(rep));
    report["final_ranks"] = x.ranks();
    if (spec.exact && spec.time) report["error"] = relative_error(x, exact_spacetime_samples(ops, spec));
    stagnated = rep.stagnated && !rep.converged;
  }
  write_text(out / "report.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return stagnated ? kExitStagnation : 0;
}

std::string cases_csv(const BenchmarkResult& r, const std::vector<std::string>& cols) {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& c : r.cases) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) os << ",";
      if (c.contains(cols[i])) {
        const auto& v = c[cols[i]];
        if (v.is_string()) os << v.get<std::string>();
        else os << v.dump();
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttss: tensor-train superconsistent spectral solver"};
  app.require_subcommand(1);

  std::string config, out_dir = "ttss_out";
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem described by a JSON file");
  solve_cmd->add_option("config", config, "Problem configuration")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("-o,--out", out_dir, "Output directory");

  std::string bench_name, degrees_arg, eps_arg, scheme_arg = "spacetime", placement_arg = "auto";
  bool stretch = false, full_frequency = false;
  double rounding_tol = 0.0;
  int dims = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Run a built-in benchmark");
  bench_cmd->add_option("name", bench_name, "Benchmark")
      ->required()
      ->check(CLI::IsMember({"manufactured6d", "constant6d", "boundary6d", "hughes", "bump", "viscosity"}));
  bench_cmd->add_option("--degrees", degrees_arg, "Degrees, e.g. 8..32:4 or 8,16,24");
  bench_cmd->add_option("--epsilons", eps_arg, "Epsilon list or range");
  bench_cmd->add_option("--scheme", scheme_arg, "bump: be, cn or spacetime")
      ->check(CLI::IsMember({"be", "cn", "spacetime"}));
  bench_cmd->add_option("--placement", placement_arg, "bump: auto, gauss or gll")
      ->check(CLI::IsMember({"auto", "gauss", "gll"}));
  bench_cmd->add_option("--dims", dims, "Override the number of spatial dimensions");
  bench_cmd->add_option("--rounding-tol", rounding_tol, "Solver rounding tolerance");
  bench_cmd->add_flag("--full-frequency", full_frequency, "manufactured6d: keep the sin(80 pi x) term");
  bench_cmd->add_flag("--stretch", stretch, "manufactured6d: degree 300 high-frequency run");
  bench_cmd->add_option("-o,--out", out_dir, "Output directory");

  int sweep_dims = 3;
  std::string sweep_degrees = "8..40:4", sweep_eps = "1e-1..1e-8", method = "t2s2";
  auto* sweep_cmd = app.add_subcommand("sweep", "Oscillation map over degree and epsilon");
  sweep_cmd->add_option("--dims", sweep_dims, "Dimensions");
  sweep_cmd->add_option("--degrees", sweep_degrees, "Degree range a..b[:step]");
  sweep_cmd->add_option("--epsilons", sweep_eps, "Epsilon range hi..lo[:per_decade]");
  sweep_cmd->add_option("--method", method, "plain, t2s2 or both")->check(CLI::IsMember({"plain", "t2s2", "both"}));
  int sweep_max_sweeps = 0;
  bool sweep_verbose = false;
  sweep_cmd->add_option("--max-sweeps", sweep_max_sweeps, "Solver sweep cap per cell");
  sweep_cmd->add_flag("-v,--verbose", sweep_verbose, "Print one line per cell");
  sweep_cmd->add_option("-o,--out", out_dir, "Output directory");

  int node_degree = 8;
  std::string node_kind = "gll";
  double node_eps = 1.0, node_beta = 0.0;
  auto* nodes_cmd = app.add_subcommand("nodes", "Print a node set as CSV");
  nodes_cmd->add_option("--degree", node_degree, "Polynomial degree")->check(CLI::Range(2, 100000));
  nodes_cmd->add_option("--kind", node_kind, "gll, gauss or sc")->check(CLI::IsMember({"gll", "gauss", "sc"}));
  nodes_cmd->add_option("--epsilon", node_eps, "sc: diffusion");
  nodes_cmd->add_option("--beta", node_beta, "sc: convection");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve_cmd) return run_solve(config, out_dir);

    if (*nodes_cmd) {
      std::vector<double> x;
      if (node_kind == "gll") x = gll_nodes(node_degree);
      else if (node_kind == "gauss") x = gauss_nodes(node_degree);
      else x = superconsistent_nodes(node_degree, node_eps, node_beta);
      std::cout << "index,x\n" << std::setprecision(17);
      for (std::size_t i = 0; i < x.size(); ++i) std::cout << i << ',' << x[i] << '\n';
      return 0;
    }

    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    if (*sweep_cmd) {
      SweepOptions opts;
      opts.verbose = sweep_verbose;
      opts.cache = std::make_shared<CountCache>();
      if (sweep_max_sweeps > 0) opts.solver.max_sweeps = sweep_max_sweeps;
      const auto degrees = parse_degrees(sweep_degrees);
      const auto epsilons = parse_epsilons(sweep_eps);
      std::vector<std::string> methods = method == "both" ? std::vector<std::string>{"t2s2", "plain"}
                                                          : std::vector<std::string>{method};
      for (const auto& m : methods) {
        const SweepTable t = stability_sweep(sweep_dims, degrees, epsilons,
                                             m == "plain" ? SweepMethod::Plain : SweepMethod::T2S2, opts);
        write_text(out / ("sweep_" + m + "_flags.csv"), t.flags_csv());
        write_text(out / ("sweep_" + m + "_cells.csv"), t.cells_csv());
        std::cout << m << "\n" << t.flags_csv();
        const InterfaceFit fit = fit_interface(t);
        if (fit.ok) std::cout << "interface slope " << fit.slope << "\n";
      }
      return 0;
    }

    SolverConfig solver;
    if (rounding_tol > 0) solver.rounding_tol = rounding_tol;
    BenchmarkResult r;
    std::vector<std::string> cols{"degree", "error", "max_error", "max_rank", "compression", "residual",
                                  "wall_time_s"};
    if (bench_name == "manufactured6d") {
      ManufacturedConfig c;
      c.solver = solver;
      c.low_frequency = !(full_frequency || stretch);
      if (stretch) c.degrees = {300};
      if (!degrees_arg.empty()) c.degrees = parse_degrees(degrees_arg);
      if (dims > 0) c.dims = dims;
      r = benchmark_manufactured_6d(c);
    } else if (bench_name == "constant6d") {
      ConstantConfig c;
      c.solver = solver;
      if (!degrees_arg.empty()) c.degrees = parse_degrees(degrees_arg);
      if (dims > 0) c.dims = dims;
      r = benchmark_constant6d(c);
    } else if (bench_name == "boundary6d") {
      BoundaryLayerConfig c;
      c.solver = solver;
      if (rounding_tol <= 0) c.solver.rounding_tol = 1e-4;
      c.tolerance_scan = {1e-3, 1e-5, 1e-6};
      if (!degrees_arg.empty()) c.degree = parse_degrees(degrees_arg).front();
      if (dims > 0) c.dims = dims;
      r = benchmark_boundary_layer6d(c);
      cols = {"degree", "rounding_tol", "max_rank", "compression", "residual", "sweeps", "converged"};
    } else if (bench_name == "hughes") {
      HughesConfig c;
      c.solver = solver;
      if (!eps_arg.empty()) c.epsilons = parse_epsilons(eps_arg);
      if (!degrees_arg.empty()) c.degree = parse_degrees(degrees_arg).front();
      r = benchmark_hughes(c);
      cols = {"method", "epsilon", "oscillation_count", "expected_count", "plateau_left", "plateau_right",
              "line_min", "line_max", "residual"};
    } else if (bench_name == "bump") {
      BumpConfig c;
      c.solver = solver;
      c.scheme = scheme_arg == "be" ? TimeScheme::BackwardEuler
                 : scheme_arg == "cn" ? TimeScheme::CrankNicolson : TimeScheme::SpaceTime;
      if (placement_arg == "gauss") c.placement = {Placement::Kind::Gauss, 1.0, 1.0};
      if (placement_arg == "gll") c.placement.kind = Placement::Kind::Gll;
      if (!degrees_arg.empty()) c.degree = parse_degrees(degrees_arg).front();
      r = benchmark_bump(c);
      std::ostringstream os;
      os << "t,peak\n" << std::setprecision(12);
      for (const auto& s : r.cases[0]["series"]) os << s["t"].get<double>() << ',' << s["peak"].get<double>() << "\n";
      write_text(out / ("bump_" + scheme_arg + "_peaks.csv"), os.str());
      r.artifacts.push_back((out / ("bump_" + scheme_arg + "_peaks.csv")).string());
      cols = {"scheme", "degree", "initial_peak", "final_peak", "mirror_error", "max_rank"};
    } else {
      ViscosityConfig c;
      c.solver = solver;
      if (!degrees_arg.empty()) c.degrees = parse_degrees(degrees_arg);
      r = benchmark_artificial_viscosity(c);
      cols = {"method", "degree", "oscillation_count", "expected_count", "max_delta_vs_reference", "max_value"};
    }
    const std::string csv = cases_csv(r, cols);
    write_text(out / (bench_name + ".csv"), csv);
    r.artifacts.push_back((out / (bench_name + ".csv")).string());
    write_text(out / (bench_name + ".json"), r.to_json().dump(2) + "\n");
    std::cout << csv;
    bool stalled = false;
    for (const auto& rep : r.reports) stalled = stalled || (rep.stagnated && !rep.converged);
    return stalled && bench_name != "boundary6d" ? kExitStagnation : 0;
  } catch (const ConfigError& e) {
    std::cerr << "ttss: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "ttss: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StagnationError& e) {
    std::cerr << "ttss: " << e.what() << "\n";
    return kExitStagnation;
  } catch (const std::exception& e) {
    std::cerr << "ttss: error: " << e.what() << "\n";
    return 1;
  }
}
