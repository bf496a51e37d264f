#include "ttss/config.hpp"

#include <fstream>

#include "ttss/errors.hpp"

namespace ttss {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T dflt) {
  if (!j.contains(key) || j[key].is_null()) return dflt;
  return j[key].get<T>();
}

std::vector<double> number_list(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected a number list");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(std::string(what) + ": expected numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

UniKind kind_from(const std::string& s) {
  if (s == "const") return UniKind::Const;
  if (s == "sin_pi_k") return UniKind::SinPiK;
  if (s == "poly") return UniKind::Poly;
  if (s == "exp") return UniKind::Exp;
  if (s == "step") return UniKind::Step;
  throw ConfigError("unknown function '" + s + "' (const, sin_pi_k, poly, exp, step)");
}

Factor factor_from_json(const json& j) {
  if (j.is_array()) {
    Factor f;
    for (const auto& u : j) f.parts.push_back(univariate_from_json(u));
    if (f.parts.empty()) throw ConfigError("empty factor sum");
    return f;
  }
  return Factor(univariate_from_json(j));
}

Term term_from_json(const json& j, int arity) {
  if (!j.is_object() || !j.contains("factors")) throw ConfigError("term needs a 'factors' list");
  Term t;
  t.scale = get_or<double>(j, "scale", 1.0);
  for (const auto& f : j["factors"]) t.factors.push_back(factor_from_json(f));
  if (arity > 0 && static_cast<int>(t.factors.size()) != arity)
    throw ConfigError("term has " + std::to_string(t.factors.size()) + " factors, expected " +
                      std::to_string(arity));
  return t;
}

TimeScheme scheme_from(const std::string& s) {
  if (s == "spacetime") return TimeScheme::SpaceTime;
  if (s == "be" || s == "backward_euler") return TimeScheme::BackwardEuler;
  if (s == "cn" || s == "crank_nicolson") return TimeScheme::CrankNicolson;
  throw ConfigError("unknown time scheme '" + s + "'");
}

std::string scheme_to(TimeScheme s) {
  switch (s) {
    case TimeScheme::SpaceTime: return "spacetime";
    case TimeScheme::BackwardEuler: return "be";
    case TimeScheme::CrankNicolson: return "cn";
  }
  return "?";
}

Placement placement_from_json(const json& j) {
  Placement p;
  const std::string kind = j.is_string() ? j.get<std::string>() : get_or<std::string>(j, "kind", "auto");
  if (kind == "auto") p.kind = Placement::Kind::Auto;
  else if (kind == "fixed") p.kind = Placement::Kind::Fixed;
  else if (kind == "gauss") p.kind = Placement::Kind::Gauss;
  else if (kind == "gll") p.kind = Placement::Kind::Gll;
  else throw ConfigError("unknown placement '" + kind + "'");
  if (j.is_object()) {
    p.epsilon = get_or<double>(j, "epsilon", p.epsilon);
    p.beta = get_or<double>(j, "beta", p.beta);
  }
  return p;
}

}  // namespace

Univariate univariate_from_json(const json& j) {
  if (j.is_number()) return Univariate::constant(j.get<double>());
  if (!j.is_object() || !j.contains("fn")) throw ConfigError("function needs an 'fn' name");
  Univariate u;
  u.kind = kind_from(j["fn"].get<std::string>());
  u.params = j.contains("params") ? number_list(j["params"], "params") : std::vector<double>{};
  if (u.kind == UniKind::Const && u.params.empty()) u.params = {0.0};
  if (u.kind == UniKind::SinPiK && u.params.empty()) throw ConfigError("sin_pi_k needs k");
  if (u.kind == UniKind::Step && u.params.size() != 3) throw ConfigError("step needs [x0, left, right]");
  if (j.contains("support")) {
    auto s = number_list(j["support"], "support");
    if (s.size() != 2 || !(s[0] < s[1])) throw ConfigError("support must be [lo, hi] with lo < hi");
    u.support(s[0], s[1]);
  }
  return u;
}

SeparableFunction function_from_json(const json& j, int arity) {
  try {
    if (j.is_number()) return SeparableFunction::constant(j.get<double>(), arity);
    SeparableFunction f;
    if (j.is_object() && j.contains("terms")) {
      for (const auto& t : j["terms"]) f.terms.push_back(term_from_json(t, arity));
    } else {
      f.terms.push_back(term_from_json(j, arity));
    }
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("function descriptor: ") + e.what());
  }
}

SolverConfig solver_from_json(const json& j, SolverConfig c) {
  try {
    c.max_sweeps = get_or(j, "max_sweeps", c.max_sweeps);
    c.residual_tol = get_or(j, "residual_tol", c.residual_tol);
    c.rounding_tol = get_or(j, "rounding_tol", c.rounding_tol);
    c.enrichment_rank = get_or(j, "enrichment_rank", c.enrichment_rank);
    c.max_rank = get_or(j, "max_rank", c.max_rank);
    c.local_direct_max = get_or(j, "local_direct_max", c.local_direct_max);
    c.gmres_restart = get_or(j, "gmres_restart", c.gmres_restart);
    c.gmres_max_iters = get_or(j, "gmres_max_iters", c.gmres_max_iters);
    c.stagnation_window = get_or(j, "stagnation_window", c.stagnation_window);
    c.stagnation_factor = get_or(j, "stagnation_factor", c.stagnation_factor);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.verbose = get_or(j, "verbose", c.verbose);
    const std::string ls = get_or<std::string>(j, "local_solver", "auto");
    if (ls == "auto") c.local_solver = LocalSolver::Auto;
    else if (ls == "direct") c.local_solver = LocalSolver::Direct;
    else if (ls == "iterative") c.local_solver = LocalSolver::Iterative;
    else throw ConfigError("unknown local_solver '" + ls + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig rc;
  ProblemSpec& p = rc.problem;
  try {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    p.dims = j.at("dims").get<int>();
    if (p.dims < 1) throw ConfigError("dims must be at least 1");
    const json& deg = j.at("degrees");
    if (deg.is_number()) p.degrees.assign(p.dims, deg.get<int>());
    else p.degrees = deg.get<std::vector<int>>();
    const int d = p.dims;
    auto fn = [&](const char* key, int arity, double dflt) {
      return j.contains(key) ? function_from_json(j[key], arity) : SeparableFunction::constant(dflt, arity);
    };
    const bool timed = j.contains("time");
    // Time-dependent data may carry one extra (trailing) factor.
    auto data = [&](const char* key) {
      if (!j.contains(key)) return SeparableFunction{};
      const json& v = j[key];
      if (v.is_number()) return SeparableFunction::constant(v.get<double>(), d);
      SeparableFunction f = function_from_json(v, 0);
      for (const auto& t : f.terms) {
        const int a = static_cast<int>(t.factors.size());
        if (a != d && !(timed && a == d + 1))
          throw ConfigError(std::string(key) + ": term has " + std::to_string(a) + " factors");
      }
      return f;
    };
    p.epsilon = fn("epsilon", d, 1.0);
    if (j.contains("beta")) {
      const json& b = j["beta"];
      if (!b.is_array() || static_cast<int>(b.size()) != d) throw ConfigError("beta needs one entry per dimension");
      for (const auto& e : b) p.beta.push_back(function_from_json(e, d));
    } else {
      for (int k = 0; k < d; ++k) p.beta.push_back(SeparableFunction::constant(0.0, d));
    }
    p.rho = fn("rho", d, 0.0);
    p.rhs = data("rhs");
    p.dirichlet = data("bc");
    if (j.contains("initial")) p.initial = function_from_json(j["initial"], d);
    if (j.contains("exact")) p.exact = data("exact");
    if (p.rhs.empty() && !p.exact) p.rhs = SeparableFunction::constant(0.0, d);
    if (timed) {
      const json& t = j["time"];
      TimeSpec ts;
      ts.t_end = get_or(t, "t_end", ts.t_end);
      ts.scheme = scheme_from(get_or<std::string>(t, "scheme", "spacetime"));
      ts.degree = get_or(t, "degree", ts.degree);
      ts.dt = get_or(t, "dt", ts.dt);
      ts.step_rounding_tol = get_or(t, "step_rounding_tol", ts.step_rounding_tol);
      ts.stride = get_or(t, "stride", ts.stride);
      p.time = ts;
    }
    const std::string st = get_or<std::string>(j, "stabilization", "superconsistent");
    if (st == "superconsistent" || st == "t2s2") p.stabilization = Stabilization::Superconsistent;
    else if (st == "plain") p.stabilization = Stabilization::Plain;
    else throw ConfigError("unknown stabilization '" + st + "'");
    const std::string cp = get_or<std::string>(j, "companions", "identity");
    if (cp == "identity") p.companions = Companions::Identity;
    else if (cp == "collocated") p.companions = Companions::Collocated;
    else throw ConfigError("unknown companions '" + cp + "'");
    if (j.contains("placement")) {
      const json& pl = j["placement"];
      if (pl.is_array()) {
        for (const auto& e : pl) p.placement.push_back(placement_from_json(e));
      } else {
        p.placement.assign(d, placement_from_json(pl));
      }
    }
    if (j.contains("solver")) rc.solver = solver_from_json(j["solver"]);
    if (j.contains("rounding_tol")) {
      rc.solver.rounding_tol = j["rounding_tol"].get<double>();
      rc.solver = solver_from_json(json::object(), rc.solver);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  }
  try {
    p.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const Univariate& u) {
  json j{{"fn", to_string(u.kind)}, {"params", u.params}};
  if (u.has_support) j["support"] = {u.lo, u.hi};
  return j;
}

json to_json(const SeparableFunction& f) {
  json terms = json::array();
  for (const auto& t : f.terms) {
    json fs = json::array();
    for (const auto& fac : t.factors) {
      if (fac.parts.size() == 1) {
        fs.push_back(to_json(fac.parts.front()));
      } else {
        json sum = json::array();
        for (const auto& u : fac.parts) sum.push_back(to_json(u));
        fs.push_back(sum);
      }
    }
    terms.push_back({{"scale", t.scale}, {"factors", fs}});
  }
  return {{"terms", terms}};
}

json to_json(const SolverConfig& c) {
  const char* ls = c.local_solver == LocalSolver::Auto ? "auto"
                   : c.local_solver == LocalSolver::Direct ? "direct" : "iterative";
  return {{"max_sweeps", c.max_sweeps},
          {"residual_tol", c.residual_tol},
          {"rounding_tol", c.rounding_tol},
          {"enrichment_rank", c.enrichment_rank},
          {"max_rank", c.max_rank},
          {"local_solver", ls},
          {"local_direct_max", c.local_direct_max},
          {"gmres_restart", c.gmres_restart},
          {"gmres_max_iters", c.gmres_max_iters},
          {"stagnation_window", c.stagnation_window},
          {"stagnation_factor", c.stagnation_factor},
          {"seed", c.seed}};
}

json to_json(const ProblemSpec& p) {
  json j;
  j["dims"] = p.dims;
  j["degrees"] = p.degrees;
  j["epsilon"] = to_json(p.epsilon);
  j["beta"] = json::array();
  for (const auto& b : p.beta) j["beta"].push_back(to_json(b));
  j["rho"] = to_json(p.rho);
  if (!p.rhs.empty()) j["rhs"] = to_json(p.rhs);
  if (!p.dirichlet.empty()) j["bc"] = to_json(p.dirichlet);
  if (!p.initial.empty()) j["initial"] = to_json(p.initial);
  if (p.exact) j["exact"] = to_json(*p.exact);
  if (p.time) {
    j["time"] = {{"t_end", p.time->t_end},
                 {"scheme", scheme_to(p.time->scheme)},
                 {"degree", p.time->degree},
                 {"dt", p.time->dt},
                 {"step_rounding_tol", p.time->step_rounding_tol},
                 {"stride", p.time->stride}};
  }
  j["stabilization"] = p.stabilization == Stabilization::Plain ? "plain" : "superconsistent";
  j["companions"] = p.companions == Companions::Collocated ? "collocated" : "identity";
  return j;
}

}  // namespace ttss
