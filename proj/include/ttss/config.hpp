#pragma once

#include <string>

#include "json.hpp"

#include "ttss/problem.hpp"
#include "ttss/tt_solver.hpp"

namespace ttss {

struct RunConfig {
  ProblemSpec problem;
  SolverConfig solver;
};

// All parse failures throw ConfigError.
Univariate univariate_from_json(const nlohmann::json& j);
SeparableFunction function_from_json(const nlohmann::json& j, int arity);
SolverConfig solver_from_json(const nlohmann::json& j, SolverConfig base = {});
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const Univariate& u);
nlohmann::json to_json(const SeparableFunction& f);
nlohmann::json to_json(const SolverConfig& c);
nlohmann::json to_json(const ProblemSpec& p);

}  // namespace ttss
