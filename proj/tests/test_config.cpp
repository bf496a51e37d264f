#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "ttss/config.hpp"
#include "ttss/errors.hpp"

using namespace ttss;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "dims": 2,
    "degrees": 12,
    "epsilon": 0.01,
    "beta": [1.0, {"factors": [{"fn": "poly", "params": [0, 1]}, 1.0]}],
    "rho": 0,
    "rhs": 1,
    "bc": 0,
    "solver": {"max_sweeps": 7, "rounding_tol": 1e-9, "local_solver": "direct"}
  })");
}

}  // namespace

TEST_CASE("univariate descriptors evaluate as documented") {
  CHECK(univariate_from_json(json(2.5)).eval(0.3) == 2.5);
  const auto p = univariate_from_json(json::parse(R"({"fn": "poly", "params": [1, 0, 3]})"));
  CHECK(p.eval(0.5) == doctest::Approx(1.75));
  CHECK(p.eval(0.5, 1) == doctest::Approx(3.0));
  const auto s = univariate_from_json(json::parse(R"({"fn": "sin_pi_k", "params": [2]})"));
  CHECK(s.eval(0.25) == doctest::Approx(1.0));
  CHECK(s.eval(0.0, 1) == doctest::Approx(2 * std::numbers::pi));
  const auto e = univariate_from_json(json::parse(R"({"fn": "exp", "params": [-2, 3]})"));
  CHECK(e.eval(0.5) == doctest::Approx(3 * std::exp(-1.0)));
  const auto st = univariate_from_json(json::parse(R"({"fn": "step", "params": [0.2, 5, -1]})"));
  CHECK(st.eval(0.1) == 5.0);
  CHECK(st.eval(0.3) == -1.0);
  const auto sup = univariate_from_json(json::parse(R"({"fn": "const", "params": [4], "support": [-0.5, 0.5]})"));
  CHECK(sup.eval(0.0) == 4.0);
  CHECK(sup.eval(0.9) == 0.0);
}

TEST_CASE("separable functions: products, factor sums and term lists") {
  const auto f = function_from_json(json::parse(R"({"scale": 2, "factors": [
      [{"fn": "poly", "params": [0, 1]}, {"fn": "const", "params": [1]}],
      {"fn": "poly", "params": [0, 0, 1]}]})"),
                                    2);
  const double x[2] = {0.5, 3.0};
  CHECK(f.eval(x) == doctest::Approx(2 * 1.5 * 9.0));
  const auto g = function_from_json(json::parse(R"({"terms": [
      {"factors": [1, {"fn": "poly", "params": [0, 1]}]},
      {"scale": -1, "factors": [{"fn": "poly", "params": [0, 1]}, 1]}]})"),
                                    2);
  CHECK(g.eval(x) == doctest::Approx(3.0 - 0.5));
  CHECK(function_from_json(json(7.0), 3).arity() == 3);
  CHECK_THROWS_AS(function_from_json(json::parse(R"({"factors": [1]})"), 2), ConfigError);
}

TEST_CASE("run configuration parses") {
  const RunConfig rc = run_config_from_json(base_config());
  CHECK(rc.problem.dims == 2);
  CHECK(rc.problem.degrees == std::vector<int>{12, 12});
  REQUIRE(rc.problem.beta.size() == 2);
  const double x[2] = {0.25, -0.5};
  CHECK(rc.problem.beta[1].eval(x) == doctest::Approx(0.25));
  CHECK(rc.problem.epsilon.eval(x) == doctest::Approx(0.01));
  CHECK(rc.problem.stabilization == Stabilization::Superconsistent);
  CHECK(rc.solver.max_sweeps == 7);
  CHECK(rc.solver.rounding_tol == 1e-9);
  CHECK(rc.solver.local_solver == LocalSolver::Direct);
  CHECK_FALSE(rc.problem.time.has_value());
}

TEST_CASE("time block and extra time factor") {
  json j = base_config();
  j["time"] = {{"t_end", 0.5}, {"scheme", "cn"}, {"dt", 0.05}, {"stride", 2}};
  j["rhs"] = json::parse(R"({"factors": [1, 1, {"fn": "exp", "params": [1]}]})");
  j["initial"] = 0;
  const RunConfig rc = run_config_from_json(j);
  REQUIRE(rc.problem.time.has_value());
  CHECK(rc.problem.time->scheme == TimeScheme::CrankNicolson);
  CHECK(rc.problem.time->dt == 0.05);
  CHECK(rc.problem.time->stride == 2);
  CHECK(rc.problem.rhs.arity() == 3);
}

TEST_CASE("configuration errors are ConfigError") {
  auto expect_bad = [](json j) { CHECK_THROWS_AS(run_config_from_json(j), ConfigError); };
  expect_bad(json::array());
  json j = base_config();
  j.erase("dims");
  expect_bad(j);
  j = base_config();
  j["dims"] = 0;
  expect_bad(j);
  j = base_config();
  j["beta"] = {1.0};
  expect_bad(j);
  j = base_config();
  j["stabilization"] = "upwind";
  expect_bad(j);
  j = base_config();
  j["epsilon"] = {{"fn", "nope"}};
  expect_bad(j);
  j = base_config();
  j["solver"]["max_sweeps"] = 0;
  expect_bad(j);
  j = base_config();
  j["solver"]["local_solver"] = "magic";
  expect_bad(j);
  j = base_config();
  j["rhs"] = json::parse(R"({"factors": [1, 1, 1]})");  // time factor without a time block
  expect_bad(j);
  j = base_config();
  j["time"] = {{"scheme", "rk4"}};
  expect_bad(j);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("to_json round trip keeps the problem") {
  json j = base_config();
  j["time"] = {{"t_end", 0.5}, {"scheme", "be"}, {"dt", 0.1}};
  j["initial"] = json::parse(R"({"factors": [{"fn": "sin_pi_k", "params": [1]}, {"fn": "sin_pi_k", "params": [1]}]})");
  const RunConfig a = run_config_from_json(j);
  json out = to_json(a.problem);
  out["solver"] = to_json(a.solver);
  const RunConfig b = run_config_from_json(out);
  CHECK(b.problem.dims == a.problem.dims);
  CHECK(b.problem.degrees == a.problem.degrees);
  CHECK(b.problem.time->scheme == TimeScheme::BackwardEuler);
  CHECK(b.problem.time->dt == 0.1);
  CHECK(b.solver.max_sweeps == a.solver.max_sweeps);
  CHECK(b.solver.local_solver == a.solver.local_solver);
  for (double x0 : {-0.7, 0.1, 0.9})
    for (double x1 : {-0.3, 0.6}) {
      const double x[2] = {x0, x1};
      CHECK(b.problem.beta[1].eval(x) == doctest::Approx(a.problem.beta[1].eval(x)));
      CHECK(b.problem.initial.eval(x) == doctest::Approx(a.problem.initial.eval(x)));
      CHECK(b.problem.epsilon.eval(x) == doctest::Approx(a.problem.epsilon.eval(x)));
    }
}
