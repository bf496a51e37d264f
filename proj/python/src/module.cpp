#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "ttss/config.hpp"
#include "ttss/benchmarks.hpp"
#include "ttss/diagnostics.hpp"
#include "ttss/errors.hpp"
#include "ttss/operator_assembly.hpp"
#include "ttss/spectral1d.hpp"
#include "ttss/superconsistency.hpp"
#include "ttss/tensor_train.hpp"
#include "ttss/time_integration.hpp"
#include "ttss/tt_io.hpp"
#include "ttss/tt_solver.hpp"

namespace py = pybind11;
using namespace ttss;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

// First index fastest matches Fortran order.
TTVector from_dense(const FArray& a, double tol, int max_rank) {
  if (a.ndim() < 1) throw InvalidArgument("from_dense: need at least one dimension");
  std::vector<int> modes;
  for (py::ssize_t k = 0; k < a.ndim(); ++k) modes.push_back(static_cast<int>(a.shape(k)));
  DenseTensor t(modes);
  std::copy(a.data(), a.data() + a.size(), t.data.begin());
  return tt_svd(t, tol, max_rank <= 0 ? kNoRankCap : max_rank);
}

py::array_t<double> to_dense(const TTVector& v) {
  const DenseTensor d = tt_full(v);
  std::vector<py::ssize_t> shape(d.modes.begin(), d.modes.end()), strides;
  py::ssize_t s = sizeof(double);
  for (int m : d.modes) {
    strides.push_back(s);
    s *= m;
  }
  py::array_t<double> out(shape, strides);
  std::copy(d.data.begin(), d.data.end(), out.mutable_data());
  return out;
}

// Returns (solution, report json text); time-marched runs return the final state.
std::pair<TTVector, std::string> solve_config(const std::string& text) {
  const RunConfig rc = run_config_from_json(nlohmann::json::parse(text));
  const ProblemSpec& spec = rc.problem;
  const DiscreteOperatorSet ops = assemble(spec);
  nlohmann::json rep;
  TTVector x;
  if (spec.time && spec.time->scheme != TimeScheme::SpaceTime) {
    const MarchConfig mc = MarchConfig::from_spec(spec);
    const Trajectory tr = spec.time->scheme == TimeScheme::BackwardEuler
                              ? backward_euler_march(ops, spec, mc, rc.solver)
                              : crank_nicolson_march(ops, spec, mc, rc.solver);
    x = tr.states.back();
    rep = {{"steps", tr.steps}, {"times", tr.times}};
  } else if (spec.time) {
    const SpaceTimeResult st = spacetime_solve(ops, spec, rc.solver);
    x = st.x;
    rep = report_to_json(st.report);
    rep["time_nodes"] = st.time.times;
    if (spec.exact) rep["error"] = relative_error(x, exact_spacetime_samples(ops, spec));
  } else {
    auto [a, rhs] = impose_dirichlet(ops, spec);
    const SolveResult r = solve(a, rhs, std::nullopt, rc.solver);
    x = r.x;
    rep = report_to_json(r.report);
  }
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& g : ops.grids) nodes.push_back(g.base.rep_nodes);
  rep["nodes"] = nodes;
  rep["final_ranks"] = x.ranks();
  return {x, rep.dump()};
}

}  // namespace

PYBIND11_MODULE(_ttss, m) {
  m.doc() = "Tensor-train superconsistent spectral solver";

  // later registrations win, so the catch-all for the base class goes first
  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      base(e.what());
    }
  });
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<RefusalError>(m, "RefusalError", base.ptr());
  py::register_exception<StagnationError>(m, "StagnationError", base.ptr());

  m.def("gll_nodes", &gll_nodes, py::arg("n"));
  m.def("gauss_nodes", &gauss_nodes, py::arg("n"));
  m.def("superconsistent_nodes", &superconsistent_nodes, py::arg("n"), py::arg("epsilon"), py::arg("beta"));
  m.def(
      "diff_matrix", [](const std::vector<double>& nodes) { return diff_matrix(nodes); }, py::arg("nodes"));
  m.def(
      "eval_matrix",
      [](const std::vector<double>& nodes, const std::vector<double>& targets) { return eval_matrix(nodes, targets); },
      py::arg("nodes"), py::arg("targets"));
  m.def("oscillation_count", &oscillation_count, py::arg("values"), py::arg("floor_rel") = 1e-12);

  py::class_<TTVector>(m, "TT")
      .def_static("from_dense", &from_dense, py::arg("array"), py::arg("tol") = 1e-14, py::arg("max_rank") = 0)
      .def_static("load", &load_tt_vector, py::arg("path"))
      .def("save", [](const TTVector& v, const std::string& p) { save_tt(p, v); }, py::arg("path"))
      .def("full", &to_dense)
      .def_property_readonly("modes", &TTVector::modes)
      .def_property_readonly("ranks", &TTVector::ranks)
      .def_property_readonly("max_rank", &TTVector::max_rank)
      .def("norm", &tt_norm)
      .def("dot", &tt_dot)
      .def("compression", &compression_ratio)
      .def("round", [](const TTVector& v, double tol, int r) { return tt_round(v, tol, r <= 0 ? kNoRankCap : r); },
           py::arg("tol"), py::arg("max_rank") = 0)
      .def("entry", [](const TTVector& v, const std::vector<int>& idx) { return tt_entry(v, idx); })
      .def("__add__", &tt_add)
      .def("__sub__", &tt_sub)
      .def("__mul__", &tt_scale)
      .def("__rmul__", &tt_scale)
      .def("hadamard", &tt_hadamard)
      .def("__repr__", [](const TTVector& v) {
        std::string s = "TT(modes=[";
        for (int n : v.modes()) s += std::to_string(n) + ",";
        s.back() = ']';
        return s + ", max_rank=" + std::to_string(v.max_rank()) + ")";
      });

  m.def("relative_error", &relative_error, py::arg("approx"), py::arg("exact"));
  m.def("_solve_config", &solve_config, py::arg("config_json"));
}
