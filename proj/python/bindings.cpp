#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ll1/admm.hpp"
#include "ll1/dca.hpp"
#include "ll1/error.hpp"
#include "ll1/problems.hpp"
#include "ll1/regularizer.hpp"
#include "ll1/verification.hpp"

namespace py = pybind11;
using namespace ll1;

namespace {

Problem make_problem(Mat A, Vec b, std::optional<double> gamma, std::optional<Vec> truth) {
  Problem p = gamma ? Problem::unconstrained(std::move(A), std::move(b), *gamma)
                    : Problem::constrained(std::move(A), std::move(b));
  p.ground_truth = std::move(truth);
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lifted-l1 sparse recovery: penalties, ADMM and DCA solvers, instance generators";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<UnsupportedOperation>(m, "UnsupportedOperation", PyExc_NotImplementedError);
  py::register_exception<FactorizationError>(m, "FactorizationError", PyExc_ArithmeticError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

  py::class_<GSpec>(m, "GSpec")
      .def_static("g1", &GSpec::g1)
      .def_static("g2", &GSpec::g2)
      .def_static("lp", &GSpec::lp, py::arg("p"))
      .def_static("log_sum", &GSpec::log_sum, py::arg("a"))
      .def_static("scad", &GSpec::scad, py::arg("a"), py::arg("b"))
      .def_static("mcp", &GSpec::mcp, py::arg("a"), py::arg("b"))
      .def_static("capped_l1", &GSpec::capped_l1, py::arg("a"))
      .def_static("transformed_l1", &GSpec::transformed_l1, py::arg("a"))
      .def_static("erf", &GSpec::erf, py::arg("sigma"))
      .def_static("const_zero", &GSpec::const_zero)
      .def_property_readonly("name", [](const GSpec& g) { return std::string(to_string(g.id())); })
      .def_property_readonly("domain", [](const GSpec& g) { return std::string(to_string(g.domain())); })
      .def_property_readonly("type", [](const GSpec& g) { return std::string(to_string(g.type_class())); })
      .def("__call__", [](const GSpec& g, double u) { return g_eval(g, u); }, py::arg("u"))
      .def("__repr__", [](const GSpec& g) { return "GSpec(" + std::string(to_string(g.id())) + ")"; });

  m.def("penalty", [](const GSpec& g, double alpha, const Vec& x) { return f_eval(LiftedPenalty(g, alpha), x); },
        py::arg("g"), py::arg("alpha"), py::arg("x"), "F(x) = min_u <u,|x|> + alpha g(u)");
  m.def("penalty_grad_abs",
        [](const GSpec& g, double alpha, const Vec& x) { return f_grad_abs(LiftedPenalty(g, alpha), x); },
        py::arg("g"), py::arg("alpha"), py::arg("x"));
  m.def("u_minimize", [](const GSpec& g, double alpha, const Vec& x) { return u_minimize(LiftedPenalty(g, alpha), x); },
        py::arg("g"), py::arg("alpha"), py::arg("x"));
  m.def("shrink", &shrink, py::arg("v"), py::arg("u"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("rho", &SolverConfig::rho)
      .def_readwrite("alpha0", &SolverConfig::alpha0)
      .def_readwrite("alpha0_scale", &SolverConfig::alpha0_scale)
      .def_readwrite("eta", &SolverConfig::eta)
      .def_readwrite("alpha_floor", &SolverConfig::alpha_floor)
      .def_readwrite("eps", &SolverConfig::eps)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("record_traces", &SolverConfig::record_traces);

  py::class_<DcaConfig>(m, "DcaConfig")
      .def(py::init<>())
      .def_readwrite("rho", &DcaConfig::rho)
      .def_readwrite("alpha0", &DcaConfig::alpha0)
      .def_readwrite("alpha0_scale", &DcaConfig::alpha0_scale)
      .def_readwrite("eta", &DcaConfig::eta)
      .def_readwrite("alpha_floor", &DcaConfig::alpha_floor)
      .def_readwrite("max_outer", &DcaConfig::max_outer)
      .def_readwrite("max_inner", &DcaConfig::max_inner)
      .def_readwrite("inner_tol", &DcaConfig::inner_tol)
      .def_readwrite("sub_max_iter", &DcaConfig::sub_max_iter)
      .def_readwrite("record_traces", &DcaConfig::record_traces);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("solver", &SolveResult::solver)
      .def_readonly("x", &SolveResult::x)
      .def_readonly("u", &SolveResult::u)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("outer_iterations", &SolveResult::outer_iterations)
      .def_readonly("inner_iterations", &SolveResult::inner_iterations)
      .def_readonly("time_ms", &SolveResult::time_ms)
      .def_readonly("alpha0", &SolveResult::alpha0)
      .def_readonly("final_alpha", &SolveResult::final_alpha)
      .def_readonly("rel_err", &SolveResult::rel_err)
      .def_readonly("L_trace", &SolveResult::L_trace)
      .def_readonly("r_trace", &SolveResult::r_trace)
      .def_readonly("objective_trace", &SolveResult::objective_trace);

  m.def(
      "admm_solve",
      [](const GSpec& g, Mat A, Vec b, std::optional<double> gamma, const SolverConfig& config,
         std::optional<Vec> x_true) {
        const Problem p = make_problem(std::move(A), std::move(b), gamma, std::move(x_true));
        py::gil_scoped_release release;
        return admm_solve(g, p, config);
      },
      py::arg("g"), py::arg("A"), py::arg("b"), py::arg("gamma") = py::none(),
      py::arg("config") = SolverConfig{}, py::arg("x_true") = py::none(),
      "Constrained when gamma is None, else min F(x) + gamma/2 ||Ax - b||^2.");
  m.def(
      "dca_solve",
      [](const GSpec& g, Mat A, Vec b, std::optional<double> gamma, const DcaConfig& config,
         std::optional<Vec> x_true) {
        const Problem p = make_problem(std::move(A), std::move(b), gamma, std::move(x_true));
        py::gil_scoped_release release;
        return dca_solve(g, p, config);
      },
      py::arg("g"), py::arg("A"), py::arg("b"), py::arg("gamma") = py::none(),
      py::arg("config") = DcaConfig{}, py::arg("x_true") = py::none());

  m.def(
      "gen_instance",
      [](const std::string& kind, int m_rows, int n, double param, int s, double sigma, std::uint64_t seed,
         std::uint64_t trial, bool normalize) {
        const MatrixSpec spec = matrix_kind_from_string(kind) == MatrixKind::Gaussian
                                    ? MatrixSpec::gaussian(m_rows, n, param, normalize)
                                    : MatrixSpec::dct(m_rows, n, param, normalize);
        Instance inst = gen_instance(spec, s, sigma, TrialSeed{seed, trial});
        return py::make_tuple(inst.A, inst.x_true, inst.b);
      },
      py::arg("kind"), py::arg("m"), py::arg("n"), py::arg("param"), py::arg("s"), py::arg("sigma") = 0.0,
      py::arg("seed") = 0, py::arg("trial") = 0, py::arg("normalize") = false,
      "Returns (A, x_true, b).");
  m.def("coherence", &coherence, py::arg("A"));
  m.def(
      "metrics",
      [](const Vec& x, const Vec& x_g) {
        const Metrics r = metrics(x, x_g);
        py::dict d;
        d["rel_err"] = r.rel_err;
        d["mse"] = r.mse;
        d["success"] = r.success;
        return d;
      },
      py::arg("x"), py::arg("x_true"));

  m.def(
      "l0_oracle",
      [](const Mat& A, const Vec& b, int s_max, double feas_tol) {
        const L0Certificate c = l0_oracle(A, b, s_max, feas_tol);
        py::list sols;
        for (const auto& s : c.solutions) sols.append(py::make_tuple(s.support, s.x));
        py::dict d;
        d["s_star"] = c.s_star;
        d["epsilon0"] = c.epsilon0;
        d["solutions"] = sols;
        return d;
      },
      py::arg("A"), py::arg("b"), py::arg("s_max") = 6, py::arg("feas_tol") = 1e-8);
  m.def(
      "verify",
      [](std::uint64_t seed) {
        py::list rows;
        for (const auto& r : run_verification_suite(seed)) rows.append(py::make_tuple(r.name, r.passed, r.detail));
        return rows;
      },
      py::arg("seed") = 20240521, "Runs the built-in checks; returns (name, passed, detail) rows.");
}
