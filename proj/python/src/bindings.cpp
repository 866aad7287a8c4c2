#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bdlab/bott_dirac.hpp"
#include "bdlab/clifford_fock.hpp"
#include "bdlab/eigensolver.hpp"
#include "bdlab/errors.hpp"
#include "bdlab/experiment.hpp"
#include "bdlab/field_theory.hpp"
#include "bdlab/fluctuations.hpp"
#include "bdlab/gaussian_measure.hpp"
#include "bdlab/holonomy.hpp"

namespace py = pybind11;
using namespace bdlab;

namespace {

ModeBasis basis_from(int d, double L, double tau1, double sigma, std::size_t n, const std::string& weight,
                     bool zero_mode) {
  std::ostringstream text;
  text.precision(17);
  text << "d = " << d << "\nL = " << L << "\ntau1 = " << tau1 << "\nsigma = " << sigma << "\nn = " << n
       << "\nweight = " << weight << "\nzero_mode = " << (zero_mode ? "true" : "false") << "\n";
  const auto r = parse_config(text.str());
  if (!r.ok()) throw DomainError(r.errors.front().describe());
  BasisOptions opt;
  opt.include_zero_mode = zero_mode;
  return build_basis(r.config->geometry, r.config->sobolev, n, r.config->weight, opt);
}

ExperimentConfig config_from(const std::string& text, const std::map<std::string, std::string>& overrides) {
  std::vector<std::pair<std::string, std::string>> ov(overrides.begin(), overrides.end());
  const auto r = parse_config(text, ov);
  if (!r.ok()) {
    std::string msg;
    for (const auto& e : r.errors) msg += (msg.empty() ? "" : "\n") + e.describe();
    throw DomainError(msg);
  }
  return *r.config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Truncated Bott-Dirac operators, Gaussian ground-state measures and gauge holonomies.";

  static py::exception<ConditionVeto> veto(m, "ConditionVeto", PyExc_RuntimeError);
  static py::exception<ConvergenceError> conv(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConditionVeto& e) {
      PyErr_SetString(veto.ptr(), e.what());
    } catch (const ConvergenceError& e) {
      PyErr_SetString(conv.ptr(), e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const CapacityError& e) {
      PyErr_SetString(PyExc_MemoryError, e.what());
    }
  });

  py::class_<Mode>(m, "Mode")
      .def_readonly("index", &Mode::index)
      .def_readonly("k", &Mode::k)
      .def_property_readonly("parity", [](const Mode& md) { return std::string(parity_name(md.parity)); })
      .def_readonly("lam", &Mode::lambda)
      .def_readonly("momentum", &Mode::momentum)
      .def_readonly("s", &Mode::s)
      .def_readonly("supnorm", &Mode::supnorm)
      .def("__repr__", [](const Mode& md) {
        return "Mode(index=" + std::to_string(md.index) + ", parity=" + parity_name(md.parity) +
               ", s=" + std::to_string(md.s) + ")";
      });

  m.def(
      "modes",
      [](int d, double L, double tau1, double sigma, std::size_t n, const std::string& weight, bool zero_mode) {
        return basis_from(d, L, tau1, sigma, n, weight, zero_mode).modes();
      },
      py::arg("d") = 1, py::arg("L") = 6.283185307179586, py::arg("tau1") = 1.0, py::arg("sigma") = 1.0,
      py::arg("n") = 4, py::arg("weight") = "massive:1", py::arg("zero_mode") = true,
      "Laplace eigenmodes on T^d in canonical order.");

  m.def(
      "convergence",
      [](int d, double tau1, double sigma, std::size_t n, const std::string& weight) {
        const auto rep = convergence_report(basis_from(d, 6.283185307179586, tau1, sigma, n, weight, true));
        py::dict out;
        out["sum_sinv_xi2"] = rep.sum_sinv_xi2;
        out["sum_xi2"] = rep.sum_xi2;
        out["tail_sinv_xi2"] = rep.tail_sinv_xi2;
        out["tail_xi2"] = rep.tail_xi2;
        out["sinv_converges"] = rep.condition_sinv_converges;
        out["sup_converges"] = rep.condition_sup_converges;
        return out;
      },
      py::arg("d"), py::arg("tau1") = 1.0, py::arg("sigma") = 1.0, py::arg("n") = 20, py::arg("weight") = "massive:1");

  m.def(
      "b_squared_spectrum",
      [](std::vector<double> s, int Nb, double tau2, std::size_t count) {
        const FockSpec spec{static_cast<int>(s.size()), Nb, tau2, std::move(s)};
        return spectrum(interior_square(spec), count).eigenvalues;
      },
      py::arg("s"), py::arg("Nb"), py::arg("tau2") = 1.0, py::arg("count") = 10,
      "Lowest eigenvalues of B^2 on interior states.");

  m.def(
      "kernel_residual",
      [](std::vector<double> s, int Nb, double tau2) {
        const FockSpec spec{static_cast<int>(s.size()), Nb, tau2, std::move(s)};
        return (assemble_B(spec).matrix() * ground_state(spec)).norm();
      },
      py::arg("s"), py::arg("Nb"), py::arg("tau2") = 1.0, "||B eta_gs|| at a truncation.");

  m.def("car_violation", [](int n) { return check_car(FermionSpace(n)); }, py::arg("n"));

  m.def(
      "gaussian_expectation",
      [](const std::vector<double>& a, const std::vector<double>& s, double tau2, const std::string& f,
         const std::string& quad, std::optional<std::uint64_t> seed) {
        return gaussian_expectation(a, s, tau2, TestFunction::parse(f), QuadratureSpec::parse(quad, seed)).value;
      },
      py::arg("a"), py::arg("s"), py::arg("tau2") = 1.0, py::arg("f") = "bump:1", py::arg("quad") = "gh:40",
      py::arg("seed") = py::none(), "E f(sum_i a_i y_i), y_i ~ N(0, tau2 / (2 s_i)).");

  m.def(
      "translate_overlap",
      [](std::vector<double> s, const std::vector<double>& omega, double t, double tau2) {
        const FockSpec spec{static_cast<int>(s.size()), 2, tau2, std::move(s)};
        return translate_overlap(spec, omega, t);
      },
      py::arg("s"), py::arg("omega"), py::arg("t"), py::arg("tau2") = 1.0);

  m.def(
      "holonomy",
      [](const std::string& connection, std::vector<double> flow, double duration, std::vector<double> start,
         int steps) {
        std::istringstream in(connection);
        const Connection conn = Connection::parse(in);
        FlowSpec spec{VectorField::constant(conn.circumference(), std::move(flow)), duration, std::move(start)};
        return DenseMat(holonomy_along_flow(conn, spec, steps));
      },
      py::arg("connection"), py::arg("flow"), py::arg("duration"), py::arg("start"), py::arg("steps") = 1000,
      "Transport along a constant flow for a connection given in the text format.");

  m.def(
      "wilson_loop",
      [](const std::string& connection, std::vector<double> flow, double duration, std::vector<double> start,
         int steps) {
        std::istringstream in(connection);
        const Connection conn = Connection::parse(in);
        FlowSpec spec{VectorField::constant(conn.circumference(), std::move(flow)), duration, std::move(start)};
        return wilson_loop(conn, spec, steps);
      },
      py::arg("connection"), py::arg("flow"), py::arg("duration"), py::arg("start"), py::arg("steps") = 1000);

  m.def(
      "dilation_spectrum",
      [](int Nb, double coupling, std::size_t count, int margin) {
        const FockSpec spec{1, Nb, 1.0, {1.0}};
        return fluct_spectrum({theta_dilation(spec, 0), true, coupling}, spec, count, margin).eigenvalues;
      },
      py::arg("Nb"), py::arg("coupling"), py::arg("count") = 5, py::arg("margin") = 5,
      "Symmetrized fluctuated spectrum for the single-mode dilation Theta.");

  m.def(
      "render",
      [](const std::string& subcommand, const std::string& config, const std::map<std::string, std::string>& overrides) {
        return render_experiment(config_from(config, overrides), subcommand);
      },
      py::arg("subcommand"), py::arg("config") = "", py::arg("overrides") = std::map<std::string, std::string>{},
      "Artifact text a CLI subcommand would write.");

  m.def(
      "run",
      [](const std::string& subcommand, const std::string& config, const std::map<std::string, std::string>& overrides)
          -> std::tuple<int, std::string, std::string> {
        const auto parsed = parse_config(config, {overrides.begin(), overrides.end()});
        std::ostringstream err, out;
        if (!parsed.ok()) {
          for (const auto& e : parsed.errors) err << e.describe() << '\n';
          return {static_cast<int>(exit_config), std::string{}, err.str()};
        }
        const int code = run_experiment(*parsed.config, subcommand, err, out);
        return {code, out.str(), err.str()};
      },
      py::arg("subcommand"), py::arg("config") = "", py::arg("overrides") = std::map<std::string, std::string>{},
      "(exit code, stdout text, stderr text) of a CLI run.");

  m.attr("subcommands") = subcommands();
  m.attr("config_keys") = config_keys();
}
