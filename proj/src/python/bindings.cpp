#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvd/approx.hpp"
#include "cvd/compiler.hpp"
#include "cvd/expression.hpp"
#include "cvd/fock.hpp"
#include "cvd/rewrite.hpp"

namespace py = pybind11;
using namespace cvd;

namespace {

QuadPolynomial parse(const std::string& text) { return parse_polynomial(text); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Continuous-variable gate decomposition core";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);

  py::class_<QuadPolynomial>(m, "Polynomial")
      .def(py::init(&parse), py::arg("text"))
      .def_property_readonly("n_modes", &QuadPolynomial::n_modes)
      .def("is_hermitian", &QuadPolynomial::is_hermitian)
      .def("adjoint", &QuadPolynomial::adjoint)
      .def("__add__", [](const QuadPolynomial& a, const QuadPolynomial& b) { return a + b; })
      .def("__sub__", [](const QuadPolynomial& a, const QuadPolynomial& b) { return a - b; })
      .def("__mul__", [](const QuadPolynomial& a, const QuadPolynomial& b) { return a * b; })
      .def("__eq__", [](const QuadPolynomial& a, const QuadPolynomial& b) { return a == b; })
      .def("__str__", [](const QuadPolynomial& p) { return p.to_string(); })
      .def("__repr__", [](const QuadPolynomial& p) { return "Polynomial('" + p.to_string() + "')"; });

  m.def("commutator", &commutator, py::arg("a"), py::arg("b"));
  m.def("plan_text", [](const QuadPolynomial& h) { return plan(h).to_text(); }, py::arg("h"));
  m.def(
      "compile_json",
      [](const QuadPolynomial& h, double t, double budget, int split_order) {
        CompileOptions opt;
        opt.split_order = split_order;
        CompileResult r;
        {
          py::gil_scoped_release release;
          r = compile(h, t, budget, opt);
        }
        return py::make_tuple(r.sequence.to_json(), r.report.to_json());
      },
      py::arg("h"), py::arg("t"), py::arg("budget"), py::arg("split_order") = 2);
  m.def(
      "verify_identity",
      [](const std::string& name, double t, int n, int d, double threshold) {
        VerifyRow r = verify_identity(name, t, n, d, threshold);
        return py::dict(py::arg("name") = r.name, py::arg("N") = r.n, py::arg("d") = r.d,
                        py::arg("distance") = r.distance, py::arg("pass") = r.pass, py::arg("warning") = r.warning);
      },
      py::arg("name"), py::arg("t"), py::arg("n"), py::arg("d") = 6, py::arg("threshold") = 1e-5);
  m.def(
      "verify_sequence_json",
      [](const std::string& seq_json, const QuadPolynomial& h, double t, int n, int d) {
        return verify_sequence("sequence", gate_sequence_from_json(seq_json), h, t, n, d, 1.0).distance;
      },
      py::arg("sequence"), py::arg("h"), py::arg("t"), py::arg("n"), py::arg("d") = 6);
  m.def(
      "choose_order",
      [](double strength, double budget, const std::string& family) {
        OrderChoice c = choose_order(strength, budget, family_from_string(family));
        return py::dict(py::arg("scheme") = c.scheme ? c.scheme->name : std::string(),
                        py::arg("order") = c.scheme ? c.scheme->order : 0, py::arg("t") = c.t,
                        py::arg("rescale") = c.rescale, py::arg("dominant_error") = c.dominant_error);
      },
      py::arg("strength"), py::arg("budget"), py::arg("family"));
  m.def(
      "naive_count",
      [](const std::string& kind, double strength, double error) {
        return naive_count(kind == "nested" ? NaiveKind::Nested : NaiveKind::Commutation, strength, error);
      },
      py::arg("kind"), py::arg("strength"), py::arg("error"));
  m.def("printed_table_json", [](const std::string& which) { return scheme_to_json(printed_table(which)); });
  m.def("library_scheme_json", [](const std::string& name) { return scheme_to_json(*library_scheme(name)); });
  m.def(
      "scheme_residual",
      [](const std::string& scheme_json) { return verify_scheme(scheme_from_json(scheme_json)).max_residual(); },
      py::arg("scheme"));
}
