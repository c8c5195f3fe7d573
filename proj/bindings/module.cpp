#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tentacle/dynamics.hpp"
#include "tentacle/floer.hpp"
#include "tentacle/hormander.hpp"
#include "tentacle/json_io.hpp"
#include "tentacle/tentacular.hpp"

namespace py = pybind11;

namespace {

using tentacle::json;

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) {
        out[py::str(key)] = to_py(value);
      }
      return out;
    }
    default:
      return py::none();
  }
}

tentacle::QuadraticHamiltonian make_h(const tentacle::Mat& A, double c) {
  if (A.rows() != A.cols()) {
    throw tentacle::ValidationError("A must be square");
  }
  const double defect = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (defect > tentacle::tol::symmetry * (1.0 + A.cwiseAbs().maxCoeff())) {
    throw tentacle::ValidationError("A must be symmetric");
  }
  return tentacle::QuadraticHamiltonian{A, c};
}

}  // namespace

PYBIND11_MODULE(tentacle, m) {
  m.doc() =
      "Quadratic Hamiltonians on standard symplectic space: normal forms, "
      "tentacularity certificates, closed characteristics, loop-space flows";

  py::register_exception<tentacle::ValidationError>(m, "ValidationError",
                                                    PyExc_ValueError);
  py::register_exception<tentacle::UnresolvedError>(m, "UnresolvedError",
                                                    PyExc_RuntimeError);

  m.def(
      "classify",
      [](const tentacle::Mat& A, double c) {
        return to_py(tentacle::to_json(tentacle::classify(make_h(A, c))));
      },
      py::arg("A"), py::arg("c") = 1.0,
      "Normal-form classification of H(x) = x.A.x/2 - c");

  m.def(
      "check",
      [](const tentacle::Mat& A, double c) {
        const auto H = make_h(A, c);
        const auto rep = tentacle::full_report(H);
        json doc = tentacle::to_json(rep);
        doc["replay_passed"] = tentacle::replay(rep, H);
        return to_py(doc);
      },
      py::arg("A"), py::arg("c") = 1.0,
      "Axiom verdicts with certificates, replayed before returning");

  m.def(
      "orbits",
      [](const tentacle::Mat& A, double c, int k_max, int n_quad) {
        const auto H = make_h(A, c);
        json arr = json::array();
        for (const auto& orb :
             tentacle::enumerate_closed_characteristics(H, k_max)) {
          json o = tentacle::to_json(orb);
          o["length"] = tentacle::length_action_check(orb, H, n_quad).length;
          arr.push_back(std::move(o));
        }
        return to_py(arr);
      },
      py::arg("A"), py::arg("c") = 1.0, py::arg("k_max") = 3,
      py::arg("n_quad") = 512,
      "Closed characteristics on the level set with actions and indices");

  m.def(
      "discrete_action",
      [](const tentacle::Mat& A, double c, double eta, const tentacle::Mat& v) {
        return tentacle::discrete_action(
            tentacle::LoopState(static_cast<int>(v.rows()), eta, v),
            make_h(A, c));
      },
      py::arg("A"), py::arg("c"), py::arg("eta"), py::arg("v"));

  m.def(
      "discrete_gradient",
      [](const tentacle::Mat& A, double c, double eta, const tentacle::Mat& v) {
        auto [dv, deta] = tentacle::discrete_gradient(
            tentacle::LoopState(static_cast<int>(v.rows()), eta, v),
            make_h(A, c));
        return py::make_tuple(dv, deta);
      },
      py::arg("A"), py::arg("c"), py::arg("eta"), py::arg("v"));

  m.def(
      "hessian_spectrum",
      [](const tentacle::Mat& A, double c, double eta, const tentacle::Mat& v,
         int n_low) {
        return tentacle::discrete_hessian_spectrum(
            tentacle::LoopState(static_cast<int>(v.rows()), eta, v),
            make_h(A, c), n_low);
      },
      py::arg("A"), py::arg("c"), py::arg("eta"), py::arg("v"),
      py::arg("n_low") = 8);

  m.def(
      "integrate_flow",
      [](const tentacle::Mat& A, double c, double eta, const tentacle::Mat& v,
         double s_max, double ds, int snap_every) {
        const auto diag = tentacle::integrate_flow(
            tentacle::LoopState(static_cast<int>(v.rows()), eta, v),
            make_h(A, c), s_max, ds, snap_every);
        return to_py(tentacle::to_json(diag));
      },
      py::arg("A"), py::arg("c"), py::arg("eta"), py::arg("v"),
      py::arg("s_max"), py::arg("ds"), py::arg("snap_every") = 10);

  m.def(
      "newton_refine",
      [](const tentacle::Mat& A, double c, double eta, const tentacle::Mat& v,
         int max_iter, double res_tol) {
        const auto res = tentacle::newton_refine(
            tentacle::LoopState(static_cast<int>(v.rows()), eta, v),
            make_h(A, c), max_iter, res_tol);
        py::dict out;
        out["v"] = res.refined.v;
        out["eta"] = res.refined.eta;
        out["residual_norm"] = res.residual_norm;
        out["iterations"] = res.iterations;
        out["converged"] = res.converged;
        return out;
      },
      py::arg("A"), py::arg("c"), py::arg("eta"), py::arg("v"),
      py::arg("max_iter") = 50, py::arg("res_tol") = 1e-10);
}
