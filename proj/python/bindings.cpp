// Copyright 2026 The splitprop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli/config.hpp"
#include "splitprop/analysis.hpp"
#include "splitprop/catalog.hpp"
#include "splitprop/designer.hpp"
#include "splitprop/hamiltonians.hpp"

namespace py = pybind11;
namespace sp = splitprop;

namespace {

sp::BoundKind bound_kind(const std::string &name) {
    if (name == "taylor") return sp::BoundKind::Taylor;
    if (name == "chebyshev") return sp::BoundKind::Chebyshev;
    throw sp::InvalidInput("kind must be 'taylor' or 'chebyshev'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Splitting, Chebyshev and Taylor propagators with certified error bounds.";

    py::register_exception<sp::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<sp::ValidityError>(m, "ValidityError", PyExc_ValueError);
    py::register_exception<sp::OutOfStability>(m, "OutOfStability", PyExc_ValueError);
    py::register_exception<sp::NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

    py::class_<sp::WaveState>(m, "WaveState")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("q"), py::arg("p"))
        .def_readwrite("q", &sp::WaveState::q)
        .def_readwrite("p", &sp::WaveState::p)
        .def("norm", &sp::WaveState::norm)
        .def("__len__", &sp::WaveState::size);

    py::class_<sp::SplitCoefficients>(m, "SplitCoefficients")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("a"), py::arg("b"))
        .def_readonly("a", &sp::SplitCoefficients::a)
        .def_readonly("b", &sp::SplitCoefficients::b)
        .def("stages", &sp::SplitCoefficients::stages)
        .def("is_consistent", &sp::SplitCoefficients::is_consistent, py::arg("tol") = 1e-12);

    py::class_<sp::MethodErrorProfile>(m, "MethodErrorProfile")
        .def_readonly("theta_max", &sp::MethodErrorProfile::theta_max)
        .def_readonly("y_star", &sp::MethodErrorProfile::y_star)
        .def_readonly("eps", &sp::MethodErrorProfile::eps)
        .def_readonly("mu", &sp::MethodErrorProfile::mu)
        .def_readonly("nu", &sp::MethodErrorProfile::nu)
        .def_readonly("delta", &sp::MethodErrorProfile::delta)
        .def_readonly("has_mu_nu", &sp::MethodErrorProfile::has_mu_nu);

    m.def("strang_sequence", &sp::strang_sequence, py::arg("m"));
    m.def(
        "k_matrix",
        [](const sp::SplitCoefficients &c, double y) {
            auto k = sp::k_matrix(c, y);
            return py::make_tuple(k.k11, k.k12, k.k21, k.k22);
        },
        py::arg("coefficients"), py::arg("y"));
    m.def("cs_values", &sp::cs_values, py::arg("coefficients"), py::arg("y"));
    m.def("epsilon_sup", py::overload_cast<const sp::SplitCoefficients &, double>(&sp::epsilon_sup),
          py::arg("coefficients"), py::arg("theta"));
    m.def("delta_sup", py::overload_cast<const sp::SplitCoefficients &, double>(&sp::delta_sup),
          py::arg("coefficients"), py::arg("theta"));
    m.def(
        "mu_nu",
        [](const sp::SplitCoefficients &c, double theta) {
            auto r = sp::mu_nu(c, theta);
            return py::make_tuple(r.mu, r.nu);
        },
        py::arg("coefficients"), py::arg("theta"));
    m.def("stability_threshold", py::overload_cast<const sp::SplitCoefficients &>(&sp::stability_threshold),
          py::arg("coefficients"));
    m.def("error_profile", py::overload_cast<const sp::SplitCoefficients &, double>(&sp::error_profile),
          py::arg("coefficients"), py::arg("theta"));
    m.def("nstep_bound", &sp::nstep_bound, py::arg("profile"), py::arg("n"));
    m.def("taylor_bound", &sp::taylor_bound, py::arg("m"), py::arg("theta"));
    m.def("chebyshev_bound", &sp::chebyshev_bound, py::arg("m"), py::arg("theta"));
    m.def(
        "min_degree", [](const std::string &kind, double theta, double tol) {
            return sp::min_degree(bound_kind(kind), theta, tol);
        },
        py::arg("kind"), py::arg("theta"), py::arg("tol"));

    m.def(
        "poschl_teller_bounds",
        [](std::size_t n, double length) {
            auto op = sp::FourierCollocation1D::poschl_teller(n, length, sp::PoschlTellerPotential{});
            return sp::spectral_bounds(op);
        },
        py::arg("n"), py::arg("length") = 10.0);
    m.def("random_unit_state", &sp::random_unit_state, py::arg("n"), py::arg("seed"));

    m.def(
        "_select_json",
        [](double t_beta, double tol, const std::string &catalog_path, bool heads_all) {
            sp::SelectOptions so;
            so.heads_all = heads_all;
            return sp::to_json(sp::select_method(t_beta, tol, sp::cli::resolve_catalog(catalog_path), so));
        },
        py::arg("t_beta"), py::arg("tol"), py::arg("catalog") = "", py::arg("heads_all") = false);
    m.def(
        "_propagate_json",
        [](const std::string &config_json) {
            sp::cli::RunConfig cfg = sp::cli::parse_run_config(config_json);
            py::gil_scoped_release release;
            auto out = sp::cli::run_propagate(cfg, sp::cli::resolve_catalog(cfg.catalog_path));
            return std::make_tuple(out.result.state, sp::to_json(out.result.report), out.tolerance_met);
        },
        py::arg("config_json"));
    m.def(
        "_design_json",
        [](int stages, double theta, int l_window) {
            sp::DesignOptions opts;
            opts.l_window = l_window;
            sp::DesignResult res;
            {
                py::gil_scoped_release release;
                res = sp::design_method(stages, theta, opts);
            }
            return sp::record_to_json(res.record);
        },
        py::arg("m"), py::arg("theta"), py::arg("l_window") = 7);
}
