#include "kakinuma/consistency.hpp"
#include "kakinuma/errors.hpp"
#include "kakinuma/evolution.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace kakinuma;

namespace {

py::dict fit_dict(const OrderFit& f) {
    py::dict d;
    d["slope"] = f.slope;
    d["intercept"] = f.intercept;
    d["r2"] = f.r2;
    d["inconclusive"] = f.inconclusive;
    d["deltas"] = f.deltas;
    d["errors"] = f.errors;
    d["excluded"] = f.excluded;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-layer Kakinuma model: elliptic reconstruction, evolution and consistency checks";

    auto base = py::register_exception<Error>(m, "KakinumaError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ConstraintViolation>(m, "ConstraintViolation", base.ptr());
    py::register_exception<CavitationError>(m, "CavitationError", base.ptr());
    py::register_exception<NonZeroMean>(m, "NonZeroMean", base.ptr());
    py::register_exception<StepRejected>(m, "StepRejected", base.ptr());
    py::register_exception<BelowNoiseFloor>(m, "BelowNoiseFloor", base.ptr());
    py::register_exception<SolverSingular>(m, "SolverSingular", base.ptr());

    py::class_<NondimParams>(m, "Params")
        .def_readonly("rho1", &NondimParams::rho1)
        .def_readonly("rho2", &NondimParams::rho2)
        .def_readonly("h1", &NondimParams::h1)
        .def_readonly("h2", &NondimParams::h2)
        .def_readonly("delta", &NondimParams::delta)
        .def_readonly("regime_warning", &NondimParams::regime_warning)
        .def("__repr__", [](const NondimParams& p) {
            return "Params(rho1=" + std::to_string(p.rho1) + ", h1=" + std::to_string(p.h1) +
                   ", delta=" + std::to_string(p.delta) + ")";
        });
    m.def("validate_params", &validate_params, py::arg("rho1"), py::arg("h1"), py::arg("delta"));

    py::class_<ExpansionSpec>(m, "ExpansionSpec")
        .def(py::init([](int N, const std::string& hyp) { return ExpansionSpec::make(N, parse_hypothesis(hyp)); }),
             py::arg("N"), py::arg("case") = "H1")
        .def_readonly("N", &ExpansionSpec::N)
        .def_readonly("Nstar", &ExpansionSpec::Nstar)
        .def_property_readonly("case", [](const ExpansionSpec& s) { return to_string(s.hyp); })
        .def("exponents", &ExpansionSpec::exponents, py::arg("layer"));

    py::class_<PeriodicGrid>(m, "Grid")
        .def(py::init<int, double>(), py::arg("M"), py::arg("length") = 2.0 * std::numbers::pi)
        .def_property_readonly("M", &PeriodicGrid::M)
        .def_property_readonly("length", &PeriodicGrid::length)
        .def_property_readonly("dx", &PeriodicGrid::dx)
        .def("nodes", &PeriodicGrid::nodes);

    m.def(
        "prepare_initial_data",
        [](const PeriodicGrid& g, const Vec& zeta, const Vec& phi, const Vec& b, const NondimParams& prm,
           const ExpansionSpec& spec) {
            const PreparedData pd = prepare_initial_data(g, zeta, phi, b, prm, spec);
            return py::make_tuple(pd.phi1, pd.phi2);
        },
        py::arg("grid"), py::arg("zeta"), py::arg("phi"), py::arg("b"), py::arg("params"), py::arg("spec"));

    m.def("hamiltonian_kakinuma", &hamiltonian_kakinuma, py::arg("grid"), py::arg("zeta"), py::arg("phi"),
          py::arg("b"), py::arg("params"), py::arg("spec"));
    m.def("hamiltonian_full", &hamiltonian_full, py::arg("grid"), py::arg("zeta"), py::arg("phi"), py::arg("b"),
          py::arg("params"), py::arg("P") = 16);
    m.def("residual_r1_flat", &residual_r1_flat, py::arg("grid"), py::arg("phi1"), py::arg("params"),
          py::arg("spec"));
    m.def(
        "dispersion",
        [](double xi, const NondimParams& prm, const ExpansionSpec& spec) {
            const Dispersion d = dispersion_symbols(xi, prm, spec);
            py::dict out;
            out["omega2_full"] = d.omega2_full;
            out["omega2_kakinuma"] = d.omega2_kakinuma;
            out["difference"] = d.difference;
            return out;
        },
        py::arg("xi"), py::arg("params"), py::arg("spec"));
    m.def(
        "order_fit",
        [](const std::vector<double>& deltas, const std::vector<double>& errors, double floor) {
            return fit_dict(order_fit(deltas, errors, floor));
        },
        py::arg("deltas"), py::arg("errors"), py::arg("floor") = 1e-13);
    m.def("default_delta_sweep", &default_delta_sweep);

    m.def(
        "simulate",
        [](const PeriodicGrid& g, const Vec& zeta, const Vec& phi, const Vec& b, const NondimParams& prm,
           const ExpansionSpec& spec, double dt, double T, int record_stride, bool halt_on_instability) {
            TrajectoryOptions opt;
            opt.dt = dt;
            opt.T = T;
            opt.record_stride = record_stride;
            opt.evo.halt_on_instability = halt_on_instability;
            TrajectoryRecord rec;
            {
                py::gil_scoped_release release;
                rec = run_trajectory(g, CanonicalState{0.0, zeta, phi}, b, prm, spec, opt);
            }
            py::dict out;
            out["t"] = rec.t;
            out["H_K"] = rec.hamiltonian;
            out["mass"] = rec.mass;
            out["min_margin"] = rec.min_margin;
            out["E_m"] = rec.energy_m;
            out["max_abs_zeta"] = rec.max_abs_zeta;
            out["max_compat_error"] = rec.max_compat_error;
            out["steps"] = rec.steps;
            out["halted"] = rec.halted;
            out["halt_reason"] = rec.halt_reason;
            return out;
        },
        py::arg("grid"), py::arg("zeta"), py::arg("phi"), py::arg("b"), py::arg("params"), py::arg("spec"),
        py::arg("dt"), py::arg("T"), py::arg("record_stride") = 1, py::arg("halt_on_instability") = true);

    m.def(
        "stability",
        [](const PeriodicGrid& g, const Vec& zeta, const Vec& phi, const Vec& b, const NondimParams& prm,
           const ExpansionSpec& spec) {
            const InterfaceState st{zeta, b};
            const PreparedData pd = prepare_initial_data(g, zeta, phi, b, prm, spec);
            const TimeDerivatives td = recover_time_derivatives(g, st, pd.phi1, pd.phi2, prm, spec);
            const ScalarField a = stability_function_a(g, st, pd.phi1, pd.phi2, td, prm, spec);
            const Velocities v = compute_velocities(g, pd.phi1, pd.phi2, st, prm, spec);
            py::dict out;
            out["a"] = a;
            out["margin"] = stability_margin(st, v, a, prm, stability_constants(spec));
            out["H1"] = thickness(st, prm, 1);
            out["H2"] = thickness(st, prm, 2);
            return out;
        },
        py::arg("grid"), py::arg("zeta"), py::arg("phi"), py::arg("b"), py::arg("params"), py::arg("spec"));
}
