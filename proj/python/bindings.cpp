#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>
#include <string>

#include "zeitlin/algebra.hpp"
#include "zeitlin/dynamics.hpp"
#include "zeitlin/errors.hpp"
#include "zeitlin/render.hpp"
#include "zeitlin/rng.hpp"
#include "zeitlin/spectral.hpp"
#include "zeitlin/stability.hpp"
#include "zeitlin/steady.hpp"

namespace py = pybind11;
using namespace zeitlin;

namespace {

PerturbationMode parse_mode(const std::string& name) {
  if (name == "ORBIT") return PerturbationMode::kOrbit;
  if (name == "GENERIC") return PerturbationMode::kGeneric;
  throw InputError("perturbation mode must be 'ORBIT' or 'GENERIC', got '" +
                   name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Matrix hydrodynamics on the sphere: su(n) vorticity algebra, steady "
      "states, stability certificates, isospectral time stepping, and field "
      "rendering.";
  m.attr("__version__") = "0.1.0";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<IntegratorError>(m, "IntegratorError",
                                          PyExc_RuntimeError);

  py::class_<SpinBasis>(m, "SpinBasis")
      .def(py::init<int>(), py::arg("n"))
      .def_property_readonly("n", &SpinBasis::n)
      .def_property_readonly("hbar", &SpinBasis::hbar)
      .def("X", &SpinBasis::X, py::arg("alpha"),
           py::return_value_policy::copy);

  m.def("inner", &inner, py::arg("a"), py::arg("b"));
  m.def("su_norm", &su_norm, py::arg("a"));
  m.def("bracket", &bracket, py::arg("a"), py::arg("b"));
  m.def("su_part", &su_part, py::arg("a"));
  m.def("laplacian_apply", &laplacian_apply, py::arg("basis"), py::arg("w"));
  m.def("poisson_solve", &poisson_solve, py::arg("basis"), py::arg("w"));
  m.def("casimir", &casimir, py::arg("w"), py::arg("k"));
  m.def("momentum", &momentum, py::arg("basis"), py::arg("w"));
  m.def("hamiltonian", &hamiltonian, py::arg("basis"), py::arg("w"));
  m.def("random_su",
        py::overload_cast<int, std::uint64_t>(&random_su),
        py::arg("n"), py::arg("seed"));
  m.def("so3_rotate", &so3_rotate, py::arg("basis"), py::arg("rho"),
        py::arg("w"));
  m.def("so3_exp", &so3_exp, py::arg("rho"));
  m.def("project_eigenspace_1", &project_eigenspace_1, py::arg("basis"),
        py::arg("w"));

  py::class_<EigenBasisEntry>(m, "EigenBasisEntry")
      .def_readonly("l", &EigenBasisEntry::l)
      .def_readonly("m", &EigenBasisEntry::m)
      .def_readonly("T", &EigenBasisEntry::T);
  m.def("eigenbasis_build", &eigenbasis_build, py::arg("basis"),
        py::arg("l_max"));

  py::class_<CommonSpectrum>(m, "CommonSpectrum")
      .def_readonly("n", &CommonSpectrum::n)
      .def_readonly("p", &CommonSpectrum::p)
      .def_readonly("w", &CommonSpectrum::w)
      .def_readonly("Lambda", &CommonSpectrum::Lambda);
  m.def("simultaneous_diagonalize", &simultaneous_diagonalize, py::arg("w"),
        py::arg("p"), py::arg("tol") = 1e-8,
        py::arg("cluster_gap") = default_tolerances().cluster_gap,
        py::arg("offdiag_tol") = default_tolerances().joint_offdiag);
  m.def("diagonal_pairing", &diagonal_pairing, py::arg("spectrum"),
        py::arg("x"));

  py::class_<RatioExtrema>(m, "RatioExtrema")
      .def_readonly("L", &RatioExtrema::L)
      .def_readonly("c", &RatioExtrema::c)
      .def_readonly("C", &RatioExtrema::C)
      .def_readonly("degenerate_p", &RatioExtrema::degenerate_p)
      .def_readonly("degenerate_w", &RatioExtrema::degenerate_w);
  m.def("ratio_extrema", &ratio_extrema, py::arg("spectrum"),
        py::arg("degeneracy_tol") = default_tolerances().spectrum_degeneracy);

  py::class_<SteadyState>(m, "SteadyState")
      .def_readonly("W0", &SteadyState::W0)
      .def_readonly("P0", &SteadyState::P0)
      .def_readonly("spectrum", &SteadyState::spectrum)
      .def_readonly("commutator_residual", &SteadyState::commutator_residual)
      .def_readonly("laplacian_residual", &SteadyState::laplacian_residual)
      .def_readonly("eigen_l", &SteadyState::eigen_l)
      .def_readonly("detail", &SteadyState::detail)
      .def_property_readonly("provenance", [](const SteadyState& s) {
        return std::string(to_string(s.provenance));
      });
  m.def("zonal_state", &zonal_state, py::arg("basis"), py::arg("d"));
  m.def("eigen_state", &eigen_state, py::arg("basis"), py::arg("l"),
        py::arg("coeffs"));
  m.def("newton_functional_state", &newton_functional_state, py::arg("basis"),
        py::arg("f_coeffs"), py::arg("d_init"), py::arg("max_iter") = 100,
        py::arg("tol") = 1e-12);
  m.def(
      "make_steady_state",
      [](const SpinBasis& basis, const cmat& w0, const cmat& p0) {
        return make_steady_state(basis, w0, p0, Provenance::kLoaded);
      },
      py::arg("basis"), py::arg("w0"), py::arg("p0"));

  py::class_<Alignment>(m, "Alignment")
      .def_readonly("rho", &Alignment::rho)
      .def_readonly("aligned", &Alignment::aligned);
  m.def("align_first_eigenspace", &align_first_eigenspace, py::arg("basis"),
        py::arg("w"));

  py::class_<RigidityReport>(m, "RigidityReport")
      .def_readonly("L", &RigidityReport::L)
      .def_readonly("alignment_rotation", &RigidityReport::alignment_rotation)
      .def_readonly("offdiag_residual", &RigidityReport::offdiag_residual)
      .def_readonly("x3_commutator_residual",
                    &RigidityReport::x3_commutator_residual)
      .def_readonly("norm_W0", &RigidityReport::norm_W0)
      .def_property_readonly("conclusion", [](const RigidityReport& r) {
        return std::string(to_string(r.conclusion));
      });
  m.def("rigidity_report", &rigidity_report, py::arg("basis"),
        py::arg("state"), py::arg("residual_tol") = 1e-8,
        py::arg("margin") = default_tolerances().ratio_margin);

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("matrix_invariant", &Tolerances::matrix_invariant)
      .def_readwrite("commuting_pair", &Tolerances::commuting_pair)
      .def_readwrite("joint_offdiag", &Tolerances::joint_offdiag)
      .def_readwrite("cluster_gap", &Tolerances::cluster_gap)
      .def_readwrite("spectrum_degeneracy", &Tolerances::spectrum_degeneracy)
      .def_readwrite("steady_pair", &Tolerances::steady_pair)
      .def_readwrite("ratio_margin", &Tolerances::ratio_margin)
      .def_readwrite("tangent_truncation", &Tolerances::tangent_truncation)
      .def_readwrite("newton", &Tolerances::newton)
      .def_readwrite("trivial_state", &Tolerances::trivial_state)
      .def_readwrite("definiteness", &Tolerances::definiteness)
      .def_readwrite("integrator_inner", &Tolerances::integrator_inner);
  m.def("default_tolerances", &default_tolerances);

  m.def("quadratic_form_Q", &quadratic_form_Q, py::arg("basis"), py::arg("x"),
        py::arg("w0"), py::arg("p0"),
        py::arg("steady_tol") = default_tolerances().steady_pair);

  py::class_<SandwichReport>(m, "SandwichReport")
      .def_readonly("applicable", &SandwichReport::applicable)
      .def_readonly("delta_norm", &SandwichReport::delta_norm)
      .def_readonly("lower_slack", &SandwichReport::lower_slack)
      .def_readonly("upper_slack", &SandwichReport::upper_slack)
      .def_readonly("refined_lower_slack", &SandwichReport::refined_lower_slack)
      .def_readonly("refined_upper_applicable",
                    &SandwichReport::refined_upper_applicable)
      .def_readonly("refined_upper_slack", &SandwichReport::refined_upper_slack)
      .def_readonly("p1_leakage", &SandwichReport::p1_leakage);
  m.def("sandwich_check", &sandwich_check, py::arg("basis"), py::arg("x"),
        py::arg("w0"), py::arg("p0"), py::arg("ratios"),
        py::arg("leakage_tol") = 1e-10);

  m.def("orbit_hessian_spectrum", &orbit_hessian_spectrum, py::arg("basis"),
        py::arg("w0"), py::arg("p0"), py::arg("constrain_momentum"),
        py::arg("tol") = default_tolerances());

  py::class_<StabilityCertificate>(m, "StabilityCertificate")
      .def_readonly("n", &StabilityCertificate::n)
      .def_readonly("ratios", &StabilityCertificate::ratios)
      .def_readonly("hessian_full", &StabilityCertificate::hessian_full)
      .def_readonly("hessian_constrained",
                    &StabilityCertificate::hessian_constrained)
      .def_readonly("p1_leakage", &StabilityCertificate::p1_leakage)
      .def_readonly("crosscheck_applicable",
                    &StabilityCertificate::crosscheck_applicable)
      .def_readonly("crosscheck_passed",
                    &StabilityCertificate::crosscheck_passed)
      .def_readonly("crosscheck_note", &StabilityCertificate::crosscheck_note)
      .def_readonly("tolerances", &StabilityCertificate::tolerances)
      .def_readonly("w0_hash", &StabilityCertificate::w0_hash)
      .def_readonly("p0_hash", &StabilityCertificate::p0_hash)
      .def_property_readonly("verdict", [](const StabilityCertificate& c) {
        return std::string(to_string(c.verdict));
      });
  m.def("certify", &certify, py::arg("basis"), py::arg("w0"), py::arg("p0"),
        py::arg("tol") = default_tolerances());

  m.def("vector_field", &vector_field, py::arg("basis"), py::arg("w"));
  m.def(
      "isomp_step",
      [](const SpinBasis& basis, const cmat& w, double h, double inner_tol,
         int max_inner) {
        StepStats stats;
        cmat out = isomp_step(basis, w, h, &stats, inner_tol, max_inner);
        return py::make_tuple(out, stats.inner_iterations,
                              stats.inner_residual);
      },
      py::arg("basis"), py::arg("w"), py::arg("h"),
      py::arg("inner_tol") = default_tolerances().integrator_inner,
      py::arg("max_inner") = 200,
      "Returns (w_next, inner_iterations, inner_residual).");

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("h", &TrajectoryRecord::h)
      .def_readonly("times", &TrajectoryRecord::times)
      .def_readonly("energy", &TrajectoryRecord::energy)
      .def_readonly("casimirs", &TrajectoryRecord::casimirs)
      .def_readonly("momentum", &TrajectoryRecord::momentum)
      .def_readonly("spectra", &TrajectoryRecord::spectra)
      .def_readonly("spec_drift", &TrajectoryRecord::spec_drift)
      .def_readonly("dist", &TrajectoryRecord::dist)
      .def_readonly("inner_iterations", &TrajectoryRecord::inner_iterations)
      .def_readonly("inner_residuals", &TrajectoryRecord::inner_residuals)
      .def_readonly("snapshots", &TrajectoryRecord::snapshots)
      .def_readonly("snapshot_steps", &TrajectoryRecord::snapshot_steps)
      .def_readonly("w_final", &TrajectoryRecord::w_final);
  m.def(
      "evolve",
      [](const SpinBasis& basis, const cmat& w_init, double h, double T,
         int casimir_max, int snapshot_stride, std::optional<cmat> w_ref,
         double inner_tol, int max_inner) {
        MonitorConfig config;
        config.casimir_max = casimir_max;
        config.snapshot_stride = snapshot_stride;
        return evolve(basis, w_init, h, T, config,
                      w_ref ? &*w_ref : nullptr, {}, inner_tol, max_inner);
      },
      py::arg("basis"), py::arg("w_init"), py::arg("h"), py::arg("T"),
      py::arg("casimir_max") = 5, py::arg("snapshot_stride") = 0,
      py::arg("w_ref") = std::nullopt,
      py::arg("inner_tol") = default_tolerances().integrator_inner,
      py::arg("max_inner") = 200);

  py::class_<LyapunovReport>(m, "LyapunovReport")
      .def_readonly("epsilon", &LyapunovReport::epsilon)
      .def_readonly("seed", &LyapunovReport::seed)
      .def_readonly("max_deviation", &LyapunovReport::max_deviation)
      .def_readonly("deviation_series", &LyapunovReport::deviation_series)
      .def_readonly("certificate", &LyapunovReport::certificate)
      .def_readonly("record", &LyapunovReport::record)
      .def_property_readonly("mode", [](const LyapunovReport& r) {
        return std::string(to_string(r.mode));
      });
  m.def(
      "lyapunov_experiment",
      [](const SpinBasis& basis, const SteadyState& state, double epsilon,
         const std::string& mode, std::uint64_t seed, double h, double T,
         int casimir_max, double inner_tol, int max_inner) {
        MonitorConfig config;
        config.casimir_max = casimir_max;
        return lyapunov_experiment(basis, state, epsilon, parse_mode(mode),
                                   seed, h, T, config, {}, inner_tol,
                                   max_inner);
      },
      py::arg("basis"), py::arg("state"), py::arg("epsilon"), py::arg("mode"),
      py::arg("seed"), py::arg("h"), py::arg("T"), py::arg("casimir_max") = 5,
      py::arg("inner_tol") = default_tolerances().integrator_inner,
      py::arg("max_inner") = 200);

  py::class_<SphericalExpansion>(m, "SphericalExpansion")
      .def_readonly("n", &SphericalExpansion::n)
      .def_readonly("l_max", &SphericalExpansion::l_max)
      .def_readonly("coefficients", &SphericalExpansion::coefficients);
  m.def("spherical_expansion", &spherical_expansion, py::arg("basis"),
        py::arg("w"), py::arg("l_max") = 0);
  m.def("field_value", &field_value, py::arg("expansion"), py::arg("theta"),
        py::arg("phi"));
  m.def("ladder_multiplet", &ladder_multiplet, py::arg("basis"), py::arg("l"));

  py::class_<RenderGrid>(m, "RenderGrid")
      .def_readonly("thetas", &RenderGrid::thetas)
      .def_readonly("phis", &RenderGrid::phis)
      .def_readonly("values", &RenderGrid::values);
  m.def("render_field", &render_field, py::arg("basis"), py::arg("w"),
        py::arg("n_theta"), py::arg("n_phi"));
}
