#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cavity/adapt.hpp"
#include "cavity/errors.hpp"
#include "cavity/pml.hpp"
#include "cavity/postprocess.hpp"
#include "cavity/specfun.hpp"

namespace py = pybind11;
using namespace cavity;

namespace {

Eigen::MatrixXd vertex_array(const Mesh& m) {
  Eigen::MatrixXd v(m.num_vertices(), 2);
  for (int i = 0; i < m.num_vertices(); ++i) v.row(i) = m.vertices[i].transpose();
  return v;
}

Eigen::MatrixXi triangle_array(const Mesh& m) {
  Eigen::MatrixXi t(m.num_triangles(), 3);
  for (int i = 0; i < m.num_triangles(); ++i)
    for (int k = 0; k < 3; ++k) t(i, k) = m.triangles[i][k];
  return t;
}

Eigen::VectorXcd vertex_values(const SolutionField& f) {
  const Mesh& m = *f.mesh;
  Eigen::VectorXcd v(m.num_vertices());
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> l{0.0, 0.0, 0.0};
      l[k] = 1.0;
      v(m.triangles[t][k]) = f.eval(t, l).value;
    }
  }
  return v;
}

py::list curve_rows(const RcsCurve& c) {
  py::list rows;
  for (const auto& s : c.samples) rows.append(py::make_tuple(s.axis_value, s.rcs_db, s.dof_count));
  return rows;
}

SweepSpec make_sweep(const std::string& axis, const std::vector<double>& values) {
  SweepSpec sp;
  if (axis == "angle_deg") {
    sp.axis = SweepAxis::AngleDeg;
  } else if (axis == "frequency_ghz") {
    sp.axis = SweepAxis::FrequencyGhz;
  } else {
    throw ValidationError("axis must be 'angle_deg' or 'frequency_ghz'");
  }
  sp.values = values;
  if (sp.values.empty()) throw ValidationError("sweep grid is empty");
  return sp;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive PML finite element solver for cavity scattering";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());

  py::enum_<Polarization>(m, "Polarization").value("TM", Polarization::TM).value("TE", Polarization::TE);
  py::enum_<Method>(m, "Method").value("PML", Method::Pml).value("TBC", Method::Tbc);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("polarization", &Scenario::polarization)
      .def_readwrite("kappa0", &Scenario::kappa0)
      .def_readwrite("theta", &Scenario::theta)
      .def_readwrite("R", &Scenario::R)
      .def_readwrite("rho", &Scenario::rho)
      .def_readwrite("sigma0", &Scenario::sigma0)
      .def_readwrite("m_pml", &Scenario::m_pml)
      .def_readwrite("fem_degree", &Scenario::fem_degree)
      .def_readwrite("n_arc", &Scenario::n_arc)
      .def_property_readonly("wavelength", &Scenario::wavelength)
      .def_static("from_json", [](const std::string& text) { return load_scenario(text); })
      .def("to_json", [](const Scenario& s) { return scenario_to_json(s); })
      .def("validate", [](const Scenario& s) { validate(s); })
      .def("reference_field", [](const Scenario& s, double x, double y) { return reference_field(s, Vec2(x, y)).value; });

  m.def("preset_names", &preset_names);
  m.def("preset", [](const std::string& name) { return preset(name); }, py::arg("name"));
  m.def("flat_ground", &flat_ground, py::arg("polarization"), py::arg("kappa0"), py::arg("theta"),
        py::arg("R_over_lambda") = 0.5);

  py::class_<AdaptOptions>(m, "AdaptOptions")
      .def(py::init<>())
      .def_readwrite("tau", &AdaptOptions::tau)
      .def_readwrite("tol", &AdaptOptions::tol)
      .def_readwrite("max_dof", &AdaptOptions::max_dof)
      .def_readwrite("pml_error_cap", &AdaptOptions::pml_error_cap)
      .def_readwrite("max_iterations", &AdaptOptions::max_iterations)
      .def_readwrite("initial_h", &AdaptOptions::initial_h)
      .def_readwrite("method", &AdaptOptions::method)
      .def_readwrite("tbc_modes", &AdaptOptions::tbc_modes)
      .def_readwrite("threads", &AdaptOptions::threads);

  py::class_<ConvergenceRecord>(m, "ConvergenceRecord")
      .def_readonly("iteration", &ConvergenceRecord::iteration)
      .def_readonly("dof_count", &ConvergenceRecord::dof_count)
      .def_readonly("dof_physical", &ConvergenceRecord::dof_physical)
      .def_readonly("eps_h", &ConvergenceRecord::eps_h)
      .def_readonly("eps_pml", &ConvergenceRecord::eps_pml)
      .def_readonly("wall_time_s", &ConvergenceRecord::wall_time_s);

  py::class_<AdaptResult>(m, "AdaptResult")
      .def_readonly("scenario", &AdaptResult::scenario)
      .def_property_readonly("history", [](const AdaptResult& r) { return r.history.records; })
      .def_property_readonly("eps_h", [](const AdaptResult& r) { return r.report.eps_h; })
      .def_property_readonly("eps_pml", [](const AdaptResult& r) { return r.report.eps_pml; })
      .def_property_readonly("dof_count", [](const AdaptResult& r) { return r.report.dof_count; })
      .def_property_readonly("eta", [](const AdaptResult& r) { return r.report.eta; })
      .def_property_readonly("vertices", [](const AdaptResult& r) { return vertex_array(*r.mesh); })
      .def_property_readonly("triangles", [](const AdaptResult& r) { return triangle_array(*r.mesh); })
      .def_property_readonly("vertex_values", [](const AdaptResult& r) { return vertex_values(r.field); })
      .def("far_field", [](const AdaptResult& r, double phi) { return far_field(r.field, r.scenario, phi); })
      .def("backscatter_rcs_db",
           [](const AdaptResult& r) {
             return rcs_db(backscatter_rcs_linear(r.field, r.scenario), r.scenario.wavelength());
           })
      .def("export_vtk", [](const AdaptResult& r, const std::filesystem::path& p) { export_field(r.field, p, &r.report); });

  m.def("adapt_solve", &adapt_solve, py::arg("scenario"), py::arg("options") = AdaptOptions{},
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "backscatter_rcs",
      [](const Scenario& s, const std::string& axis, const std::vector<double>& values, const AdaptOptions& o) {
        const SweepSpec sp = make_sweep(axis, values);
        RcsCurve c;
        {
          py::gil_scoped_release release;
          c = backscatter_rcs(s, sp, o);
        }
        return curve_rows(c);
      },
      py::arg("scenario"), py::arg("axis"), py::arg("values"), py::arg("options") = AdaptOptions{},
      "List of (axis value, rcs_db, dof_count) per sweep point.");

  m.def(
      "compare",
      [](const Scenario& s, const std::string& axis, const std::vector<double>& values, AdaptOptions o) {
        const SweepSpec sp = make_sweep(axis, values);
        RcsCurve pml, tbc;
        {
          py::gil_scoped_release release;
          o.method = Method::Pml;
          pml = backscatter_rcs(s, sp, o);
          o.method = Method::Tbc;
          tbc = backscatter_rcs(s, sp, o);
        }
        const RcsComparison c = compare_curves(pml, tbc);
        py::dict d;
        d["pml"] = curve_rows(pml);
        d["tbc"] = curve_rows(tbc);
        d["delta_db"] = c.delta_db;
        d["max_abs_db"] = c.max_abs_db;
        d["mean_abs_db"] = c.mean_abs_db;
        return d;
      },
      py::arg("scenario"), py::arg("axis"), py::arg("values"), py::arg("options") = AdaptOptions{});

  m.def("parse_range", &parse_range, py::arg("text"));
  m.def("hankel1", [](int n, cplx z) { return specfun::hankel1(n, z).value; }, py::arg("n"), py::arg("z"));
  m.def("propagation_bound", [](const Scenario& s) { return propagation_bound(PmlMap::from(s), s.kappa0); });
}
