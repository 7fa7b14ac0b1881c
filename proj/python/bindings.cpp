// Python module exposing the main operations: mesh generation, the linear
// solver, traction-separation utilities, saw-tooth constructions, the forward
// saw-tooth analysis and the inverse identification.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slafem/fem.hpp"
#include "slafem/forward.hpp"
#include "slafem/inverse.hpp"
#include "slafem/loading_curve.hpp"
#include "slafem/mesh.hpp"
#include "slafem/outputs.hpp"
#include "slafem/sawtooth.hpp"
#include "slafem/ts_curve.hpp"

namespace py = pybind11;
using namespace slafem;

PYBIND11_MODULE(slafem, m) {
  m.doc() = "plane-stress saw-tooth fracture analysis and traction-separation "
            "curve identification";

  py::class_<Node>(m, "Node")
      .def(py::init<>())
      .def_readwrite("id", &Node::id)
      .def_readwrite("x", &Node::x)
      .def_readwrite("y", &Node::y);

  py::enum_<Dof>(m, "Dof").value("X", Dof::X).value("Y", Dof::Y);

  py::class_<Mesh>(m, "Mesh")
      .def(py::init<>())
      .def_readonly("nodes", &Mesh::nodes)
      .def_readonly("thickness", &Mesh::thickness)
      .def_property_readonly("node_count", [](const Mesh& m) { return m.nodes.size(); })
      .def_property_readonly("quad_count", [](const Mesh& m) { return m.quads.size(); })
      .def_property_readonly("interface_count",
                             [](const Mesh& m) { return m.interfaces.size(); })
      .def("interface_ip_count", &Mesh::interface_ip_count)
      .def("validate", &Mesh::validate);

  py::enum_<ResponseKind>(m, "ResponseKind")
      .value("Cmod", ResponseKind::Cmod)
      .value("Deflection", ResponseKind::Deflection);

  m.def(
      "generate_notched_beam",
      [](double span, double depth, double thickness, double notch_depth, double notch_width,
         double elem_size, ResponseKind response, double load) {
        BeamOptions opt;
        opt.response = response;
        opt.load = load;
        return generate_notched_beam(span, depth, thickness, notch_depth, notch_width,
                                     elem_size, opt);
      },
      py::arg("span"), py::arg("depth"), py::arg("thickness"), py::arg("notch_depth"),
      py::arg("notch_width"), py::arg("elem_size"),
      py::arg("response") = ResponseKind::Cmod, py::arg("load") = 1.0);

  m.def(
      "generate_compact_tension",
      [](double width, double height, double thickness, double notch_length,
         double elem_fine, double elem_coarse, double load) {
        CtOptions opt;
        opt.load = load;
        return generate_compact_tension(width, height, thickness, notch_length, elem_fine,
                                        elem_coarse, opt);
      },
      py::arg("width"), py::arg("height"), py::arg("thickness"), py::arg("notch_length"),
      py::arg("elem_fine"), py::arg("elem_coarse"), py::arg("load") = 1.0);

  m.def("read_mesh", &read_mesh, py::arg("path"));
  m.def("write_mesh", &write_mesh, py::arg("mesh"), py::arg("path"));

  py::class_<Material>(m, "Material")
      .def_static("isotropic", &Material::isotropic, py::arg("E"), py::arg("nu"))
      .def_static("orthotropic", &Material::orthotropic, py::arg("E_xx"), py::arg("E_yy"),
                  py::arg("G_xy"), py::arg("nu_xy"))
      .def("reference_modulus", &Material::reference_modulus);

  m.def("elastic_matrix", &elastic_matrix, py::arg("material"));

  py::class_<TsCurve>(m, "TsCurve")
      .def(py::init<std::vector<std::array<double, 2>>>())
      .def_property_readonly("points", &TsCurve::points)
      .def_property_readonly("f_t", &TsCurve::f_t)
      .def_property_readonly("w_last", &TsCurve::w_last)
      .def("complete", &TsCurve::complete)
      .def("sigma_at", &TsCurve::sigma_at, py::arg("w"));

  m.def("triangle_ts", &triangle_ts, py::arg("f_t"), py::arg("w_c"));
  m.def("exponential_ts", &exponential_ts, py::arg("f_t"), py::arg("G_F"),
        py::arg("n_points") = 400);
  m.def("fracture_energy",
        [](const TsCurve& ts) {
          const FractureEnergy e = fracture_energy(ts);
          return py::make_tuple(e.value, e.lower_bound);
        },
        py::arg("ts"));
  m.def("smooth_ts", &smooth_ts, py::arg("ts"), py::arg("half_window"));
  m.def("average_ts", &average_ts, py::arg("curves"));
  m.def("read_ts_csv", &read_ts_csv, py::arg("path"));
  m.def("write_ts_csv", &write_ts_csv, py::arg("ts"), py::arg("path"));

  py::class_<SawtoothLaw>(m, "SawtoothLaw")
      .def_property_readonly("teeth",
                             [](const SawtoothLaw& law) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& t : law.teeth) out.emplace_back(t.k, t.strength);
                               return out;
                             })
      .def("validate", &SawtoothLaw::validate);

  m.def("sawtooth_stiffness_factor", &sawtooth_stiffness_factor, py::arg("ts"),
        py::arg("rho"), py::arg("k0"));
  m.def("sawtooth_stress_band", &sawtooth_stress_band, py::arg("ts"), py::arg("band"),
        py::arg("k0"));
  m.def("sawtooth_stress_decrement", &sawtooth_stress_decrement, py::arg("ts"),
        py::arg("dsigma"), py::arg("k0"));

  py::class_<LoadingCurve>(m, "LoadingCurve")
      .def(py::init<std::vector<std::array<double, 2>>>())
      .def_property_readonly("points", &LoadingCurve::points)
      .def("total_length", &LoadingCurve::total_length);

  m.def("load_curve_csv",
        [](const std::string& path, const std::string& control, const std::string& response,
           double control_scale, double response_scale) {
          CurveColumns cols;
          cols.control = control;
          cols.response = response;
          cols.control_scale = control_scale;
          cols.response_scale = response_scale;
          return load_curve_csv(path, cols);
        },
        py::arg("path"), py::arg("control") = "control", py::arg("response") = "response",
        py::arg("control_scale") = 1.0, py::arg("response_scale") = 1.0);
  m.def("decimate_curve", &decimate_curve, py::arg("curve"), py::arg("n"));

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("u", &SolveResult::u)
      .def_readonly("reactions", &SolveResult::reactions)
      .def_readonly("control", &SolveResult::control)
      .def_readonly("response", &SolveResult::response)
      .def_readonly("residual", &SolveResult::residual);

  m.def("assemble_and_solve",
        [](const Mesh& mesh, const std::vector<Material>& materials,
           const std::vector<double>& k_n, const std::vector<double>& g_t, double lam) {
          return assemble_and_solve(mesh, materials, k_n, g_t, lam);
        },
        py::arg("mesh"), py::arg("materials"), py::arg("k_n"), py::arg("g_t"),
        py::arg("lam") = 1.0);

  py::class_<ForwardResult>(m, "ForwardResult")
      .def_readonly("curve", &ForwardResult::curve)
      .def_readonly("termination", &ForwardResult::termination)
      .def_property_readonly("event_count",
                             [](const ForwardResult& r) { return r.events.size(); });

  m.def("run_forward",
        [](const Mesh& mesh, const std::vector<Material>& materials, const SawtoothLaw& law,
           double g0, int max_events, std::uint64_t seed) {
          ForwardConfig cfg;
          cfg.g0 = g0;
          cfg.max_events = max_events;
          cfg.seed = seed;
          return run_forward(mesh, materials, law, cfg);
        },
        py::arg("mesh"), py::arg("materials"), py::arg("law"), py::arg("g0") = 0.0,
        py::arg("max_events") = 100000, py::arg("seed") = 0);

  py::class_<IdentTrace>(m, "IdentTrace")
      .def_readonly("ts", &IdentTrace::ts)
      .def_readonly("f_t", &IdentTrace::f_t)
      .def_readonly("lead_ip", &IdentTrace::lead_ip)
      .def_readonly("case_a_count", &IdentTrace::case_a_count)
      .def_readonly("solve_count", &IdentTrace::solve_count)
      .def_readonly("max_skip_deviation", &IdentTrace::max_skip_deviation)
      .def_property_readonly("reason",
                             [](const IdentTrace& t) { return to_string(t.reason); })
      .def_property_readonly("event_count",
                             [](const IdentTrace& t) { return t.events.size(); });

  m.def("run_inverse",
        [](const Mesh& mesh, const std::vector<Material>& materials,
           const LoadingCurve& record, double k0, double dsigma_fraction, double dsigma_abs,
           std::uint64_t seed, int max_events, double curve_match_tol) {
          IdentConfig cfg;
          cfg.k0 = k0;
          cfg.dsigma_fraction = dsigma_fraction;
          cfg.dsigma_abs = dsigma_abs;
          cfg.seed = seed;
          cfg.max_events = max_events;
          cfg.curve_match_tol = curve_match_tol;
          return run_inverse(mesh, materials, record, cfg);
        },
        py::arg("mesh"), py::arg("materials"), py::arg("record"), py::arg("k0"),
        py::arg("dsigma_fraction") = 0.01, py::arg("dsigma_abs") = 0.0, py::arg("seed") = 0,
        py::arg("max_events") = 500000, py::arg("curve_match_tol") = 0.02);

  m.def("run_multipass",
        [](const Mesh& mesh, const std::vector<Material>& materials,
           const LoadingCurve& record, double k0, int max_passes, double dsigma_fraction,
           std::uint64_t seed, double curve_match_tol) {
          IdentConfig cfg;
          cfg.k0 = k0;
          cfg.dsigma_fraction = dsigma_fraction;
          cfg.seed = seed;
          cfg.curve_match_tol = curve_match_tol;
          return run_multipass(mesh, materials, record, cfg, max_passes);
        },
        py::arg("mesh"), py::arg("materials"), py::arg("record"), py::arg("k0"),
        py::arg("max_passes"), py::arg("dsigma_fraction") = 0.01, py::arg("seed") = 0,
        py::arg("curve_match_tol") = 0.02);
}
