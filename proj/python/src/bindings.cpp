#include "meshwave/corresp.hpp"
#include "meshwave/curvature.hpp"
#include "meshwave/error.hpp"
#include "meshwave/mesh.hpp"
#include "meshwave/operators.hpp"
#include "meshwave/spectrum.hpp"
#include "meshwave/synth.hpp"
#include "meshwave/wavelets.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace meshwave;

namespace {

std::vector<std::string> error_names() {
  std::vector<std::string> out;
  for (int c = 0; c <= static_cast<int>(ErrorCode::IoError); ++c) out.emplace_back(to_string(static_cast<ErrorCode>(c)));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Anisotropic spectral wavelets on triangle meshes";

  py::exception<Error>(m, "MeshwaveError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object cls = py::module_::import("meshwave._core").attr("MeshwaveError");
      const py::object instance = cls(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(cls.ptr(), instance.ptr());
    }
  });
  m.attr("error_codes") = error_names();

  py::class_<TriMesh>(m, "TriMesh")
      .def(py::init<Points, Faces>(), py::arg("vertices"), py::arg("faces"))
      .def_property_readonly("vertices", &TriMesh::vertices)
      .def_property_readonly("faces", &TriMesh::faces)
      .def_property_readonly("mass", &TriMesh::mass)
      .def_property_readonly("face_areas", &TriMesh::face_areas)
      .def_property_readonly("vertex_normals", &TriMesh::vertex_normals)
      .def_property_readonly("vertex_count", &TriMesh::vertex_count)
      .def_property_readonly("face_count", &TriMesh::face_count)
      .def_property_readonly("edge_count", &TriMesh::edge_count)
      .def_property_readonly("total_area", &TriMesh::total_area)
      .def_property_readonly("is_closed", &TriMesh::is_closed)
      .def_property_readonly("hash", &TriMesh::hash)
      .def("with_vertices", &TriMesh::with_vertices)
      .def("__repr__", [](const TriMesh& t) {
        return "<TriMesh " + std::to_string(t.vertex_count()) + " vertices, " + std::to_string(t.face_count()) + " faces>";
      });

  m.def("load_mesh", py::overload_cast<const std::filesystem::path&>(&load_mesh), py::arg("path"));
  m.def("save_mesh", &save_mesh, py::arg("mesh"), py::arg("path"));
  m.def("parse_off", &parse_off);
  m.def("parse_obj", &parse_obj);
  m.def("to_off", &to_off);
  m.def("to_obj", &to_obj);

  py::class_<PrincipalFrames>(m, "PrincipalFrames")
      .def_readonly("k_min", &PrincipalFrames::k_min)
      .def_readonly("k_max", &PrincipalFrames::k_max)
      .def_readonly("dir_max", &PrincipalFrames::dir_max)
      .def_readonly("normal", &PrincipalFrames::normal)
      .def_readonly("umbilic", &PrincipalFrames::umbilic);
  m.def(
      "estimate_frames", [](const TriMesh& mesh, double radius) { return estimate_frames(mesh, {radius}); },
      py::arg("mesh"), py::arg("radius") = 0.0);

  py::class_<AnisoConfig>(m, "AnisoConfig")
      .def(py::init(&AnisoConfig::direction), py::arg("alpha"), py::arg("m") = 0, py::arg("count") = 1)
      .def_readonly("alpha", &AnisoConfig::alpha)
      .def_readonly("theta", &AnisoConfig::theta)
      .def_readonly("direction_index", &AnisoConfig::direction_index)
      .def_readonly("direction_count", &AnisoConfig::direction_count);
  py::class_<OperatorPair>(m, "OperatorPair")
      .def_readonly("stiffness", &OperatorPair::stiffness)
      .def_readonly("mass", &OperatorPair::mass)
      .def_readonly("config", &OperatorPair::config);
  m.def("anisotropy_tensor", &anisotropy_tensor, py::arg("alpha"), py::arg("theta"));
  m.def("assemble_lbo", &assemble_lbo, py::arg("mesh"));
  m.def("assemble_albo", &assemble_albo, py::arg("mesh"), py::arg("frames"), py::arg("config"));

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("eigenvalues", &Spectrum::eigenvalues)
      .def_readonly("eigenvectors", &Spectrum::eigenvectors)
      .def_readonly("mass", &Spectrum::mass)
      .def_readonly("config", &Spectrum::config)
      .def_property_readonly("k", &Spectrum::k);
  m.def(
      "solve_eigs", [](const OperatorPair& ops, int k) { return solve_eigs(ops, k); }, py::arg("ops"), py::arg("k"));
  m.def("eigen_residuals", &eigen_residuals);

  m.def("kernel_g", &kernel_g);
  m.def("kernel_h", &kernel_h, py::arg("x"), py::arg("cutoff"));
  m.def("select_scales", &select_scales, py::arg("lambda_max"), py::arg("count"));
  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init([](std::vector<double> scales, double cutoff, bool tighten) {
             return KernelSpec{std::move(scales), cutoff, tighten};
           }),
           py::arg("scales"), py::arg("cutoff"), py::arg("tighten") = false)
      .def_static("for_spectra", &KernelSpec::for_spectra, py::arg("spectra"), py::arg("scale_count"), py::arg("tighten") = false)
      .def_readonly("scales", &KernelSpec::scales)
      .def_readonly("cutoff", &KernelSpec::cutoff)
      .def_readonly("tighten", &KernelSpec::tighten);
  py::class_<FilterBank>(m, "FilterBank")
      .def_property_readonly("direction_count", &FilterBank::direction_count)
      .def_property_readonly("scale_count", &FilterBank::scale_count)
      .def_property_readonly("vertex_count", &FilterBank::vertex_count)
      .def_property_readonly("k", &FilterBank::k)
      .def_property_readonly("kernel", &FilterBank::kernel)
      .def_property_readonly("mass", &FilterBank::mass);
  m.def("build_filterbank", &build_filterbank, py::arg("spectra"), py::arg("kernel"));
  m.def("apply_filter", &apply_filter, py::arg("bank"), py::arg("direction"), py::arg("scale"), py::arg("x"),
        py::arg("normalized") = true);
  m.def("wavelet_at", &wavelet_at, py::arg("bank"), py::arg("direction"), py::arg("scale"), py::arg("vertex"));
  m.def("frame_function", &frame_function, py::arg("bank"), py::arg("direction"));
  py::class_<WaveletCoefficients>(m, "WaveletCoefficients")
      .def_readonly("wavelet", &WaveletCoefficients::wavelet)
      .def_readonly("scaling", &WaveletCoefficients::scaling)
      .def_readonly("projections", &WaveletCoefficients::projections);
  m.def("analyze", &analyze, py::arg("bank"), py::arg("f"));
  m.def("synthesize", &synthesize, py::arg("bank"), py::arg("coefficients"), py::arg("direction"));

  m.def("match_nn", &match_nn, py::arg("source"), py::arg("target"));
  m.def("geodesic_from", &geodesic_from, py::arg("mesh"), py::arg("source"));
  py::class_<CorrespondenceResult>(m, "CorrespondenceResult")
      .def_readonly("map", &CorrespondenceResult::map)
      .def_readonly("errors", &CorrespondenceResult::errors)
      .def_readonly("average_error", &CorrespondenceResult::average_error)
      .def_property_readonly("cge", [](const CorrespondenceResult& r) {
        std::vector<std::pair<double, double>> out;
        for (const CgePoint& p : r.cge) out.emplace_back(p.radius, p.fraction);
        return out;
      });
  m.def(
      "evaluate",
      [](const std::vector<int>& map, const std::vector<int>& truth, const TriMesh& target, std::vector<double> radii) {
        if (radii.empty()) radii = default_radii();
        return evaluate(map, truth, target, radii);
      },
      py::arg("map"), py::arg("ground_truth"), py::arg("target"), py::arg("radii") = std::vector<double>{});

  m.def(
      "gen_base",
      [](const std::string& kind, int resolution, bool caps) { return gen_base({parse_base_kind(kind), resolution, caps}); },
      py::arg("kind"), py::arg("resolution"), py::arg("caps") = false);
  m.def(
      "deform",
      [](const TriMesh& mesh, const std::string& mode, double magnitude) {
        return deform(mesh, parse_deform_mode(mode), magnitude);
      },
      py::arg("mesh"), py::arg("mode"), py::arg("magnitude"));
  m.def("isometry_distortion", &isometry_distortion);
  m.def(
      "remesh",
      [](const TriMesh& mesh) {
        Remeshed r = remesh(mesh);
        return py::make_tuple(std::move(r.mesh), std::move(r.to_original));
      },
      py::arg("mesh"));
}
