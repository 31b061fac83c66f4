#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fastscat/cvfcnn.hpp"
#include "fastscat/report.hpp"
#include "fastscat/solver.hpp"

namespace py = pybind11;
using namespace fastscat;

namespace {

Eigen::MatrixXd points_matrix(const std::vector<Vec3>& pts) {
    Eigen::MatrixXd out(pts.size(), 3);
    for (size_t i = 0; i < pts.size(); ++i) out.row(i) = pts[i].transpose();
    return out;
}

py::dict pattern_dict(const FarFieldPattern& p) {
    py::dict d;
    d["angles_deg"] = p.angles_deg;
    Eigen::VectorXcd values(p.values.size());
    for (size_t i = 0; i < p.values.size(); ++i) values[i] = p.values[i];
    d["values"] = values;
    return d;
}

FarFieldPattern pattern_from(const std::vector<double>& angles, const Eigen::VectorXcd& values) {
    FarFieldPattern p;
    p.angles_deg = angles;
    p.values.assign(values.data(), values.data() + values.size());
    return p;
}

std::string flatten(const std::string& key) {
    std::string out = key;
    for (auto& c : out)
        if (c == '.') c = '_';
    return out;
}

RunConfig config_from_kwargs(const py::kwargs& kwargs) {
    std::vector<std::string> overrides;
    for (auto item : kwargs) {
        const std::string name = py::cast<std::string>(item.first);
        std::string key;
        for (const std::string& k : RunConfig::known_keys())
            if (flatten(k) == name) {
                key = k;
                break;
            }
        if (key.empty())
            throw std::invalid_argument("solve: unknown config keyword '" + name + "'");
        overrides.push_back(key + "=" + py::cast<std::string>(py::str(item.second)));
    }
    return RunConfig::from_overrides(overrides);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Surface-integral-equation scattering solver with group-by-group "
              "far-zone interactions (dipole mapping, translation, inverse mapping).";
    m.attr("__version__") = kVersion;

    py::class_<TriangleMesh>(m, "TriangleMesh")
        .def_property_readonly("num_vertices",
                               [](const TriangleMesh& msh) { return msh.vertices.size(); })
        .def_property_readonly("num_triangles",
                               [](const TriangleMesh& msh) { return msh.triangles.size(); })
        .def_property_readonly("num_interior_edges",
                               [](const TriangleMesh& msh) { return msh.interior_edge_count(); })
        .def("is_closed", &TriangleMesh::is_closed)
        .def("signed_volume", &TriangleMesh::signed_volume)
        .def("save", [](const TriangleMesh& msh, const std::string& path) { save_mesh(msh, path); },
             py::arg("path"));

    py::class_<Medium>(m, "Medium")
        .def_static("free_space", &Medium::free_space, py::arg("frequency_hz"))
        .def_readonly("frequency", &Medium::frequency)
        .def_readonly("wavenumber", &Medium::wavenumber)
        .def_readonly("impedance", &Medium::impedance)
        .def_readonly("wavelength", &Medium::wavelength);

    m.def("icosphere", &make_icosphere, py::arg("radius_m"), py::arg("freq"),
          py::arg("center") = Vec3(0, 0, 0),
          "Geodesic icosphere; the classic subdivision s corresponds to freq = 2**s.");
    m.def("load_mesh", &load_mesh, py::arg("path"));
    m.def("rwg_count",
          [](const TriangleMesh& mesh) { return build_rwg(mesh).size(); }, py::arg("mesh"));
    m.def("select_dipole_count", &select_dipole_count, py::arg("ka"), py::arg("digits"));
    m.def(
        "fibonacci_lattice",
        [](int count, double radius) {
            return points_matrix(fibonacci_lattice(count, radius).points);
        },
        py::arg("count"), py::arg("radius"));
    m.def(
        "dyadic_green",
        [](const Vec3& r, const Vec3& rp, double frequency_hz) {
            return CMat3(dyadic_green(r, rp, Medium::free_space(frequency_hz)));
        },
        py::arg("r"), py::arg("r_src"), py::arg("frequency_hz"));
    m.def(
        "mie_far_field",
        [](double radius_m, double frequency_hz, const std::vector<double>& angles) {
            return pattern_dict(
                mie_far_field(radius_m, Medium::free_space(frequency_hz), angles));
        },
        py::arg("radius_m"), py::arg("frequency_hz"), py::arg("angles_deg"));
    m.def(
        "pattern_rel_error",
        [](const std::vector<double>& angles, const Eigen::VectorXcd& test,
           const Eigen::VectorXcd& reference) {
            return pattern_rel_error(pattern_from(angles, test),
                                     pattern_from(angles, reference));
        },
        py::arg("angles_deg"), py::arg("test"), py::arg("reference"));

    m.def(
        "dense_solve",
        [](const TriangleMesh& mesh, double frequency_hz, double angle_step_deg) {
            const Medium med = Medium::free_space(frequency_hz);
            const RwgBasis basis = build_rwg(mesh);
            const Eigen::VectorXcd v =
                plane_wave_excitation(mesh, basis, Vec3(0, 0, 1), Vec3(1, 0, 0), med);
            const DenseSolution sol =
                dense_solve(mesh, basis, med, v, default_eplane_grid(angle_step_deg));
            py::dict d = pattern_dict(sol.pattern);
            d["coefficients"] = sol.coefficients;
            return d;
        },
        py::arg("mesh"), py::arg("frequency_hz"), py::arg("angle_step_deg") = 1.0,
        "Classical dense MoM solve under an x-polarized +z plane wave.");

    m.def(
        "solve",
        [](const py::kwargs& kwargs) {
            RunConfig cfg = config_from_kwargs(kwargs);
            if (cfg.backend == "ml")
                throw std::invalid_argument(
                    "solve: the ml backend needs model files; use the CLI for ml runs");
            const TriangleMesh mesh = cfg.make_mesh();
            const Medium med = cfg.medium();
            Pipeline pipe(mesh, med, cfg.pipeline_options());
            SolveOptions sopt;
            sopt.gmres = cfg.gmres_options();
            sopt.angles_deg = default_eplane_grid(cfg.pattern_step_deg);
            sopt.direction = Vec3(cfg.direction[0], cfg.direction[1], cfg.direction[2]);
            sopt.polarization =
                Vec3(cfg.polarization[0], cfg.polarization[1], cfg.polarization[2]);
            const SolveResult res = solve_scattering(pipe, sopt);
            py::dict d = pattern_dict(res.pattern);
            d["iterations"] = res.gmres.iterations;
            d["converged"] = res.gmres.converged;
            d["coefficients"] = res.coefficients;
            d["residual_history"] = res.gmres.residual_history;
            return d;
        },
        "Run the scattering solver. Keyword names mirror the config keys with "
        "'.' replaced by '_' (e.g. mesh_sphere_radius_m=0.15, solver_backend='dgfa').");
}
