#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "fastscat/geometry.hpp"

using namespace fastscat;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

TriangleMesh tetrahedron() {
    TriangleMesh mesh;
    mesh.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    mesh.triangles = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    const std::string path = write_temp("fastscat_tet.txt", [&] {
        std::ostringstream os;
        os << "4 4\n";
        for (const auto& v : mesh.vertices) os << v.x() << " " << v.y() << " " << v.z() << "\n";
        for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
        return os.str();
    }());
    return load_mesh(path);
}

} // namespace

TEST_CASE("single triangle file") {
    const std::string path =
        write_temp("fastscat_tri.txt", "3 1\n0 0 0\n1 0 0\n0 1 0\n0 1 2\n");
    const TriangleMesh mesh = load_mesh(path);
    CHECK(mesh.vertices.size() == 3);
    CHECK(mesh.triangles.size() == 1);
    CHECK(mesh.interior_edge_count() == 0);
    CHECK_FALSE(mesh.is_closed());
}

TEST_CASE("two triangles sharing an edge give one RWG candidate") {
    const std::string path = write_temp(
        "fastscat_two.txt", "4 2\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 1 2\n1 3 2\n");
    const TriangleMesh mesh = load_mesh(path);
    CHECK(mesh.interior_edge_count() == 1);
    CHECK_THROWS(build_rwg(mesh)); // open mesh is out of EFIE scope
}

TEST_CASE("degenerate and non-manifold inputs are rejected") {
    CHECK_THROWS_WITH_AS(
        load_mesh(write_temp("fastscat_deg.txt", "3 1\n0 0 0\n1 0 0\n2 0 0\n0 1 2\n")),
        doctest::Contains("zero-area"), std::runtime_error);
    // Same edge (0,1) in three triangles.
    CHECK_THROWS_WITH_AS(
        load_mesh(write_temp("fastscat_nm.txt",
                             "5 3\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 -1 0\n0 1 2\n1 0 3\n0 1 4\n")),
        doctest::Contains("non-manifold"), std::runtime_error);
}

TEST_CASE("icosphere at subdivision 3 (freq 8) matches Euler counts") {
    const TriangleMesh mesh = make_icosphere(1.0, 8);
    CHECK(mesh.vertices.size() == 642);
    CHECK(mesh.triangles.size() == 1280);
    CHECK(mesh.interior_edge_count() == 1920);
    CHECK(mesh.is_closed());
    // V - E + F = 2
    CHECK(static_cast<int>(mesh.vertices.size()) - mesh.interior_edge_count() +
              static_cast<int>(mesh.triangles.size()) ==
          2);
    CHECK(mesh.signed_volume() > 0.0);
    for (const auto& v : mesh.vertices) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("icosphere frequency 10 for the desk mesh size") {
    const TriangleMesh mesh = make_icosphere(0.5, 10);
    CHECK(mesh.interior_edge_count() == 3000);
    const RwgBasis basis = build_rwg(mesh);
    CHECK(basis.size() == 3000);
}

TEST_CASE("closed tetrahedron surface yields 6 RWG functions") {
    const TriangleMesh mesh = tetrahedron();
    CHECK(mesh.is_closed());
    const RwgBasis basis = build_rwg(mesh);
    CHECK(basis.size() == 6);
    for (const auto& f : basis.functions) {
        CHECK(f.tri_plus != f.tri_minus);
        CHECK(f.edge_length > 0.0);
    }
}

TEST_CASE("RWG normal continuity across the shared edge") {
    const TriangleMesh mesh = make_icosphere(1.0, 2);
    const RwgBasis basis = build_rwg(mesh);
    for (int k = 0; k < basis.size(); k += 7) {
        const auto& f = basis.functions[k];
        const Vec3 mid = basis.edge_midpoint(mesh, k);
        const Vec3 vp = basis.value(mesh, k, f.tri_plus, mid);
        const Vec3 vm = basis.value(mesh, k, f.tri_minus, mid);
        const auto& e = mesh.edges[f.edge];
        const Vec3 edge_dir = (mesh.vertices[e.v1] - mesh.vertices[e.v0]).normalized();
        // Component across the edge (perpendicular to it, in-plane) matches.
        const Vec3 np = mesh.triangle_normal(f.tri_plus);
        const Vec3 cross_p = edge_dir.cross(np);
        const Vec3 nm = mesh.triangle_normal(f.tri_minus);
        const Vec3 cross_m = edge_dir.cross(nm);
        CHECK(vp.dot(cross_p) == doctest::Approx(vm.dot(cross_m)).epsilon(1e-9));
    }
}

TEST_CASE("partition levels follow the size inequality") {
    // D = 2 lambda object with a = lambda/8 -> L = 4.
    const double lambda = 0.3;
    TriangleMesh mesh = make_icosphere(lambda, 4); // diameter 2 lambda
    RwgBasis basis = build_rwg(mesh);
    BoxGrid grid = partition(mesh, basis, lambda / 8.0);
    CHECK(grid.level == 4);

    // D = lambda/64 object with a = lambda/256 -> L = 2.
    mesh = make_icosphere(lambda / 128.0, 4);
    basis = build_rwg(mesh);
    grid = partition(mesh, basis, lambda / 256.0);
    CHECK(grid.level == 2);

    // a >= D degenerates to L = 1.
    grid = partition(mesh, basis, lambda);
    CHECK(grid.level == 1);
}

TEST_CASE("partition is a partition and lattice vectors are exact") {
    const TriangleMesh mesh = make_icosphere(0.5, 6);
    const RwgBasis basis = build_rwg(mesh);
    const BoxGrid grid = partition(mesh, basis, 0.125);

    int total = 0;
    for (const auto& box : grid.boxes) total += static_cast<int>(box.basis_ids.size());
    CHECK(total == basis.size());
    for (int k = 0; k < basis.size(); ++k) CHECK(grid.basis_to_box[k] >= 0);

    // Box centers differ by integer multiples of a.
    for (int b = 1; b < grid.box_count(); b += 17) {
        const Vec3 d = (grid.box_center(b) - grid.box_center(0)) / grid.child_edge;
        for (int ax = 0; ax < 3; ++ax)
            CHECK(std::abs(d[ax] - std::round(d[ax])) < 1e-12 * (1.0 + std::abs(d[ax])));
    }

    // Non-empty list ascending by linear index.
    for (int b = 1; b < grid.box_count(); ++b)
        CHECK(grid.linear_index(grid.boxes[b].coords) >
              grid.linear_index(grid.boxes[b - 1].coords));
}

TEST_CASE("point-symmetric mesh gives mirror-symmetric occupancy") {
    // A rotated icosphere keeps central symmetry but avoids edge
    // midpoints on box boundary planes.
    TriangleMesh mesh = make_icosphere(0.5, 5);
    const double ang = 0.37;
    Eigen::Matrix3d rot;
    rot = Eigen::AngleAxisd(ang, Vec3(0.2, 0.5, 0.84).normalized());
    for (auto& v : mesh.vertices) v = rot * v;
    const RwgBasis basis = build_rwg(mesh);
    const BoxGrid grid = partition(mesh, basis, 0.13);

    std::map<std::array<int, 3>, int> counts;
    for (const auto& box : grid.boxes)
        counts[{box.coords.x(), box.coords.y(), box.coords.z()}] =
            static_cast<int>(box.basis_ids.size());
    const int m = grid.boxes_per_axis - 1;
    for (const auto& [c, n] : counts) {
        const std::array<int, 3> mirrored = {m - c[0], m - c[1], m - c[2]};
        REQUIRE(counts.count(mirrored) == 1);
        CHECK(counts.at(mirrored) == n);
    }
}

TEST_CASE("re-partitioning is deterministic") {
    const TriangleMesh mesh = make_icosphere(0.5, 5);
    const RwgBasis basis = build_rwg(mesh);
    const BoxGrid g1 = partition(mesh, basis, 0.125);
    const BoxGrid g2 = partition(mesh, basis, 0.125);
    REQUIRE(g1.box_count() == g2.box_count());
    for (int b = 0; b < g1.box_count(); ++b) {
        CHECK(g1.boxes[b].coords == g2.boxes[b].coords);
        CHECK(g1.boxes[b].basis_ids == g2.boxes[b].basis_ids);
    }
}

TEST_CASE("mesh save/load round trip") {
    const TriangleMesh mesh = make_icosphere(0.25, 3);
    const std::string path =
        (std::filesystem::temp_directory_path() / "fastscat_rt.txt").string();
    save_mesh(mesh, path);
    const TriangleMesh back = load_mesh(path);
    REQUIRE(back.vertices.size() == mesh.vertices.size());
    REQUIRE(back.triangles.size() == mesh.triangles.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
        CHECK((back.vertices[i] - mesh.vertices[i]).norm() == doctest::Approx(0.0));
}
