#include "fastscat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fastscat {

namespace {

void build_edges(TriangleMesh& mesh) {
    std::map<std::pair<int, int>, int> edge_index;
    mesh.edges.clear();
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            auto key = std::minmax(a, b);
            auto it = edge_index.find(key);
            if (it == edge_index.end()) {
                TriangleMesh::Edge edge;
                edge.v0 = key.first;
                edge.v1 = key.second;
                edge.tri_a = t;
                edge_index.emplace(key, static_cast<int>(mesh.edges.size()));
                mesh.edges.push_back(edge);
            } else {
                TriangleMesh::Edge& edge = mesh.edges[it->second];
                if (edge.tri_b != -1)
                    throw std::runtime_error("load_mesh: non-manifold edge (" +
                                             std::to_string(key.first) + "," +
                                             std::to_string(key.second) +
                                             ") shared by more than 2 triangles");
                edge.tri_b = t;
            }
        }
    }
}

// Triangle t traverses edge (a -> b) in its CCW vertex order?
bool traverses_forward(const std::array<int, 3>& tri, int a, int b) {
    for (int e = 0; e < 3; ++e)
        if (tri[e] == a && tri[(e + 1) % 3] == b) return true;
    return false;
}

int opposite_vertex(const std::array<int, 3>& tri, int a, int b) {
    for (int v : tri)
        if (v != a && v != b) return v;
    return -1;
}

} // namespace

int TriangleMesh::interior_edge_count() const {
    int n = 0;
    for (const auto& e : edges)
        if (e.tri_b != -1) ++n;
    return n;
}

bool TriangleMesh::is_closed() const {
    for (const auto& e : edges)
        if (e.tri_b == -1) return false;
    return !edges.empty();
}

Vec3 TriangleMesh::triangle_centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

Vec3 TriangleMesh::triangle_normal(int t) const {
    const auto& tri = triangles[t];
    Vec3 n = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
    return n.normalized();
}

double TriangleMesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    return 0.5 * (vertices[tri[1]] - vertices[tri[0]])
                     .cross(vertices[tri[2]] - vertices[tri[0]])
                     .norm();
}

double TriangleMesh::signed_volume() const {
    double v = 0.0;
    for (const auto& tri : triangles)
        v += vertices[tri[0]].dot(vertices[tri[1]].cross(vertices[tri[2]])) / 6.0;
    return v;
}

void TriangleMesh::bounding_box(Vec3& lo, Vec3& hi) const {
    lo = Vec3::Constant(std::numeric_limits<double>::max());
    hi = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (const auto& v : vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
}

TriangleMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_mesh: cannot open " + path);

    TriangleMesh mesh;
    int nv = -1, nt = -1;
    std::string line;
    auto next_data_line = [&](std::string& out) -> bool {
        while (std::getline(in, out)) {
            auto pos = out.find('#');
            if (pos != std::string::npos) out.erase(pos);
            std::istringstream probe(out);
            std::string tok;
            if (probe >> tok) return true;
        }
        return false;
    };

    if (!next_data_line(line)) throw std::runtime_error("load_mesh: empty file " + path);
    {
        std::istringstream ss(line);
        if (!(ss >> nv >> nt) || nv < 3 || nt < 1)
            throw std::runtime_error("load_mesh: bad header in " + path);
    }
    mesh.vertices.reserve(nv);
    for (int i = 0; i < nv; ++i) {
        if (!next_data_line(line))
            throw std::runtime_error("load_mesh: truncated vertex list in " + path);
        std::istringstream ss(line);
        Vec3 v;
        if (!(ss >> v.x() >> v.y() >> v.z()))
            throw std::runtime_error("load_mesh: bad vertex line " + std::to_string(i));
        mesh.vertices.push_back(v);
    }
    mesh.triangles.reserve(nt);
    for (int i = 0; i < nt; ++i) {
        if (!next_data_line(line))
            throw std::runtime_error("load_mesh: truncated triangle list in " + path);
        std::istringstream ss(line);
        std::array<int, 3> tri;
        if (!(ss >> tri[0] >> tri[1] >> tri[2]))
            throw std::runtime_error("load_mesh: bad triangle line " + std::to_string(i));
        for (int v : tri)
            if (v < 0 || v >= nv)
                throw std::runtime_error("load_mesh: vertex index out of range in triangle " +
                                         std::to_string(i));
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw std::runtime_error("load_mesh: degenerate triangle " + std::to_string(i));
        mesh.triangles.push_back(tri);
    }

    for (int t = 0; t < nt; ++t) {
        if (mesh.triangle_area(t) <= 0.0)
            throw std::runtime_error("load_mesh: zero-area triangle " + std::to_string(t));
    }

    build_edges(mesh);

    // Interior edges must be traversed in opposite directions by their
    // two triangles, otherwise the orientation is inconsistent.
    for (const auto& e : mesh.edges) {
        if (e.tri_b == -1) continue;
        bool fa = traverses_forward(mesh.triangles[e.tri_a], e.v0, e.v1);
        bool fb = traverses_forward(mesh.triangles[e.tri_b], e.v0, e.v1);
        if (fa == fb)
            throw std::runtime_error("load_mesh: inconsistent triangle orientation at edge (" +
                                     std::to_string(e.v0) + "," + std::to_string(e.v1) + ")");
    }

    if (mesh.is_closed() && mesh.signed_volume() < 0.0) {
        for (auto& tri : mesh.triangles) std::swap(tri[1], tri[2]);
        build_edges(mesh);
    }
    return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
    out.precision(17);
    out << mesh.vertices.size() << " " << mesh.triangles.size() << "\n";
    for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << " " << v.z() << "\n";
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

TriangleMesh make_icosphere(double radius_m, int freq, const Vec3& center) {
    if (radius_m <= 0.0) throw std::invalid_argument("make_icosphere: radius must be > 0");
    if (freq < 1) throw std::invalid_argument("make_icosphere: freq must be >= 1");

    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Vec3> base = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : base) v.normalize();

    // CCW outward faces of the unit icosahedron.
    const int faces[20][3] = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    TriangleMesh mesh;
    // Vertices are deduplicated via exact barycentric keys on the base
    // icosahedron: (face corner ids sorted) x (integer weights).
    std::map<std::array<long long, 6>, int> seen;
    auto get_vertex = [&](int a, int b, int c, int wa, int wb, int wc) -> int {
        std::array<std::pair<int, int>, 3> parts = {{{a, wa}, {b, wb}, {c, wc}}};
        std::sort(parts.begin(), parts.end());
        // Drop zero-weight corners so shared edges/corners match across faces.
        std::array<long long, 6> key = {-1, 0, -1, 0, -1, 0};
        int slot = 0;
        for (const auto& [vid, w] : parts) {
            if (w == 0) continue;
            key[2 * slot] = vid;
            key[2 * slot + 1] = w;
            ++slot;
        }
        auto it = seen.find(key);
        if (it != seen.end()) return it->second;
        Vec3 p = (wa * base[a] + wb * base[b] + wc * base[c]).normalized();
        int id = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(center + radius_m * p);
        seen.emplace(key, id);
        return id;
    };

    for (const auto& f : faces) {
        // Lattice rows i = 0..freq from corner f[0] toward edge (f[1], f[2]).
        for (int i = 0; i < freq; ++i) {
            for (int j = 0; j < freq - i; ++j) {
                int v00 = get_vertex(f[0], f[1], f[2], freq - i - j, j, i);
                int v10 = get_vertex(f[0], f[1], f[2], freq - i - j - 1, j + 1, i);
                int v01 = get_vertex(f[0], f[1], f[2], freq - i - j - 1, j, i + 1);
                mesh.triangles.push_back({v00, v10, v01});
                if (j + 1 < freq - i) {
                    int v11 = get_vertex(f[0], f[1], f[2], freq - i - j - 2, j + 1, i + 1);
                    mesh.triangles.push_back({v10, v11, v01});
                }
            }
        }
    }

    build_edges(mesh);
    if (mesh.signed_volume() < 0.0) {
        for (auto& tri : mesh.triangles) std::swap(tri[1], tri[2]);
        build_edges(mesh);
    }
    return mesh;
}

Vec3 RwgBasis::value(const TriangleMesh& mesh, int k, int t, const Vec3& r) const {
    const Function& f = functions[k];
    if (t == f.tri_plus) {
        double area = mesh.triangle_area(t);
        return (f.edge_length / (2.0 * area)) * (r - mesh.vertices[f.vert_plus]);
    }
    if (t == f.tri_minus) {
        double area = mesh.triangle_area(t);
        return (f.edge_length / (2.0 * area)) * (mesh.vertices[f.vert_minus] - r);
    }
    return Vec3::Zero();
}

double RwgBasis::divergence(const TriangleMesh& mesh, int k, int t) const {
    const Function& f = functions[k];
    if (t == f.tri_plus) return f.edge_length / mesh.triangle_area(t);
    if (t == f.tri_minus) return -f.edge_length / mesh.triangle_area(t);
    return 0.0;
}

Vec3 RwgBasis::edge_midpoint(const TriangleMesh& mesh, int k) const {
    const auto& e = mesh.edges[functions[k].edge];
    return 0.5 * (mesh.vertices[e.v0] + mesh.vertices[e.v1]);
}

RwgBasis build_rwg(const TriangleMesh& mesh) {
    if (!mesh.is_closed())
        throw std::runtime_error("build_rwg: mesh has open edges; closed PEC surface required");

    RwgBasis basis;
    basis.functions.reserve(mesh.edges.size());
    for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
        const auto& edge = mesh.edges[e];
        RwgBasis::Function f;
        f.edge = e;
        f.edge_length = (mesh.vertices[edge.v1] - mesh.vertices[edge.v0]).norm();
        if (f.edge_length <= 0.0)
            throw std::runtime_error("build_rwg: zero-length edge " + std::to_string(e));
        // Plus triangle traverses (v0 -> v1) forward.
        if (traverses_forward(mesh.triangles[edge.tri_a], edge.v0, edge.v1)) {
            f.tri_plus = edge.tri_a;
            f.tri_minus = edge.tri_b;
        } else {
            f.tri_plus = edge.tri_b;
            f.tri_minus = edge.tri_a;
        }
        f.vert_plus = opposite_vertex(mesh.triangles[f.tri_plus], edge.v0, edge.v1);
        f.vert_minus = opposite_vertex(mesh.triangles[f.tri_minus], edge.v0, edge.v1);
        basis.functions.push_back(f);
    }
    return basis;
}

BoxGrid partition(const TriangleMesh& mesh, const RwgBasis& basis, double child_edge) {
    if (child_edge <= 0.0) throw std::invalid_argument("partition: box edge must be > 0");

    Vec3 lo, hi;
    mesh.bounding_box(lo, hi);
    const double object_size = (hi - lo).maxCoeff();

    // Smallest L >= 1 with D <= a 2^L; ratios within 1e-9 of a power of
    // two snap to it so lattice-aligned setups stay at the intended level.
    double ratio = object_size / child_edge;
    int level = 1;
    while (std::ldexp(1.0, level) * (1.0 + 1e-9) < ratio) ++level;

    BoxGrid grid;
    grid.child_edge = child_edge;
    grid.level = level;
    grid.boxes_per_axis = 1 << level;
    grid.object_size = object_size;
    const double mother_edge = child_edge * grid.boxes_per_axis;
    const Vec3 bbox_center = 0.5 * (lo + hi);
    grid.origin = bbox_center - Vec3::Constant(0.5 * mother_edge);

    const int n = basis.size();
    std::map<int, std::vector<int>> occupied; // linear index -> basis ids (sorted keys)
    std::vector<Eigen::Vector3i> coords_of(n);
    for (int k = 0; k < n; ++k) {
        Vec3 p = basis.edge_midpoint(mesh, k);
        Eigen::Vector3i c;
        for (int ax = 0; ax < 3; ++ax) {
            int idx = static_cast<int>(std::floor((p[ax] - grid.origin[ax]) / child_edge));
            c[ax] = std::clamp(idx, 0, grid.boxes_per_axis - 1);
        }
        coords_of[k] = c;
        occupied[grid.linear_index(c)].push_back(k);
    }

    grid.basis_to_box.assign(n, -1);
    grid.boxes.reserve(occupied.size());
    for (auto& [lin, ids] : occupied) {
        BoxGrid::Box box;
        int rem = lin;
        box.coords.x() = rem % grid.boxes_per_axis;
        rem /= grid.boxes_per_axis;
        box.coords.y() = rem % grid.boxes_per_axis;
        box.coords.z() = rem / grid.boxes_per_axis;
        std::sort(ids.begin(), ids.end());
        box.basis_ids = std::move(ids);
        for (int k : box.basis_ids) grid.basis_to_box[k] = static_cast<int>(grid.boxes.size());
        grid.boxes.push_back(std::move(box));
    }
    return grid;
}

} // namespace fastscat
