#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace fastscat {

using Vec3 = Eigen::Vector3d;

/// Triangle surface mesh with derived edge adjacency.
/// Vertices are in meters. Triangles store 0-based vertex indices in
/// counter-clockwise order as seen from outside the surface.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    struct Edge {
        int v0 = -1, v1 = -1;     // v0 < v1
        int tri_a = -1, tri_b = -1; // tri_b = -1 for boundary edges
    };
    std::vector<Edge> edges;

    int interior_edge_count() const;
    bool is_closed() const;

    Vec3 triangle_centroid(int t) const;
    Vec3 triangle_normal(int t) const; // unit, CCW orientation
    double triangle_area(int t) const;

    /// Signed volume by the divergence theorem; positive for outward
    /// oriented closed surfaces.
    double signed_volume() const;

    /// Axis-aligned bounding box.
    void bounding_box(Vec3& lo, Vec3& hi) const;
};

/// Parses the ASCII mesh format:
///   line 1: <vertex_count> <triangle_count>
///   then vertex lines "x y z" and triangle lines "i j k" (0-based).
/// Rejects non-manifold edges and degenerate triangles. Closed meshes
/// with consistently negative orientation are flipped to outward.
TriangleMesh load_mesh(const std::string& path);

void save_mesh(const TriangleMesh& mesh, const std::string& path);

/// Geodesic icosphere of given frequency (class I subdivision): each
/// icosahedron face splits into freq^2 triangles, vertices projected to
/// the sphere. Counts: V = 10 f^2 + 2, F = 20 f^2, E = 30 f^2. The
/// classic "subdivision s" corresponds to freq = 2^s.
TriangleMesh make_icosphere(double radius_m, int freq, const Vec3& center = Vec3::Zero());

/// One Rao-Wilton-Glisson function per interior edge of a closed mesh.
/// The plus triangle traverses the shared edge as (v0, v1) in its CCW
/// order; current flows from the plus triangle into the minus triangle.
struct RwgBasis {
    struct Function {
        int edge = -1;
        int tri_plus = -1, tri_minus = -1;
        int vert_plus = -1, vert_minus = -1; // free vertices
        double edge_length = 0.0;
    };
    std::vector<Function> functions;

    int size() const { return static_cast<int>(functions.size()); }

    /// Value of function k at point r on triangle t (t must be the plus
    /// or minus triangle of k).
    Vec3 value(const TriangleMesh& mesh, int k, int t, const Vec3& r) const;
    /// Surface divergence of function k on triangle t.
    double divergence(const TriangleMesh& mesh, int k, int t) const;
    /// Midpoint of the shared edge.
    Vec3 edge_midpoint(const TriangleMesh& mesh, int k) const;
};

RwgBasis build_rwg(const TriangleMesh& mesh);

/// Single-level uniform box lattice enclosing the mesh. The mother box
/// is the axis-aligned cube of edge a*2^L centered on the bounding-box
/// center, with a*2^(L-1) < D <= a*2^L for object size D.
struct BoxGrid {
    Vec3 origin = Vec3::Zero(); // lower corner of the mother box
    double child_edge = 0.0;    // a
    int level = 1;              // L
    int boxes_per_axis = 2;     // 2^L
    double object_size = 0.0;   // D

    struct Box {
        Eigen::Vector3i coords;      // integer lattice coordinates
        std::vector<int> basis_ids;  // functions whose edge midpoint lies inside
    };
    std::vector<Box> boxes;          // non-empty boxes, ascending linear index
    std::vector<int> basis_to_box;   // basis id -> index into `boxes`

    int linear_index(const Eigen::Vector3i& c) const {
        return (c.z() * boxes_per_axis + c.y()) * boxes_per_axis + c.x();
    }
    Vec3 box_center(int b) const {
        return origin + child_edge * (boxes[b].coords.cast<double>() + Vec3::Constant(0.5));
    }
    int box_count() const { return static_cast<int>(boxes.size()); }
};

BoxGrid partition(const TriangleMesh& mesh, const RwgBasis& basis, double child_edge);

} // namespace fastscat
