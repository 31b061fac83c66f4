#include "fastscat/near.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace fastscat {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr cd kJ{0.0, 1.0};

// (exp(-jkR) - 1) / (4 pi R): smooth remainder after static extraction.
cd smooth_remainder(double R, double k) {
    const double kR = k * R;
    if (kR < 1e-6) {
        // exp(-jx) - 1 = -jx - x^2/2 + j x^3/6 + ...
        return (cd(-0.5 * kR, -1.0) * k + cd(0.0, kR * kR / 6.0) * k) / (4.0 * kPi);
    }
    return (std::exp(-kJ * kR) - 1.0) / (4.0 * kPi * R);
}

struct TriFn {
    int fn = -1;
    int col = -1;        // position in the block
    double lever = 0.0;  // sign * edge_length / (2 area)
    double div = 0.0;    // sign * edge_length / area
    Vec3 free_vertex;
};

bool share_vertex(const std::array<int, 3>& a, const std::array<int, 3>& b) {
    for (int va : a)
        for (int vb : b)
            if (va == vb) return true;
    return false;
}

} // namespace

void static_potential_integrals(const TriangleMesh& mesh, int tri, const Vec3& p, double& i0,
                                Vec3& i1) {
    const auto& t = mesh.triangles[tri];
    const Vec3 q[3] = {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
    const Vec3 nrm = ((q[1] - q[0]).cross(q[2] - q[0])).normalized();
    const double h = (p - q[0]).dot(nrm);
    const Vec3 rho = p - h * nrm;

    const double scale = (q[1] - q[0]).norm() + (q[2] - q[1]).norm() + (q[0] - q[2]).norm();
    const double eps = 1e-13 * scale;

    double sum0 = 0.0;
    Vec3 sum1 = Vec3::Zero();
    for (int e = 0; e < 3; ++e) {
        const Vec3 a = q[e];
        const Vec3 b = q[(e + 1) % 3];
        const Vec3 s_hat = (b - a).normalized();
        const Vec3 m_hat = s_hat.cross(nrm); // outward in-plane edge normal
        const double t0 = (a - rho).dot(m_hat);
        const double sa = (a - rho).dot(s_hat);
        const double sb = (b - rho).dot(s_hat);
        const double ra = (p - a).norm();
        const double rb = (p - b).norm();
        const double r0sq = t0 * t0 + h * h;

        double f = 0.0;
        if (rb + sb > eps && ra + sa > eps)
            f = std::log((rb + sb) / (ra + sa));
        else if (ra - sa > eps && rb - sb > eps)
            f = std::log((ra - sa) / (rb - sb));
        // else: observation on the edge segment; both limits finite via t0 -> 0.

        double beta = 0.0;
        if (std::abs(t0) > eps) {
            beta = std::atan(t0 * sb / (r0sq + std::abs(h) * rb)) -
                   std::atan(t0 * sa / (r0sq + std::abs(h) * ra));
            sum0 += t0 * f - std::abs(h) * beta;
        }
        sum1 += m_hat * (0.5 * (r0sq * f + sb * rb - sa * ra));
    }
    i0 = sum0 / (4.0 * kPi);
    i1 = (sum1 + rho * sum0) / (4.0 * kPi);
}

void kernel_inner_integrals(const TriangleMesh& mesh, int tri, const Vec3& p,
                            const Medium& medium, bool extract_singularity, cd& k0, CVec3& k1) {
    const TriQuadRule& rule = TriQuadRule::order2();
    const double area = mesh.triangle_area(tri);
    k0 = 0.0;
    k1 = CVec3::Zero();
    if (extract_singularity) {
        const double k = medium.wavenumber;
        for (int qn = 0; qn < static_cast<int>(rule.nodes.size()); ++qn) {
            const Vec3 rp = rule.point(mesh, tri, qn);
            const cd g = smooth_remainder((p - rp).norm(), k);
            const double w = area * rule.nodes[qn].w;
            k0 += w * g;
            k1 += (w * g) * rp.cast<cd>();
        }
        double i0;
        Vec3 i1;
        static_potential_integrals(mesh, tri, p, i0, i1);
        k0 += i0;
        k1 += i1.cast<cd>();
    } else {
        for (int qn = 0; qn < static_cast<int>(rule.nodes.size()); ++qn) {
            const Vec3 rp = rule.point(mesh, tri, qn);
            const cd g = scalar_green((p - rp).norm(), medium);
            const double w = area * rule.nodes[qn].w;
            k0 += w * g;
            k1 += (w * g) * rp.cast<cd>();
        }
    }
}

void assemble_galerkin_block(const TriangleMesh& mesh, const RwgBasis& basis,
                             const std::vector<int>& test_fns, const std::vector<int>& src_fns,
                             const Medium& medium, Eigen::MatrixXcd& out, EntryForm form) {
    out.setZero(static_cast<Eigen::Index>(test_fns.size()),
                static_cast<Eigen::Index>(src_fns.size()));

    std::map<int, std::vector<TriFn>> test_tris, src_tris;
    auto add = [&](std::map<int, std::vector<TriFn>>& tris, int fn, int slot) {
        const auto& f = basis.functions[fn];
        for (int tri : {f.tri_plus, f.tri_minus}) {
            const double sign = (tri == f.tri_plus) ? 1.0 : -1.0;
            const double area = mesh.triangle_area(tri);
            TriFn tf;
            tf.fn = fn;
            tf.col = slot;
            tf.lever = sign * f.edge_length / (2.0 * area);
            tf.div = sign * f.edge_length / area;
            tf.free_vertex =
                mesh.vertices[(tri == f.tri_plus) ? f.vert_plus : f.vert_minus];
            tris[tri].push_back(tf);
        }
    };
    for (size_t r = 0; r < test_fns.size(); ++r) add(test_tris, test_fns[r], static_cast<int>(r));
    for (size_t c = 0; c < src_fns.size(); ++c) add(src_tris, src_fns[c], static_cast<int>(c));

    const double k = medium.wavenumber;
    const cd front = kJ * k * medium.impedance;
    const double inv_k2 = 1.0 / (k * k);
    const TriQuadRule& basis_rule = TriQuadRule::order2();

    for (const auto& [tri_m, rows] : test_tris) {
        const Vec3 c_m = mesh.triangle_centroid(tri_m);
        const double area_m = mesh.triangle_area(tri_m);
        for (const auto& [tri_n, cols] : src_tris) {
            if (form == EntryForm::tested_dyadic) {
                // K0d = sum_q w D(c, r_q), K1v = sum_q w D(c, r_q) r_q.
                const double area_n = mesh.triangle_area(tri_n);
                CMat3 k0d = CMat3::Zero();
                CVec3 k1v = CVec3::Zero();
                for (int qn = 0; qn < static_cast<int>(basis_rule.nodes.size()); ++qn) {
                    const Vec3 rq = basis_rule.point(mesh, tri_n, qn);
                    const CMat3 d =
                        dyadic_green(c_m, rq, medium) * (area_n * basis_rule.nodes[qn].w);
                    k0d += d;
                    k1v += d * rq.cast<cd>();
                }
                for (const TriFn& tm : rows) {
                    const Vec3 bm = tm.lever * (c_m - tm.free_vertex);
                    for (const TriFn& tn : cols) {
                        const CVec3 field =
                            tn.lever * (k1v - k0d * tn.free_vertex.cast<cd>());
                        // Z = -(tested scattered field).
                        out(tm.col, tn.col) -=
                            area_m * (bm.x() * field.x() + bm.y() * field.y() +
                                      bm.z() * field.z());
                    }
                }
                continue;
            }
            const bool touching = share_vertex(mesh.triangles[tri_m], mesh.triangles[tri_n]);
            cd k0;
            CVec3 k1;
            kernel_inner_integrals(mesh, tri_n, c_m, medium, touching, k0, k1);
            for (const TriFn& tm : rows) {
                const Vec3 bm = tm.lever * (c_m - tm.free_vertex);
                for (const TriFn& tn : cols) {
                    const CVec3 inner_vec = tn.lever * (k1 - tn.free_vertex.cast<cd>() * k0);
                    const cd dot = bm.x() * inner_vec.x() + bm.y() * inner_vec.y() +
                                   bm.z() * inner_vec.z();
                    const cd scalar = inv_k2 * tm.div * tn.div * k0;
                    out(tm.col, tn.col) += front * area_m * (dot - scalar);
                }
            }
        }
    }
}

cd impedance_entry(const TriangleMesh& mesh, const RwgBasis& basis, int m, int n,
                   const Medium& medium) {
    Eigen::MatrixXcd z;
    assemble_galerkin_block(mesh, basis, {m}, {n}, medium, z);
    return z(0, 0);
}

Eigen::VectorXcd NearMatrix::apply(const Eigen::VectorXcd& x, const BoxGrid& grid) const {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
    for (int j = 0; j < static_cast<int>(by_target.size()); ++j) {
        const auto& targets = grid.boxes[j].basis_ids;
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(targets.size());
        for (const Block& blk : by_target[j]) {
            const auto& sources = grid.boxes[blk.source_box].basis_ids;
            Eigen::VectorXcd xs(sources.size());
            for (size_t c = 0; c < sources.size(); ++c) xs[c] = x[sources[c]];
            acc.noalias() += blk.z * xs;
        }
        for (size_t r = 0; r < targets.size(); ++r) y[targets[r]] += acc[r];
    }
    return y;
}

NearMatrix assemble_near(const TriangleMesh& mesh, const RwgBasis& basis, const BoxGrid& grid,
                         const Medium& medium) {
    NearMatrix near;
    near.by_target.resize(grid.box_count());

    std::map<std::array<int, 3>, int> coord_to_box;
    for (int b = 0; b < grid.box_count(); ++b) {
        const auto& c = grid.boxes[b].coords;
        coord_to_box[{c.x(), c.y(), c.z()}] = b;
    }

    for (int j = 0; j < grid.box_count(); ++j) {
        const auto& cj = grid.boxes[j].coords;
        for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    auto it = coord_to_box.find({cj.x() + dx, cj.y() + dy, cj.z() + dz});
                    if (it == coord_to_box.end()) continue;
                    const int i = it->second;
                    NearMatrix::Block blk;
                    blk.source_box = i;
                    assemble_galerkin_block(mesh, basis, grid.boxes[j].basis_ids,
                                            grid.boxes[i].basis_ids, medium, blk.z);
                    near.by_target[j].push_back(std::move(blk));
                }
            }
        }
    }
    return near;
}

} // namespace fastscat
