#include "fastscat/mapping.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace fastscat {

int select_dipole_count(double ka, int digits) {
    if (ka <= 0.0) throw std::invalid_argument("select_dipole_count: ka must be > 0");
    if (digits < 1) throw std::invalid_argument("select_dipole_count: digits must be >= 1");
    const double d0 = digits;
    const double excess = 1.73 * ka + 2.16 * std::pow(d0, 2.0 / 3.0) * std::cbrt(ka);
    const double n_propagating = 2.0 * excess * excess;
    const double lf = 14.14 * d0 - 7.17;
    const double n_subwavelength = 2.0 * lf * lf;
    const double n_req = std::max(n_propagating, n_subwavelength);
    int n_d = std::max(1, static_cast<int>(std::ceil(std::cbrt(n_req) - 1e-12)));
    return n_d;
}

UniformBoxModel build_box_model(double box_edge, int n_d, const Medium& medium,
                                double svd_cutoff) {
    if (box_edge <= 0.0) throw std::invalid_argument("build_box_model: box edge must be > 0");
    if (n_d < 1) throw std::invalid_argument("build_box_model: n_d must be >= 1");

    UniformBoxModel model;
    model.box_edge = box_edge;
    model.n_d = n_d;
    model.num_dipoles = n_d * n_d * n_d;
    model.num_samples = 2 * model.num_dipoles;

    const double spacing = box_edge / n_d;
    const double start = -0.5 * box_edge + 0.5 * spacing;
    model.dipole_offsets.resize(model.num_dipoles);
    for (int k = 0; k < n_d; ++k)
        for (int j = 0; j < n_d; ++j)
            for (int i = 0; i < n_d; ++i)
                model.dipole_offsets[model.dipole_index(i, j, k)] =
                    Vec3(start + i * spacing, start + j * spacing, start + k * spacing);

    model.sphere = fibonacci_lattice(model.num_samples, 1.5 * box_edge);

    const int rows = 3 * model.num_samples;
    const int cols = 3 * model.num_dipoles;
    model.a.resize(rows, cols);
    for (int d = 0; d < model.num_dipoles; ++d) {
        for (int l = 0; l < model.num_samples; ++l) {
            const CMat3 g = dyadic_green(model.sphere.points[l], model.dipole_offsets[d], medium);
            model.a.block<3, 3>(3 * l, 3 * d) = g;
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(model.a,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = svd_cutoff * sv(0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    model.effective_rank = rank;

    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < rank; ++i) inv_sv(i) = 1.0 / sv(i);
    model.pinv_a = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
    model.pinv_a_t = model.pinv_a.transpose(); // pinv(A^T) = pinv(A)^T
    return model;
}

Eigen::VectorXcd sample_basis_fields(const TriangleMesh& mesh, const RwgBasis& basis, int k,
                                     const Vec3& box_center, const FibonacciSphere& sphere,
                                     const Medium& medium) {
    const TriQuadRule& rule = TriQuadRule::order2();
    const int num_samples = static_cast<int>(sphere.points.size());
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(3 * num_samples);
    const auto& f = basis.functions[k];
    for (int tri : {f.tri_plus, f.tri_minus}) {
        const double area = mesh.triangle_area(tri);
        for (int q = 0; q < static_cast<int>(rule.nodes.size()); ++q) {
            const Vec3 p = rule.point(mesh, tri, q);
            const Vec3 current = basis.value(mesh, k, tri, p);
            const double w = area * rule.nodes[q].w;
            for (int l = 0; l < num_samples; ++l) {
                const Vec3 obs = box_center + sphere.points[l];
                const CMat3 g = dyadic_green(obs, p, medium);
                b.segment<3>(3 * l) += w * (g * current.cast<cd>());
            }
        }
    }
    return b;
}

BasisMapTable precompute_basis_maps(const TriangleMesh& mesh, const RwgBasis& basis,
                                    const BoxGrid& grid, const UniformBoxModel& model,
                                    const Medium& medium) {
    const int n = basis.size();
    BasisMapTable table;
    table.forward.resize(3 * model.num_dipoles, n);
    table.inverse.resize(3 * model.num_samples, n);

    const TriQuadRule& test_rule = TriQuadRule::order1();
    for (int k = 0; k < n; ++k) {
        const int box = grid.basis_to_box[k];
        if (box < 0) throw std::runtime_error("precompute_basis_maps: unassigned function");
        const Vec3 center = grid.box_center(box);

        table.forward.col(k) =
            model.pinv_a * sample_basis_fields(mesh, basis, k, center, model.sphere, medium);

        // W_k: tested fields of unit virtual dipoles on the box sphere.
        const auto& f = basis.functions[k];
        Eigen::VectorXcd w_k = Eigen::VectorXcd::Zero(3 * model.num_samples);
        for (int tri : {f.tri_plus, f.tri_minus}) {
            const double area = mesh.triangle_area(tri);
            for (int q = 0; q < static_cast<int>(test_rule.nodes.size()); ++q) {
                const Vec3 p = test_rule.point(mesh, tri, q);
                const Vec3 t = basis.value(mesh, k, tri, p);
                const double w = area * test_rule.nodes[q].w;
                for (int l = 0; l < model.num_samples; ++l) {
                    const Vec3 src = center + model.sphere.points[l];
                    const CMat3 g = dyadic_green(p, src, medium);
                    // t . (D e_alpha) for alpha = x,y,z
                    w_k.segment<3>(3 * l) += w * (g.transpose() * t.cast<cd>());
                }
            }
        }
        table.inverse.col(k) = w_k;
    }
    return table;
}

DipoleCoefficients map_forward(const Eigen::VectorXcd& iterate, const BasisMapTable& table,
                               const BoxGrid& grid, const UniformBoxModel& model) {
    if (iterate.size() != table.forward.cols())
        throw std::invalid_argument("map_forward: iterate length mismatch");
    DipoleCoefficients coeffs;
    coeffs.per_box.assign(grid.box_count(),
                          Eigen::VectorXcd::Zero(3 * model.num_dipoles));
    for (int b = 0; b < grid.box_count(); ++b) {
        auto& p = coeffs.per_box[b];
        for (int k : grid.boxes[b].basis_ids) p.noalias() += iterate[k] * table.forward.col(k);
    }
    return coeffs;
}

void map_inverse(const Eigen::VectorXcd& e_box, int box, const BasisMapTable& table,
                 const BoxGrid& grid, const UniformBoxModel& model, Eigen::VectorXcd& out) {
    if (e_box.size() != 3 * model.num_dipoles)
        throw std::invalid_argument("map_inverse: field vector length mismatch");
    // Q does not depend on the test function, so it is solved once per box.
    const Eigen::VectorXcd q = model.pinv_a_t * e_box;
    for (int k : grid.boxes[box].basis_ids) {
        // Plain (non-conjugated) contraction of W_k with Q.
        out[k] += table.inverse.col(k).cwiseProduct(q).sum();
    }
}

} // namespace fastscat
