#include "fastscat/dense.hpp"

#include <numeric>
#include <stdexcept>

namespace fastscat {

DenseOracle::DenseOracle(const TriangleMesh& mesh, const RwgBasis& basis, const Medium& medium,
                         int max_unknowns) {
    const int n = basis.size();
    if (n > max_unknowns)
        throw std::runtime_error("DenseOracle: " + std::to_string(n) +
                                 " unknowns exceed the dense storage guard");
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    assemble_galerkin_block(mesh, basis, all, all, medium, z_);
}

DenseOracle::DenseOracle(const TriangleMesh& mesh, const RwgBasis& basis, const BoxGrid& grid,
                         const Medium& medium, int max_unknowns) {
    const int n = basis.size();
    if (n > max_unknowns)
        throw std::runtime_error("DenseOracle: " + std::to_string(n) +
                                 " unknowns exceed the dense storage guard");
    z_.setZero(n, n);
    Eigen::MatrixXcd block;
    for (int j = 0; j < grid.box_count(); ++j) {
        const auto& targets = grid.boxes[j].basis_ids;
        for (int i = 0; i < grid.box_count(); ++i) {
            const auto& sources = grid.boxes[i].basis_ids;
            const Eigen::Vector3i delta = grid.boxes[j].coords - grid.boxes[i].coords;
            const EntryForm form = delta.cwiseAbs().maxCoeff() <= 1
                                       ? EntryForm::mixed_potential
                                       : EntryForm::tested_dyadic;
            assemble_galerkin_block(mesh, basis, targets, sources, medium, block, form);
            for (size_t r = 0; r < targets.size(); ++r)
                for (size_t c = 0; c < sources.size(); ++c)
                    z_(targets[r], sources[c]) = block(r, c);
        }
    }
}

Eigen::VectorXcd DenseOracle::solve(const Eigen::VectorXcd& excitation) const {
    if (!factored_) {
        lu_.compute(z_);
        factored_ = true;
    }
    return lu_.solve(excitation);
}

FarFieldPattern far_field(const TriangleMesh& mesh, const RwgBasis& basis,
                          const Eigen::VectorXcd& coeffs, const Medium& medium,
                          const std::vector<double>& angles_deg) {
    for (size_t i = 1; i < angles_deg.size(); ++i)
        if (angles_deg[i] <= angles_deg[i - 1])
            throw std::invalid_argument("far_field: angle grid must be strictly increasing");
    FarFieldPattern pattern;
    pattern.angles_deg = angles_deg;
    pattern.values.resize(angles_deg.size());
    for (size_t i = 0; i < angles_deg.size(); ++i) {
        Vec3 rhat, theta_hat;
        eplane_direction(angles_deg[i], rhat, theta_hat);
        const CVec3 f = radiation_vector(mesh, basis, coeffs, rhat, medium);
        pattern.values[i] = theta_hat.x() * f.x() + theta_hat.y() * f.y() + theta_hat.z() * f.z();
    }
    return pattern;
}

DenseSolution dense_solve(const TriangleMesh& mesh, const RwgBasis& basis, const Medium& medium,
                          const Eigen::VectorXcd& excitation,
                          const std::vector<double>& angles_deg) {
    DenseOracle oracle(mesh, basis, medium);
    DenseSolution sol;
    sol.coefficients = oracle.solve(excitation);
    sol.pattern = far_field(mesh, basis, sol.coefficients, medium, angles_deg);
    return sol;
}

} // namespace fastscat
