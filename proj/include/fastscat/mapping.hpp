#pragma once

#include "fastscat/kernels.hpp"

namespace fastscat {

/// Dipole count for a box of electrical size ka and d0 digits of accuracy:
/// the larger of
///   2 (1.73 ka + 2.16 d0^(2/3) (ka)^(1/3))^2   and   2 (14.14 d0 - 7.17)^2,
/// rounded up to the nearest cube n_d^3. Returns n_d (dipoles per axis).
int select_dipole_count(double ka, int digits);

/// Position-relative model of a child box: the uniform Hertzian dipole
/// grid, the matching sphere of radius 1.5a, the field matrix A and its
/// pseudo-inverses. Identical for every box.
struct UniformBoxModel {
    double box_edge = 0.0; // a
    int n_d = 0;           // dipoles per axis
    int num_dipoles = 0;   // N_d = n_d^3
    int num_samples = 0;   // N_s = 2 N_d

    std::vector<Vec3> dipole_offsets; // N_d positions relative to box center
    FibonacciSphere sphere;           // N_s sample points, radius 1.5a

    // A: (3 N_s) x (3 N_d), column (3k+beta) holds the sampled E-field of
    // the unit beta-component of dipole k. pinv_a_t is pinv(A^T), reused
    // from the same SVD (pinv(A^T) = pinv(A)^T).
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd pinv_a;   // (3 N_d) x (3 N_s)
    Eigen::MatrixXcd pinv_a_t; // (3 N_s) x (3 N_d)
    int effective_rank = 0;

    int dipole_index(int i, int j, int k) const { return (k * n_d + j) * n_d + i; }
};

/// Builds the dipole grid (centered, spacing a/n_d, offset a/(2 n_d) from
/// the faces), assembles A from dipole fields and computes the truncated
/// pseudo-inverse (relative singular value cutoff `svd_cutoff`).
UniformBoxModel build_box_model(double box_edge, int n_d, const Medium& medium,
                                double svd_cutoff = 1e-8);

/// Per-basis-function mapping vectors, precomputed once per geometry and
/// frequency:
///   forward[k] = pinv(A) * B_k, with B_k the sampled fields of unit b_k
///   on its box's sphere;
///   inverse[k][3l+alpha] = tested field on b_k of the unit alpha-component
///   virtual dipole at sphere point l of its box.
struct BasisMapTable {
    Eigen::MatrixXcd forward; // (3 N_d) x N, column k = M_k
    Eigen::MatrixXcd inverse; // (3 N_s) x N, column k = W_k
};

BasisMapTable precompute_basis_maps(const TriangleMesh& mesh, const RwgBasis& basis,
                                    const BoxGrid& grid, const UniformBoxModel& model,
                                    const Medium& medium);

/// Sampled fields B_k of unit-coefficient b_k on a sphere centered at
/// `box_center` (basis-side quadrature). Exposed for dataset generation,
/// where boxes slide over a generator surface.
Eigen::VectorXcd sample_basis_fields(const TriangleMesh& mesh, const RwgBasis& basis, int k,
                                     const Vec3& box_center, const FibonacciSphere& sphere,
                                     const Medium& medium);

/// Dipole coefficient vectors per non-empty box (A*m), linear in the
/// solver iterate.
struct DipoleCoefficients {
    std::vector<Eigen::VectorXcd> per_box; // grid.box_count() vectors of size 3 N_d
};

/// Stage 1: P_i = sum_{k in box i} a_k forward[k].
DipoleCoefficients map_forward(const Eigen::VectorXcd& iterate, const BasisMapTable& table,
                               const BoxGrid& grid, const UniformBoxModel& model);

/// Stage 3 for one box: Q = pinv(A^T) E_box once, then V_k = W_k . Q for
/// each function k of the box, accumulated into `out`.
void map_inverse(const Eigen::VectorXcd& e_box, int box, const BasisMapTable& table,
                 const BoxGrid& grid, const UniformBoxModel& model, Eigen::VectorXcd& out);

} // namespace fastscat
