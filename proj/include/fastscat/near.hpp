#pragma once

#include "fastscat/geometry.hpp"
#include "fastscat/kernels.hpp"

namespace fastscat {

/// Analytic static potential integrals of a triangle source observed at p:
///   i0 = Int_T 1/(4 pi R) dA',   i1 = Int_T r'/(4 pi R) dA'.
/// Closed-form edge sums; valid for observation points on, near or far
/// from the triangle (including inside it).
void static_potential_integrals(const TriangleMesh& mesh, int tri, const Vec3& p, double& i0,
                                Vec3& i1);

/// Inner integrals of the dynamic kernel g = exp(-jkR)/(4 pi R):
///   k0 = Int_T g dA',   k1 = Int_T g r' dA'.
/// If `extract_singularity`, the 1/R part is integrated analytically and
/// only the smooth remainder (exp(-jkR)-1)/(4 pi R) is quadratured.
void kernel_inner_integrals(const TriangleMesh& mesh, int tri, const Vec3& p,
                            const Medium& medium, bool extract_singularity, cd& k0, CVec3& k1);

/// Two algebraically equal discretizations of the Galerkin EFIE entry
/// (they differ only through quadrature):
///   mixed_potential:  Z_mn = j k eta IntInt g [ b_m . b_n
///                             - (1/k^2)(div b_m)(div b_n) ],
///     integrable at touching triangles via singularity extraction; used
///     for the stored near interactions.
///   tested_dyadic:    Z_mn = -IntInt t_m . D . b_n,
///     the form the mapping/translation pipeline approximates; used for
///     well-separated (far-box) entries of the dense oracle.
/// Both use first-order test-side and second-order basis-side rules.
enum class EntryForm { mixed_potential, tested_dyadic };

/// Single entry code path shared by the near matrix and the dense
/// oracle.
void assemble_galerkin_block(const TriangleMesh& mesh, const RwgBasis& basis,
                             const std::vector<int>& test_fns, const std::vector<int>& src_fns,
                             const Medium& medium, Eigen::MatrixXcd& out,
                             EntryForm form = EntryForm::mixed_potential);

/// Single impedance entry (convenience for tests).
cd impedance_entry(const TriangleMesh& mesh, const RwgBasis& basis, int m, int n,
                   const Medium& medium);

/// Block-sparse near-interaction matrix over box pairs with
/// max |delta| <= 1 (self included).
struct NearMatrix {
    struct Block {
        int source_box = -1;
        Eigen::MatrixXcd z; // rows: target-box functions, cols: source-box functions
    };
    std::vector<std::vector<Block>> by_target; // indexed by target box

    Eigen::VectorXcd apply(const Eigen::VectorXcd& x, const BoxGrid& grid) const;
};

NearMatrix assemble_near(const TriangleMesh& mesh, const RwgBasis& basis, const BoxGrid& grid,
                         const Medium& medium);

} // namespace fastscat
