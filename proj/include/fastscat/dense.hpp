#pragma once

#include <Eigen/LU>

#include "fastscat/mie.hpp"
#include "fastscat/near.hpp"

namespace fastscat {

/// Classical MoM brute-force path: the full N x N impedance matrix with
/// the same kernel and quadrature as the near code path. Ground truth
/// for far-backend error budgets; guarded to N <= 20000.
///
/// Without a grid every entry uses the mixed-potential form (classical
/// MoM). With a grid the far-box blocks switch to the tested-dyadic
/// form, making the oracle the exact counterpart of the three-stage far
/// pipeline while near blocks stay identical to the stored near matrix.
class DenseOracle {
  public:
    DenseOracle(const TriangleMesh& mesh, const RwgBasis& basis, const Medium& medium,
                int max_unknowns = 20000);
    DenseOracle(const TriangleMesh& mesh, const RwgBasis& basis, const BoxGrid& grid,
                const Medium& medium, int max_unknowns = 20000);

    const Eigen::MatrixXcd& matrix() const { return z_; }
    Eigen::VectorXcd multiply(const Eigen::VectorXcd& x) const { return z_ * x; }

    /// Direct factorized solve.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& excitation) const;

  private:
    Eigen::MatrixXcd z_;
    mutable Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    mutable bool factored_ = false;
};

/// Dense solve plus far-field cut in one call.
struct DenseSolution {
    Eigen::VectorXcd coefficients;
    FarFieldPattern pattern;
};

DenseSolution dense_solve(const TriangleMesh& mesh, const RwgBasis& basis, const Medium& medium,
                          const Eigen::VectorXcd& excitation,
                          const std::vector<double>& angles_deg);

/// E-plane co-polarized pattern of an RWG current solution.
FarFieldPattern far_field(const TriangleMesh& mesh, const RwgBasis& basis,
                          const Eigen::VectorXcd& coeffs, const Medium& medium,
                          const std::vector<double>& angles_deg);

} // namespace fastscat
