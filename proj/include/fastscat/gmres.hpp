#pragma once

#include <functional>

#include "fastscat/kernels.hpp"

namespace fastscat {

using LinearOperator = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct GmresOptions {
    double tolerance = 1e-3; // relative residual
    int restart = 100;
    int max_iterations = 1000;
    /// Right preconditioner M^-1 (solves A M^-1 u = b, x = M^-1 u).
    /// Ships unset, i.e. identity.
    LinearOperator right_preconditioner;
};

struct GmresResult {
    Eigen::VectorXcd solution;
    std::vector<double> residual_history; // relative, one entry per inner iteration
    int iterations = 0;
    bool converged = false;
    bool stagnated = false;
};

/// Restarted GMRES with modified Gram-Schmidt Arnoldi plus one
/// reorthogonalization pass and Givens-rotation least squares. Residuals
/// are relative to ||rhs||; x0 = 0.
GmresResult gmres_solve(const LinearOperator& op, const Eigen::VectorXcd& rhs,
                        const GmresOptions& options);

} // namespace fastscat
