#include "fastscat/gmres.hpp"

#include <cmath>
#include <stdexcept>

namespace fastscat {

GmresResult gmres_solve(const LinearOperator& op, const Eigen::VectorXcd& rhs,
                        const GmresOptions& options) {
    if (options.tolerance <= 0.0 || options.restart < 1 || options.max_iterations < 1)
        throw std::invalid_argument("gmres_solve: invalid options");

    const Eigen::Index n = rhs.size();
    const double rhs_norm = rhs.norm();
    GmresResult result;
    result.solution = Eigen::VectorXcd::Zero(n);
    if (rhs_norm == 0.0) {
        result.converged = true;
        return result;
    }

    const int m = options.restart;
    Eigen::MatrixXcd basis(n, m + 1);
    Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m + 1, m);
    Eigen::VectorXcd cs(m), sn(m), g(m + 1);

    double rel_res = 1.0;
    while (result.iterations < options.max_iterations) {
        Eigen::VectorXcd r = rhs - op(result.solution);
        double beta = r.norm();
        rel_res = beta / rhs_norm;
        if (rel_res <= options.tolerance) {
            result.converged = true;
            break;
        }
        const double cycle_start_res = rel_res;

        basis.col(0) = r / beta;
        g.setZero();
        g(0) = beta;

        int k = 0;
        for (; k < m && result.iterations < options.max_iterations; ++k) {
            Eigen::VectorXcd w = op(basis.col(k));
            // Modified Gram-Schmidt with one reorthogonalization pass.
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= k; ++i) {
                    const cd h = basis.col(i).dot(w);
                    w -= h * basis.col(i);
                    if (pass == 0)
                        hess(i, k) = h;
                    else
                        hess(i, k) += h;
                }
            }
            hess(k + 1, k) = w.norm();
            if (std::abs(hess(k + 1, k)) > 0.0) basis.col(k + 1) = w / hess(k + 1, k);

            // Apply accumulated Givens rotations to the new column.
            for (int i = 0; i < k; ++i) {
                const cd t = cs(i) * hess(i, k) + sn(i) * hess(i + 1, k);
                hess(i + 1, k) = -std::conj(sn(i)) * hess(i, k) + cs(i) * hess(i + 1, k);
                hess(i, k) = t;
            }
            const cd h_kk = hess(k, k);
            const cd h_k1k = hess(k + 1, k);
            const double denom = std::sqrt(std::norm(h_kk) + std::norm(h_k1k));
            if (denom == 0.0) {
                cs(k) = 1.0;
                sn(k) = 0.0;
            } else {
                cs(k) = std::abs(h_kk) / denom;
                if (std::abs(h_kk) > 0.0)
                    sn(k) = (h_kk / std::abs(h_kk)) * std::conj(h_k1k) / denom;
                else
                    sn(k) = std::conj(h_k1k) / denom;
            }
            hess(k, k) = cs(k) * h_kk + sn(k) * h_k1k;
            hess(k + 1, k) = 0.0;
            g(k + 1) = -std::conj(sn(k)) * g(k);
            g(k) = cs(k) * g(k);

            ++result.iterations;
            rel_res = std::abs(g(k + 1)) / rhs_norm;
            result.residual_history.push_back(rel_res);
            if (rel_res <= options.tolerance) {
                ++k;
                break;
            }
        }

        // Back substitution on the k x k triangular system.
        Eigen::VectorXcd y(k);
        for (int i = k - 1; i >= 0; --i) {
            cd sum = g(i);
            for (int j = i + 1; j < k; ++j) sum -= hess(i, j) * y(j);
            y(i) = sum / hess(i, i);
        }
        result.solution += basis.leftCols(k) * y;

        if (rel_res <= options.tolerance) {
            result.converged = true;
            break;
        }
        if (rel_res > cycle_start_res * (1.0 - 1e-12)) {
            result.stagnated = true;
            break;
        }
    }
    return result;
}

} // namespace fastscat
