#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <vector>

#include "qspec/spectral/assembly.hpp"

namespace qspec::spectral {

struct SolutionField {
    Eigen::VectorXd coefficients;
    std::vector<double> nodal_values;
    double scale = 1.0;
};

/// Direct LU solve. Throws SingularSystemError (with a 1-norm condition
/// estimate) when the matrix is numerically rank deficient.
[[nodiscard]] Eigen::VectorXd dense_solve(const Eigen::MatrixXd &A, const Eigen::VectorXd &rhs);

/// Ground-truth solve A alpha = F plus reconstruction on the system grid.
[[nodiscard]] SolutionField classical_solve(const SpectralSystem &sys, const Eigen::VectorXd &F);
[[nodiscard]] SolutionField classical_solve(const SpectralSystem &sys, const Eigen::MatrixXd &A,
                                            const Eigen::VectorXd &F);

[[nodiscard]] SolutionField make_solution_field(const SpectralSystem &sys,
                                                Eigen::VectorXd coefficients, double scale = 1.0);

/// 2-norm condition number via SVD (infinity for singular input).
[[nodiscard]] double condition_number(const Eigen::MatrixXd &A);

struct ErrorMetrics {
    double mae = 0.0;
    double rel_l2 = 0.0;
    double rel_linf = 0.0;
};

/**
 * Pointwise mean absolute error, quadrature-weighted relative L2 error and
 * nodal relative max error. Throws DivisionGuardError for an all-zero truth.
 */
[[nodiscard]] ErrorMetrics metrics(std::span<const double> pred, std::span<const double> truth,
                                   std::span<const double> weights);
[[nodiscard]] ErrorMetrics metrics(const SolutionField &pred, const SolutionField &truth,
                                   std::span<const double> weights);

/// Row-major CSV dump with 17 significant digits.
void write_matrix_csv(std::ostream &os, const Eigen::MatrixXd &m);

} // namespace qspec::spectral
