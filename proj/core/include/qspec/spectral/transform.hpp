#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "qspec/spectral/assembly.hpp"

namespace qspec::spectral {

struct ForwardTransform {
    Eigen::VectorXd coefficients; ///< F_k = l(phi_k)
    double norm = 0.0;            ///< Euclidean norm of F
};

/// phi_k(x_j) as an n_modes x nodes table.
[[nodiscard]] Eigen::MatrixXd basis_table(const CompactBasis &basis, std::span<const double> nodes);

/// F_k = sum_j w_j f(x_j) phi_k(x_j) on the reference interval.
[[nodiscard]] ForwardTransform forward_transform(std::span<const double> f_values,
                                                 const CompactBasis &basis,
                                                 const QuadratureRule &quad);

/// Tensorized transform of f sampled on sys.grid_points(), Jacobians included.
[[nodiscard]] ForwardTransform forward_transform(const SpectralSystem &sys,
                                                 std::span<const double> f_values);

/// u(x_j) = sum_k alpha_k phi_k(x_j) on the system's tensor grid.
[[nodiscard]] std::vector<double> evaluate_on_grid(const SpectralSystem &sys,
                                                   const Eigen::VectorXd &coefficients);

} // namespace qspec::spectral
