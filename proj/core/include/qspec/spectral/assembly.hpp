#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "qspec/spectral/basis.hpp"
#include "qspec/spectral/quadrature.hpp"

namespace qspec::spectral {

enum class MatrixKind { stiffness, mass, convection };

/**
 * @brief 1D Galerkin matrices on the reference interval.
 *
 * stiffness: S_kj = int phi_j'' phi_k   (diagonal (4k+6) b_k for
 *            Dirichlet/Neumann bases)
 * mass:      M_kj = int phi_j phi_k     (symmetric pentadiagonal)
 * convection R_kj = int phi_k' phi_j    (Dirichlet: +2 below the diagonal,
 *            -2 above). Note the operator matrix of u_x is R^T.
 *
 * Dirichlet/Neumann bases use closed forms; any other basis is integrated
 * with an LGL rule of order n_modes + 4.
 */
[[nodiscard]] Eigen::MatrixXd assemble_1d(MatrixKind kind, const CompactBasis &basis);

/// Same matrices, always by LGL quadrature. Used to cross-check closed forms.
[[nodiscard]] Eigen::MatrixXd assemble_1d_by_quadrature(MatrixKind kind,
                                                        const CompactBasis &basis);

enum class PdeKind { rd1d, helm1d, cd1d, wave1d, rd2d, helm2d, cd2d, joint_helm };

[[nodiscard]] std::string_view to_string(PdeKind pde) noexcept;
/// Throws ConfigError for unknown names.
[[nodiscard]] PdeKind parse_pde(std::string_view name);

struct PdeParams {
    double epsilon = 0.1;        ///< diffusion (rd, cd)
    double wave_number_sq = 4.0; ///< k^2 (helm, joint_helm)
    double nu = 1.0;             ///< convection velocity along x (cd)
    double nu_y = 1.0;           ///< convection velocity along y (cd2d)
    double wave_horizon = 2.0;   ///< T for wave1d, t in [0, T]
    int joint_dimension = 1;     ///< d for joint_helm
};

/// Affine map from reference [-1, 1] to [lower, upper].
struct DomainMap {
    double lower = -1.0;
    double upper = 1.0;

    [[nodiscard]] double half_length() const noexcept { return 0.5 * (upper - lower); }
    [[nodiscard]] double to_physical(double ref) const noexcept {
        return lower + (ref + 1.0) * half_length();
    }
};

/// A(k) = B + k^2 C.
struct ParametricParts {
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;

    [[nodiscard]] Eigen::MatrixXd at(double wave_number_sq) const {
        return B + wave_number_sq * C;
    }
};

/**
 * @brief Assembled operator and the discretization data needed to
 * transform forcings and reconstruct solutions.
 *
 * Multi-dimensional coefficients and grids are ordered with the first
 * direction (x) fastest: index = i_x + N * i_y.
 */
struct SpectralSystem {
    PdeKind pde = PdeKind::rd1d;
    PdeParams params;
    Eigen::MatrixXd A;
    std::optional<ParametricParts> parametric;
    std::vector<CompactBasis> bases;
    std::vector<DomainMap> domains;
    QuadratureRule quadrature;

    [[nodiscard]] int dimension() const noexcept { return static_cast<int>(bases.size()); }
    [[nodiscard]] int n_modes() const noexcept { return bases.front().n_modes; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(A.rows()); }

    [[nodiscard]] std::size_t grid_size() const noexcept;
    /// Physical quadrature weights on the tensor grid (Jacobians included).
    [[nodiscard]] std::vector<double> grid_weights() const;
    /// Physical coordinates of the tensor grid; unused coordinates are 0.
    [[nodiscard]] std::vector<std::array<double, 2>> grid_points() const;
    /// Operator for a specific k^2 (parametric systems), otherwise A.
    [[nodiscard]] Eigen::MatrixXd operator_at(double wave_number_sq) const;
};

/**
 * @brief Build the spectral system of one benchmark PDE.
 *
 * rd1d   -eps u'' + u = f             A = -eps S + M
 * helm1d u'' + k^2 u = f              A = S + k^2 M
 * cd1d   -eps u'' + nu u' = f         A = -eps S + nu R^T
 * rd2d, helm2d, cd2d                  Kronecker forms
 * wave1d u_tt - u_xx = f on [0,1]x[0,T], u(x,0) = u_t(x,0) = 0
 * joint_helm                          A(k) = B + k^2 C in 1D or 2D
 *
 * Throws ConfigError for unsupported (pde, boundary) combinations.
 */
[[nodiscard]] SpectralSystem assemble_system(PdeKind pde, const PdeParams &params,
                                             const BoundarySpec &bc, int n_modes);

/// kron(outer, inner): the inner factor acts on the fastest index.
[[nodiscard]] Eigen::MatrixXd kron(const Eigen::MatrixXd &outer, const Eigen::MatrixXd &inner);

} // namespace qspec::spectral
