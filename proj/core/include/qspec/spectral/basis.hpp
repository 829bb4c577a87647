#pragma once

#include <cstddef>
#include <vector>

namespace qspec::spectral {

enum class BoundaryKind { dirichlet, neumann, mixed, initial_value };

/**
 * @brief One homogeneous endpoint condition.
 *
 * Mixed conditions read value_weight * u + slope_weight * u' = 0. For the
 * other kinds the weights are implied and ignored.
 */
struct EndpointCondition {
    BoundaryKind kind = BoundaryKind::dirichlet;
    double value_weight = 1.0;
    double slope_weight = 0.0;

    static EndpointCondition dirichlet() { return {BoundaryKind::dirichlet, 1.0, 0.0}; }
    static EndpointCondition neumann() { return {BoundaryKind::neumann, 0.0, 1.0}; }
    static EndpointCondition mixed(double value_weight, double slope_weight) {
        return {BoundaryKind::mixed, value_weight, slope_weight};
    }
    static EndpointCondition initial_value() { return {BoundaryKind::initial_value, 1.0, 0.0}; }

    bool operator==(const EndpointCondition &) const = default;
};

/**
 * @brief Two conditions for one coordinate direction.
 *
 * initial_value must appear on both sides; the pair then means
 * u(-1) = u'(-1) = 0 and is only legal on a temporal direction.
 */
struct DirectionBoundary {
    EndpointCondition left;
    EndpointCondition right;
    bool temporal = false;

    static DirectionBoundary dirichlet() {
        return {EndpointCondition::dirichlet(), EndpointCondition::dirichlet(), false};
    }
    static DirectionBoundary neumann() {
        return {EndpointCondition::neumann(), EndpointCondition::neumann(), false};
    }
    static DirectionBoundary initial_value() {
        return {EndpointCondition::initial_value(), EndpointCondition::initial_value(), true};
    }

    [[nodiscard]] bool is(BoundaryKind kind) const noexcept {
        return left.kind == kind && right.kind == kind;
    }
    void validate() const;

    bool operator==(const DirectionBoundary &) const = default;
};

struct BoundarySpec {
    std::vector<DirectionBoundary> directions;

    [[nodiscard]] std::size_t direction_count() const noexcept { return directions.size(); }
    /// Throws ConfigError unless 1 or 2 directions, each valid.
    void validate() const;

    static BoundarySpec uniform(const DirectionBoundary &dir, std::size_t count);
};

struct BasisSample {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// phi_k = L_k + a_k L_{k+1} + b_k L_{k+2}, k = 0..n_modes-1.
struct CompactBasis {
    int n_modes = 0;
    std::vector<double> a;
    std::vector<double> b;
    DirectionBoundary boundary;

    [[nodiscard]] BasisSample sample(int k, double x) const;
    [[nodiscard]] double value(int k, double x) const { return sample(k, x).value; }
};

/**
 * @brief Solve for (a_k, b_k) so that every phi_k meets both conditions.
 *
 * Uses L_k(+-1) = (+-1)^k and L'_k(+-1) = (+-1)^(k-1) k(k+1)/2. Dirichlet and
 * Neumann use their closed forms directly. Throws BasisConstructionError if
 * the 2x2 endpoint system is singular and ContractViolation for n_modes < 2.
 */
[[nodiscard]] CompactBasis basis_coeffs(const DirectionBoundary &bc, int n_modes);

} // namespace qspec::spectral
