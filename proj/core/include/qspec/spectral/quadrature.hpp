#pragma once

#include <vector>

namespace qspec::spectral {

/// Legendre-Gauss-Lobatto rule on [-1, 1] with order + 1 nodes, ascending.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

/**
 * @brief Build the LGL rule of the given order.
 *
 * Interior nodes are the roots of L'_order, found by Newton iteration from
 * Chebyshev-Gauss-Lobatto starting points. Weights are
 * 2 / (order (order + 1) L_order(x_j)^2). The rule integrates polynomials of
 * degree <= 2 order - 1 exactly.
 *
 * Throws ContractViolation for order < 1 and NumericError if Newton does not
 * converge.
 */
[[nodiscard]] QuadratureRule lgl_rule(int order);

} // namespace qspec::spectral
