#include "qspec/spectral/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qspec/errors.hpp"
#include "qspec/spectral/legendre.hpp"

namespace qspec::spectral {

namespace {

constexpr int kMaxNewtonIterations = 100;
constexpr double kNewtonTolerance = 1e-15;

} // namespace

QuadratureRule lgl_rule(int order) {
    if (order < 1) {
        throw ContractViolation("lgl_rule: order must be >= 1");
    }
    QuadratureRule rule;
    rule.order = order;
    rule.nodes.assign(static_cast<std::size_t>(order) + 1, 0.0);
    rule.nodes.front() = -1.0;
    rule.nodes.back() = 1.0;

    // Only the lower half is solved for; the rule is symmetric about 0.
    for (int j = 1; j <= order / 2; ++j) {
        double x = -std::cos(std::numbers::pi * j / order);
        bool converged = false;
        for (int it = 0; it < kMaxNewtonIterations; ++it) {
            const auto s = legendre(order, x);
            const double dx = s.d1 / s.d2;
            x -= dx;
            if (std::abs(dx) <= kNewtonTolerance * (1.0 + std::abs(x))) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NumericError("lgl_rule: Newton iteration did not converge for node " +
                               std::to_string(j) + " of order " + std::to_string(order));
        }
        rule.nodes[j] = x;
        rule.nodes[order - j] = -x;
    }
    if (order % 2 == 0) {
        rule.nodes[order / 2] = 0.0;
    }

    const double scale = 2.0 / (static_cast<double>(order) * (order + 1));
    rule.weights.reserve(rule.nodes.size());
    for (double x : rule.nodes) {
        const double l = legendre(order, x).value;
        rule.weights.push_back(scale / (l * l));
    }
    return rule;
}

} // namespace qspec::spectral
