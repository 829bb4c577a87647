#pragma once

#include <span>
#include <vector>

namespace qspec::spectral {

/// Value and first two derivatives of L_n at a single point.
struct LegendreSample {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/**
 * @brief Evaluate L_degree and its first two derivatives at x in [-1, 1].
 *
 * Uses the three-term recurrence for values and the identity
 * L'_{n+1} = L'_{n-1} + (2n+1) L_n (and its derivative) for the
 * derivatives, which stays accurate at the endpoints.
 */
[[nodiscard]] LegendreSample legendre(int degree, double x);

struct LegendreValues {
    std::vector<double> value;
    std::vector<double> derivative;
};

/// Vectorized L_degree(x_j) and L'_degree(x_j). Throws ContractViolation
/// for degree < 0 or any node outside [-1, 1].
[[nodiscard]] LegendreValues legendre_eval(int degree, std::span<const double> x);

} // namespace qspec::spectral
