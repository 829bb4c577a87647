#include "qspec/spectral/legendre.hpp"

#include <cmath>
#include <string>

#include "qspec/errors.hpp"

namespace qspec::spectral {

namespace {

constexpr double kDomainSlack = 1e-12;

void check_node(double x) {
    if (!(std::abs(x) <= 1.0 + kDomainSlack)) {
        throw ContractViolation("legendre: node " + std::to_string(x) +
                                " outside [-1, 1]");
    }
}

} // namespace

LegendreSample legendre(int degree, double x) {
    if (degree < 0) {
        throw ContractViolation("legendre: negative degree");
    }
    check_node(x);

    // (p0, d0, s0) hold L_{n-1} and derivatives, (p1, d1, s1) hold L_n.
    double p0 = 1.0, d0 = 0.0, s0 = 0.0;
    if (degree == 0) {
        return {p0, d0, s0};
    }
    double p1 = x, d1 = 1.0, s1 = 0.0;
    for (int n = 1; n < degree; ++n) {
        const double p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
        const double d2 = d0 + (2.0 * n + 1.0) * p1;
        const double s2 = s0 + (2.0 * n + 1.0) * d1;
        p0 = p1;
        d0 = d1;
        s0 = s1;
        p1 = p2;
        d1 = d2;
        s1 = s2;
    }
    return {p1, d1, s1};
}

LegendreValues legendre_eval(int degree, std::span<const double> x) {
    LegendreValues out;
    out.value.reserve(x.size());
    out.derivative.reserve(x.size());
    for (double xi : x) {
        const auto s = legendre(degree, xi);
        out.value.push_back(s.value);
        out.derivative.push_back(s.d1);
    }
    return out;
}

} // namespace qspec::spectral
