#include "qspec/spectral/basis.hpp"

#include <array>
#include <cmath>
#include <string>

#include "qspec/errors.hpp"
#include "qspec/spectral/legendre.hpp"

namespace qspec::spectral {

namespace {

struct Functional {
    double endpoint;
    double value_weight;
    double slope_weight;

    // Applies the condition to L_m using the closed-form endpoint values.
    [[nodiscard]] double apply(int m) const {
        const double sign = endpoint > 0 ? 1.0 : (m % 2 == 0 ? 1.0 : -1.0);
        const double value = sign;
        const double slope = (m == 0) ? 0.0 : sign * endpoint * m * (m + 1) / 2.0;
        return value_weight * value + slope_weight * slope;
    }
};

Functional endpoint_functional(const EndpointCondition &c, double endpoint) {
    switch (c.kind) {
    case BoundaryKind::dirichlet:
        return {endpoint, 1.0, 0.0};
    case BoundaryKind::neumann:
        return {endpoint, 0.0, 1.0};
    case BoundaryKind::mixed:
        return {endpoint, c.value_weight, c.slope_weight};
    case BoundaryKind::initial_value:
        break;
    }
    throw ContractViolation("endpoint_functional: initial_value is a paired condition");
}

std::array<Functional, 2> functionals(const DirectionBoundary &bc) {
    if (bc.is(BoundaryKind::initial_value)) {
        return {Functional{-1.0, 1.0, 0.0}, Functional{-1.0, 0.0, 1.0}};
    }
    return {endpoint_functional(bc.left, -1.0), endpoint_functional(bc.right, 1.0)};
}

} // namespace

void DirectionBoundary::validate() const {
    const bool left_iv = left.kind == BoundaryKind::initial_value;
    const bool right_iv = right.kind == BoundaryKind::initial_value;
    if (left_iv != right_iv) {
        throw ConfigError("boundary: initial_value must be given on both sides of a direction");
    }
    if (left_iv && !temporal) {
        throw ConfigError("boundary: initial_value is only allowed on a temporal direction");
    }
    for (const auto *c : {&left, &right}) {
        if (c->kind == BoundaryKind::mixed && c->value_weight == 0.0 && c->slope_weight == 0.0) {
            throw ConfigError("boundary: mixed condition with all-zero weights");
        }
    }
}

void BoundarySpec::validate() const {
    if (directions.empty() || directions.size() > 2) {
        throw ConfigError("boundary: direction count must be 1 or 2, got " +
                          std::to_string(directions.size()));
    }
    for (const auto &d : directions) {
        d.validate();
    }
}

BoundarySpec BoundarySpec::uniform(const DirectionBoundary &dir, std::size_t count) {
    return BoundarySpec{std::vector<DirectionBoundary>(count, dir)};
}

BasisSample CompactBasis::sample(int k, double x) const {
    if (k < 0 || k >= n_modes) {
        throw ContractViolation("CompactBasis::sample: mode index out of range");
    }
    const auto l0 = legendre(k, x);
    const auto l1 = legendre(k + 1, x);
    const auto l2 = legendre(k + 2, x);
    const double ak = a[k];
    const double bk = b[k];
    return {l0.value + ak * l1.value + bk * l2.value, l0.d1 + ak * l1.d1 + bk * l2.d1,
            l0.d2 + ak * l1.d2 + bk * l2.d2};
}

CompactBasis basis_coeffs(const DirectionBoundary &bc, int n_modes) {
    if (n_modes < 2) {
        throw ContractViolation("basis_coeffs: need at least 2 modes");
    }
    bc.validate();

    CompactBasis basis;
    basis.n_modes = n_modes;
    basis.boundary = bc;
    basis.a.assign(n_modes, 0.0);
    basis.b.assign(n_modes, 0.0);

    if (bc.is(BoundaryKind::dirichlet)) {
        for (int k = 0; k < n_modes; ++k) {
            basis.b[k] = -1.0;
        }
        return basis;
    }
    if (bc.is(BoundaryKind::neumann)) {
        for (int k = 0; k < n_modes; ++k) {
            const double kk = k;
            basis.b[k] = -kk * (kk + 1.0) / ((kk + 2.0) * (kk + 3.0));
        }
        return basis;
    }

    const auto conds = functionals(bc);
    for (int k = 0; k < n_modes; ++k) {
        // [g1(k+1) g1(k+2); g2(k+1) g2(k+2)] [a; b] = -[g1(k); g2(k)]
        const double m00 = conds[0].apply(k + 1), m01 = conds[0].apply(k + 2);
        const double m10 = conds[1].apply(k + 1), m11 = conds[1].apply(k + 2);
        const double r0 = -conds[0].apply(k), r1 = -conds[1].apply(k);
        const double det = m00 * m11 - m01 * m10;
        const double scale = std::abs(m00 * m11) + std::abs(m01 * m10);
        if (std::abs(det) <= 1e-14 * scale || det == 0.0) {
            throw BasisConstructionError("basis_coeffs: singular endpoint system at mode " +
                                         std::to_string(k));
        }
        basis.a[k] = (r0 * m11 - m01 * r1) / det;
        basis.b[k] = (m00 * r1 - r0 * m10) / det;
    }
    return basis;
}

} // namespace qspec::spectral
