#include "qspec/spectral/assembly.hpp"

#include <array>
#include <string>

#include "qspec/errors.hpp"

namespace qspec::spectral {

namespace {

constexpr int kQuadratureMargin = 4;

struct PdeName {
    PdeKind kind;
    std::string_view name;
};

constexpr std::array<PdeName, 8> kPdeNames{{{PdeKind::rd1d, "rd1d"},
                                            {PdeKind::helm1d, "helm1d"},
                                            {PdeKind::cd1d, "cd1d"},
                                            {PdeKind::wave1d, "wave1d"},
                                            {PdeKind::rd2d, "rd2d"},
                                            {PdeKind::helm2d, "helm2d"},
                                            {PdeKind::cd2d, "cd2d"},
                                            {PdeKind::joint_helm, "joint_helm"}}};

Eigen::MatrixXd stiffness_closed_form(const CompactBasis &basis) {
    const int n = basis.n_modes;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        s(k, k) = (4.0 * k + 6.0) * basis.b[k];
    }
    return s;
}

Eigen::MatrixXd mass_closed_form(const CompactBasis &basis) {
    const int n = basis.n_modes;
    const auto &a = basis.a;
    const auto &b = basis.b;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double kk = k;
        m(k, k) = 2.0 / (2 * kk + 1) + a[k] * a[k] * 2.0 / (2 * kk + 3) +
                  b[k] * b[k] * 2.0 / (2 * kk + 5);
        if (k + 1 < n) {
            m(k, k + 1) = a[k] * 2.0 / (2 * kk + 3) + a[k + 1] * b[k] * 2.0 / (2 * kk + 5);
            m(k + 1, k) = m(k, k + 1);
        }
        if (k + 2 < n) {
            m(k, k + 2) = b[k] * 2.0 / (2 * kk + 5);
            m(k + 2, k) = m(k, k + 2);
        }
    }
    return m;
}

Eigen::MatrixXd convection_closed_form(const CompactBasis &basis) {
    const int n = basis.n_modes;
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j + 1 < n; ++j) {
        r(j + 1, j) = 2.0;
        r(j, j + 1) = -2.0;
    }
    return r;
}

struct OneDirection {
    Eigen::MatrixXd stiffness;  // scaled by 1/h
    Eigen::MatrixXd mass;       // scaled by h
    Eigen::MatrixXd derivative; // operator of d/dx, R^T (Jacobian cancels)
};

OneDirection scaled_matrices(const CompactBasis &basis, const DomainMap &map) {
    const double h = map.half_length();
    return {assemble_1d(MatrixKind::stiffness, basis) / h, assemble_1d(MatrixKind::mass, basis) * h,
            assemble_1d(MatrixKind::convection, basis).transpose()};
}

[[noreturn]] void unsupported(PdeKind pde, const std::string &why) {
    throw ConfigError("assemble_system: unsupported configuration for " +
                      std::string(to_string(pde)) + ": " + why);
}

void require_directions(PdeKind pde, const BoundarySpec &bc, std::size_t count) {
    if (bc.direction_count() != count) {
        unsupported(pde, "expected " + std::to_string(count) + " boundary direction(s)");
    }
}

void require_spatial(PdeKind pde, const DirectionBoundary &dir, bool dirichlet_only) {
    if (dir.temporal || dir.is(BoundaryKind::initial_value)) {
        unsupported(pde, "initial_value conditions are only valid for wave1d time");
    }
    if (dirichlet_only && !dir.is(BoundaryKind::dirichlet)) {
        unsupported(pde, "convection terms require homogeneous Dirichlet conditions");
    }
}

} // namespace

std::string_view to_string(PdeKind pde) noexcept {
    for (const auto &p : kPdeNames) {
        if (p.kind == pde) {
            return p.name;
        }
    }
    return "unknown";
}

PdeKind parse_pde(std::string_view name) {
    for (const auto &p : kPdeNames) {
        if (p.name == name) {
            return p.kind;
        }
    }
    throw ConfigError("unknown pde '" + std::string(name) + "'");
}

Eigen::MatrixXd assemble_1d_by_quadrature(MatrixKind kind, const CompactBasis &basis) {
    const int n = basis.n_modes;
    const auto rule = lgl_rule(n + kQuadratureMargin);
    const auto nq = static_cast<Eigen::Index>(rule.size());
    Eigen::MatrixXd phi(n, nq), dphi(n, nq), ddphi(n, nq);
    for (int k = 0; k < n; ++k) {
        for (Eigen::Index q = 0; q < nq; ++q) {
            const auto s = basis.sample(k, rule.nodes[q]);
            phi(k, q) = s.value;
            dphi(k, q) = s.d1;
            ddphi(k, q) = s.d2;
        }
    }
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), nq);
    const Eigen::MatrixXd weighted = phi * w.asDiagonal();
    switch (kind) {
    case MatrixKind::stiffness:
        return weighted * ddphi.transpose();
    case MatrixKind::mass:
        return weighted * phi.transpose();
    case MatrixKind::convection:
        return dphi * w.asDiagonal() * phi.transpose();
    }
    throw ContractViolation("assemble_1d: unknown matrix kind");
}

Eigen::MatrixXd assemble_1d(MatrixKind kind, const CompactBasis &basis) {
    const bool dirichlet = basis.boundary.is(BoundaryKind::dirichlet);
    const bool neumann = basis.boundary.is(BoundaryKind::neumann);
    switch (kind) {
    case MatrixKind::stiffness:
        if (dirichlet || neumann) {
            return stiffness_closed_form(basis);
        }
        break;
    case MatrixKind::mass:
        if (dirichlet || neumann) {
            return mass_closed_form(basis);
        }
        break;
    case MatrixKind::convection:
        if (dirichlet) {
            return convection_closed_form(basis);
        }
        break;
    }
    return assemble_1d_by_quadrature(kind, basis);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd &outer, const Eigen::MatrixXd &inner) {
    const Eigen::Index ir = inner.rows(), ic = inner.cols();
    Eigen::MatrixXd out(outer.rows() * ir, outer.cols() * ic);
    for (Eigen::Index i = 0; i < outer.rows(); ++i) {
        for (Eigen::Index j = 0; j < outer.cols(); ++j) {
            out.block(i * ir, j * ic, ir, ic) = outer(i, j) * inner;
        }
    }
    return out;
}

std::size_t SpectralSystem::grid_size() const noexcept {
    std::size_t total = 1;
    for (std::size_t d = 0; d < bases.size(); ++d) {
        total *= quadrature.size();
    }
    return total;
}

std::vector<double> SpectralSystem::grid_weights() const {
    const std::size_t nq = quadrature.size();
    std::vector<double> w;
    w.reserve(grid_size());
    if (dimension() == 1) {
        const double h = domains[0].half_length();
        for (double wi : quadrature.weights) {
            w.push_back(wi * h);
        }
        return w;
    }
    const double hx = domains[0].half_length();
    const double hy = domains[1].half_length();
    for (std::size_t iy = 0; iy < nq; ++iy) {
        for (std::size_t ix = 0; ix < nq; ++ix) {
            w.push_back(quadrature.weights[ix] * hx * quadrature.weights[iy] * hy);
        }
    }
    return w;
}

std::vector<std::array<double, 2>> SpectralSystem::grid_points() const {
    const std::size_t nq = quadrature.size();
    std::vector<std::array<double, 2>> pts;
    pts.reserve(grid_size());
    if (dimension() == 1) {
        for (double x : quadrature.nodes) {
            pts.push_back({domains[0].to_physical(x), 0.0});
        }
        return pts;
    }
    for (std::size_t iy = 0; iy < nq; ++iy) {
        for (std::size_t ix = 0; ix < nq; ++ix) {
            pts.push_back({domains[0].to_physical(quadrature.nodes[ix]),
                           domains[1].to_physical(quadrature.nodes[iy])});
        }
    }
    return pts;
}

Eigen::MatrixXd SpectralSystem::operator_at(double wave_number_sq) const {
    if (parametric) {
        return parametric->at(wave_number_sq);
    }
    return A;
}

SpectralSystem assemble_system(PdeKind pde, const PdeParams &params, const BoundarySpec &bc,
                               int n_modes) {
    bc.validate();
    SpectralSystem sys;
    sys.pde = pde;
    sys.params = params;
    sys.quadrature = lgl_rule(n_modes + kQuadratureMargin);

    int dim = 1;
    switch (pde) {
    case PdeKind::rd1d:
    case PdeKind::helm1d:
    case PdeKind::cd1d:
        dim = 1;
        break;
    case PdeKind::rd2d:
    case PdeKind::helm2d:
    case PdeKind::cd2d:
    case PdeKind::wave1d:
        dim = 2;
        break;
    case PdeKind::joint_helm:
        if (params.joint_dimension != 1 && params.joint_dimension != 2) {
            unsupported(pde, "joint dimension must be 1 or 2");
        }
        dim = params.joint_dimension;
        break;
    }
    require_directions(pde, bc, static_cast<std::size_t>(dim));

    const bool convective = pde == PdeKind::cd1d || pde == PdeKind::cd2d;
    if (pde == PdeKind::wave1d) {
        require_spatial(pde, bc.directions[0], true);
        if (!bc.directions[1].is(BoundaryKind::initial_value)) {
            unsupported(pde, "time direction needs initial_value conditions");
        }
        if (!(params.wave_horizon > 0.0)) {
            unsupported(pde, "wave horizon must be positive");
        }
        sys.domains = {DomainMap{0.0, 1.0}, DomainMap{0.0, params.wave_horizon}};
    } else {
        for (const auto &dir : bc.directions) {
            require_spatial(pde, dir, convective);
        }
        sys.domains.assign(static_cast<std::size_t>(dim), DomainMap{});
    }

    for (int d = 0; d < dim; ++d) {
        sys.bases.push_back(basis_coeffs(bc.directions[d], n_modes));
    }

    std::vector<OneDirection> m;
    for (int d = 0; d < dim; ++d) {
        m.push_back(scaled_matrices(sys.bases[d], sys.domains[d]));
    }

    const double eps = params.epsilon;
    const double k2 = params.wave_number_sq;
    switch (pde) {
    case PdeKind::rd1d:
        sys.A = -eps * m[0].stiffness + m[0].mass;
        break;
    case PdeKind::helm1d:
        sys.A = m[0].stiffness + k2 * m[0].mass;
        break;
    case PdeKind::cd1d:
        sys.A = -eps * m[0].stiffness + params.nu * m[0].derivative;
        break;
    case PdeKind::rd2d:
        sys.A = -eps * (kron(m[1].stiffness, m[0].mass) + kron(m[1].mass, m[0].stiffness)) +
                kron(m[1].mass, m[0].mass);
        break;
    case PdeKind::helm2d:
        sys.A = kron(m[1].stiffness, m[0].mass) + kron(m[1].mass, m[0].stiffness) +
                k2 * kron(m[1].mass, m[0].mass);
        break;
    case PdeKind::cd2d:
        sys.A = -eps * (kron(m[1].stiffness, m[0].mass) + kron(m[1].mass, m[0].stiffness)) +
                params.nu * kron(m[1].mass, m[0].derivative) +
                params.nu_y * kron(m[1].derivative, m[0].mass);
        break;
    case PdeKind::wave1d:
        // u_tt - u_xx with time as the outer (slow) index.
        sys.A = kron(m[1].stiffness, m[0].mass) - kron(m[1].mass, m[0].stiffness);
        break;
    case PdeKind::joint_helm: {
        ParametricParts parts;
        if (dim == 1) {
            parts.B = m[0].stiffness;
            parts.C = m[0].mass;
        } else {
            parts.B = kron(m[1].stiffness, m[0].mass) + kron(m[1].mass, m[0].stiffness);
            parts.C = kron(m[1].mass, m[0].mass);
        }
        sys.A = parts.at(k2);
        sys.parametric = std::move(parts);
        break;
    }
    }
    return sys;
}

} // namespace qspec::spectral
