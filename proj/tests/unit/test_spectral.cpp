#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qspec/errors.hpp"
#include "qspec/spectral/assembly.hpp"
#include "qspec/spectral/legendre.hpp"
#include "qspec/spectral/quadrature.hpp"
#include "qspec/spectral/solve.hpp"
#include "qspec/spectral/transform.hpp"

using namespace qspec;
using namespace qspec::spectral;

namespace {

constexpr double pi = std::numbers::pi;

// Direct polynomial forms of the first Legendre polynomials.
double legendre_closed(int n, double x) {
    switch (n) {
    case 0:
        return 1.0;
    case 1:
        return x;
    case 2:
        return 0.5 * (3 * x * x - 1);
    case 3:
        return 0.5 * (5 * x * x * x - 3 * x);
    case 4:
        return (35 * std::pow(x, 4) - 30 * x * x + 3) / 8.0;
    default:
        return NAN;
    }
}

SpectralSystem system_1d(PdeKind pde, const DirectionBoundary &bc, int N, PdeParams p = {}) {
    return assemble_system(pde, p, BoundarySpec::uniform(bc, 1), N);
}

std::vector<double> sample(const SpectralSystem &sys, double (*f)(double, double)) {
    std::vector<double> out;
    for (const auto &pt : sys.grid_points()) {
        out.push_back(f(pt[0], pt[1]));
    }
    return out;
}

} // namespace

TEST(Legendre, LowDegreeValues) {
    EXPECT_DOUBLE_EQ(legendre(0, 0.3).value, 1.0);
    EXPECT_DOUBLE_EQ(legendre(1, -0.5).value, -0.5);
    EXPECT_NEAR(legendre(2, 0.5).value, -0.125, 1e-15);
    for (int n = 0; n <= 4; ++n) {
        for (double x : {-1.0, -0.7, 0.0, 0.2, 0.9, 1.0}) {
            EXPECT_NEAR(legendre(n, x).value, legendre_closed(n, x), 1e-14) << n << " " << x;
        }
    }
}

TEST(Legendre, DerivativesMatchFiniteDifferences) {
    const double h = 1e-5;
    for (int n = 0; n <= 12; ++n) {
        for (double x : {-0.8, -0.1, 0.35, 0.77}) {
            const auto s = legendre(n, x);
            const double d1 = (legendre(n, x + h).value - legendre(n, x - h).value) / (2 * h);
            const double d2 = (legendre(n, x + h).d1 - legendre(n, x - h).d1) / (2 * h);
            EXPECT_NEAR(s.d1, d1, 1e-7 * (1 + std::abs(d1)));
            EXPECT_NEAR(s.d2, d2, 1e-6 * (1 + std::abs(d2)));
        }
    }
}

TEST(Legendre, EndpointDerivatives) {
    for (int n = 0; n <= 20; ++n) {
        const double dp = n * (n + 1) / 2.0;
        EXPECT_NEAR(legendre(n, 1.0).d1, dp, 1e-10);
        EXPECT_NEAR(legendre(n, -1.0).d1, (n % 2 ? 1.0 : -1.0) * dp, 1e-10);
        EXPECT_NEAR(legendre(n, -1.0).value, n % 2 ? -1.0 : 1.0, 1e-14);
    }
}

TEST(Legendre, RejectsOutOfRange) {
    const std::vector<double> bad{0.0, 1.5};
    EXPECT_THROW((void)legendre_eval(2, bad), ContractViolation);
    EXPECT_THROW((void)legendre(-1, 0.0), ContractViolation);
}

TEST(Quadrature, SmallOrders) {
    const auto r1 = lgl_rule(1);
    ASSERT_EQ(r1.size(), 2u);
    EXPECT_DOUBLE_EQ(r1.nodes[0], -1.0);
    EXPECT_DOUBLE_EQ(r1.weights[0], 1.0);
    EXPECT_DOUBLE_EQ(r1.weights[1], 1.0);

    const auto r2 = lgl_rule(2);
    ASSERT_EQ(r2.size(), 3u);
    EXPECT_NEAR(r2.nodes[1], 0.0, 1e-16);
    EXPECT_NEAR(r2.weights[0], 1.0 / 3, 1e-15);
    EXPECT_NEAR(r2.weights[1], 4.0 / 3, 1e-15);
    EXPECT_NEAR(r2.weights[2], 1.0 / 3, 1e-15);
}

TEST(Quadrature, IntegratesMonomialsExactly) {
    for (int order = 1; order <= 40; ++order) {
        const auto r = lgl_rule(order);
        EXPECT_DOUBLE_EQ(r.nodes.front(), -1.0);
        EXPECT_DOUBLE_EQ(r.nodes.back(), 1.0);
        double wsum = 0.0;
        for (double w : r.weights) {
            EXPECT_GT(w, 0.0);
            wsum += w;
        }
        EXPECT_NEAR(wsum, 2.0, 1e-13);
        for (int p = 0; p <= 2 * order - 1; ++p) {
            double q = 0.0;
            for (std::size_t j = 0; j < r.size(); ++j) {
                q += r.weights[j] * std::pow(r.nodes[j], p);
            }
            const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
            EXPECT_NEAR(q, exact, 1e-12) << "order " << order << " p " << p;
        }
    }
}

TEST(Basis, DirichletAndNeumannClosedForms) {
    const auto d = basis_coeffs(DirectionBoundary::dirichlet(), 8);
    for (int k = 0; k < 8; ++k) {
        EXPECT_EQ(d.a[k], 0.0);
        EXPECT_EQ(d.b[k], -1.0);
    }
    const auto n = basis_coeffs(DirectionBoundary::neumann(), 8);
    EXPECT_NEAR(n.b[1], -1.0 / 6.0, 1e-15);
    for (int k = 0; k < 8; ++k) {
        EXPECT_EQ(n.a[k], 0.0);
        EXPECT_NEAR(n.b[k], -double(k * (k + 1)) / ((k + 2) * (k + 3)), 1e-15);
    }
}

TEST(Basis, InitialValueSolvesEndpointSystem) {
    // phi(-1) = 1 - a + b = 0 and phi'(-1) = 0 + a - 3b = 0 give a = 3/2, b = 1/2.
    const auto iv = basis_coeffs(DirectionBoundary::initial_value(), 4);
    EXPECT_NEAR(iv.a[0], 1.5, 1e-14);
    EXPECT_NEAR(iv.b[0], 0.5, 1e-14);
    EXPECT_NEAR(1.0 - iv.a[0] + iv.b[0], 0.0, 1e-14);
    EXPECT_NEAR(iv.a[0] - 3.0 * iv.b[0], 0.0, 1e-14);
}

TEST(Basis, EndpointResiduals) {
    const std::vector<DirectionBoundary> kinds{
        DirectionBoundary::dirichlet(), DirectionBoundary::neumann(),
        DirectionBoundary::initial_value(),
        {EndpointCondition::mixed(1.0, 2.0), EndpointCondition::mixed(1.0, -0.5), false},
        {EndpointCondition::dirichlet(), EndpointCondition::neumann(), false}};
    for (const auto &bc : kinds) {
        const auto basis = basis_coeffs(bc, 24);
        for (int k = 0; k < 24; ++k) {
            const auto l = basis.sample(k, -1.0);
            const auto r = basis.sample(k, 1.0);
            if (bc.is(BoundaryKind::initial_value)) {
                EXPECT_NEAR(l.value, 0.0, 1e-12);
                EXPECT_NEAR(l.d1, 0.0, 1e-12);
                continue;
            }
            auto resid = [](const EndpointCondition &c, const BasisSample &s) {
                switch (c.kind) {
                case BoundaryKind::dirichlet:
                    return s.value;
                case BoundaryKind::neumann:
                    return s.d1;
                default:
                    return c.value_weight * s.value + c.slope_weight * s.d1;
                }
            };
            EXPECT_NEAR(resid(bc.left, l), 0.0, 1e-12) << k;
            EXPECT_NEAR(resid(bc.right, r), 0.0, 1e-12) << k;
        }
    }
}

TEST(Basis, DegenerateMixedThrows) {
    // u(-1) = 0 and u(1) + u'(1) ... choose weights that make k=0 singular:
    // a mixed pair with vanishing weights admits no unique solve.
    DirectionBoundary bad{EndpointCondition::mixed(0.0, 0.0), EndpointCondition::mixed(0.0, 0.0),
                          false};
    EXPECT_THROW((void)basis_coeffs(bad, 4), std::exception);
    EXPECT_THROW((void)basis_coeffs(DirectionBoundary::dirichlet(), 1), ContractViolation);
}

TEST(Assembly, ClosedFormEntries) {
    const auto d = basis_coeffs(DirectionBoundary::dirichlet(), 6);
    const auto S = assemble_1d(MatrixKind::stiffness, d);
    const auto M = assemble_1d(MatrixKind::mass, d);
    const auto R = assemble_1d(MatrixKind::convection, d);
    EXPECT_DOUBLE_EQ(S(0, 0), -6.0);
    EXPECT_NEAR(M(0, 0), 2.4, 1e-15);
    EXPECT_NEAR(R(1, 0), 2.0, 1e-14);
    EXPECT_NEAR(R(0, 1), -2.0, 1e-14);
}

TEST(Assembly, StructureAndQuadratureAgreement) {
    for (const auto &bc : {DirectionBoundary::dirichlet(), DirectionBoundary::neumann()}) {
        const auto basis = basis_coeffs(bc, 12);
        for (auto kind : {MatrixKind::stiffness, MatrixKind::mass, MatrixKind::convection}) {
            const auto closed = assemble_1d(kind, basis);
            const auto quad = assemble_1d_by_quadrature(kind, basis);
            EXPECT_LE((closed - quad).norm(), 1e-11 * (1 + closed.norm()));
        }
        const auto S = assemble_1d(MatrixKind::stiffness, basis);
        const auto M = assemble_1d(MatrixKind::mass, basis);
        for (int i = 0; i < 12; ++i) {
            for (int j = 0; j < 12; ++j) {
                if (i != j) {
                    EXPECT_EQ(S(i, j), 0.0);
                }
                EXPECT_DOUBLE_EQ(M(i, j), M(j, i));
                if (std::abs(i - j) > 2) {
                    EXPECT_EQ(M(i, j), 0.0);
                }
            }
        }
    }
    const auto R = assemble_1d(MatrixKind::convection,
                               basis_coeffs(DirectionBoundary::dirichlet(), 12));
    EXPECT_LE((R + R.transpose()).norm(), 1e-13);
}

TEST(Assembly, SystemExamples) {
    const auto rd = system_1d(PdeKind::rd1d, DirectionBoundary::dirichlet(), 2);
    EXPECT_NEAR(rd.A(0, 0), 3.0, 1e-14);

    PdeParams p;
    p.wave_number_sq = 0.0;
    const auto h0 = system_1d(PdeKind::helm1d, DirectionBoundary::dirichlet(), 8, p);
    const auto S = assemble_1d(MatrixKind::stiffness, h0.bases[0]);
    EXPECT_EQ((h0.A - S).norm(), 0.0);

    const auto joint = system_1d(PdeKind::joint_helm, DirectionBoundary::dirichlet(), 8);
    ASSERT_TRUE(joint.parametric.has_value());
    const auto M = assemble_1d(MatrixKind::mass, joint.bases[0]);
    EXPECT_EQ((joint.operator_at(4.0) - (S + 4.0 * M)).norm(), 0.0);
}

TEST(Assembly, ParametricSplitRandomK) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> k2(4.0, 4.05);
    for (int d : {1, 2}) {
        PdeParams p;
        p.joint_dimension = d;
        const auto sys = assemble_system(PdeKind::joint_helm, p,
                                         BoundarySpec::uniform(DirectionBoundary::dirichlet(), d),
                                         d == 1 ? 16 : 8);
        for (int s = 0; s < 50; ++s) {
            const double k = k2(rng);
            PdeParams q = p;
            q.wave_number_sq = k;
            const auto helm = assemble_system(
                d == 1 ? PdeKind::helm1d : PdeKind::helm2d, q,
                BoundarySpec::uniform(DirectionBoundary::dirichlet(), d), d == 1 ? 16 : 8);
            EXPECT_LE((sys.parametric->at(k) - helm.A).norm(), 1e-12);
        }
    }
}

TEST(Assembly, UnsupportedCombinationsThrow) {
    EXPECT_THROW((void)system_1d(PdeKind::cd1d, DirectionBoundary::neumann(), 8), ConfigError);
    EXPECT_THROW((void)system_1d(PdeKind::rd1d, DirectionBoundary::initial_value(), 8),
                 ConfigError);
}

TEST(Transform, ZeroAndMassColumn) {
    const auto sys = system_1d(PdeKind::rd1d, DirectionBoundary::dirichlet(), 6);
    std::vector<double> zero(sys.grid_size(), 0.0);
    const auto F0 = forward_transform(sys, zero);
    EXPECT_EQ(F0.norm, 0.0);
    EXPECT_EQ(F0.coefficients.norm(), 0.0);

    std::vector<double> phi0;
    for (const auto &pt : sys.grid_points()) {
        phi0.push_back(sys.bases[0].value(0, pt[0]));
    }
    const auto F = forward_transform(sys, phi0);
    EXPECT_NEAR(F.coefficients(0), 2.4, 1e-13);
    EXPECT_NEAR(F.coefficients(1), 0.0, 1e-13);
    EXPECT_NEAR(F.coefficients(2), -0.4, 1e-13);

    PdeParams p;
    const auto sys2 = assemble_system(PdeKind::rd2d, p,
                                      BoundarySpec::uniform(DirectionBoundary::dirichlet(), 2), 4);
    std::vector<double> zero2(sys2.grid_size(), 0.0);
    EXPECT_EQ(forward_transform(sys2, zero2).norm, 0.0);

    std::vector<double> wrong(3, 1.0);
    EXPECT_THROW((void)forward_transform(sys, wrong), ContractViolation);
}

TEST(Solve, ManufacturedHelmholtzConverges) {
    double prev = 1.0;
    for (int N : {8, 16, 32}) {
        const auto sys = system_1d(PdeKind::helm1d, DirectionBoundary::dirichlet(), N);
        const auto f = sample(sys, [](double x, double) { return (4 - pi * pi) * std::sin(pi * x); });
        const auto u = sample(sys, [](double x, double) { return std::sin(pi * x); });
        const auto sol = classical_solve(sys, forward_transform(sys, f).coefficients);
        const auto m = metrics(sol.nodal_values, u, sys.grid_weights());
        EXPECT_LT(m.rel_l2, prev);
        prev = m.rel_l2;
        if (N == 32) {
            EXPECT_LE(m.rel_l2, 1e-8);
            EXPECT_LE(m.rel_linf, 1e-8);
        }
    }
}

TEST(Solve, ManufacturedReactionDiffusion) {
    const auto sys = system_1d(PdeKind::rd1d, DirectionBoundary::dirichlet(), 32);
    const auto f =
        sample(sys, [](double x, double) { return (0.1 * pi * pi + 1) * std::sin(pi * x); });
    const auto u = sample(sys, [](double x, double) { return std::sin(pi * x); });
    const auto sol = classical_solve(sys, forward_transform(sys, f).coefficients);
    EXPECT_LE(metrics(sol.nodal_values, u, sys.grid_weights()).rel_l2, 1e-8);
}

TEST(Solve, ManufacturedConvectionDiffusion) {
    // -eps u'' + nu u' with u = sin(pi x): f = eps pi^2 sin + nu pi cos.
    const auto sys = system_1d(PdeKind::cd1d, DirectionBoundary::dirichlet(), 32);
    const auto f = sample(sys, [](double x, double) {
        return 0.1 * pi * pi * std::sin(pi * x) + pi * std::cos(pi * x);
    });
    const auto u = sample(sys, [](double x, double) { return std::sin(pi * x); });
    const auto sol = classical_solve(sys, forward_transform(sys, f).coefficients);
    EXPECT_LE(metrics(sol.nodal_values, u, sys.grid_weights()).rel_l2, 1e-8);
}

TEST(Solve, ManufacturedTwoDimensional) {
    PdeParams p;
    const auto bc = BoundarySpec::uniform(DirectionBoundary::dirichlet(), 2);
    const auto u = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
    struct Case {
        PdeKind pde;
        double (*f)(double, double);
    };
    const Case cases[] = {
        {PdeKind::rd2d,
         [](double x, double y) {
             return (0.2 * pi * pi + 1) * std::sin(pi * x) * std::sin(pi * y);
         }},
        {PdeKind::helm2d,
         [](double x, double y) {
             return (4 - 2 * pi * pi) * std::sin(pi * x) * std::sin(pi * y);
         }},
        {PdeKind::cd2d,
         [](double x, double y) {
             const double sx = std::sin(pi * x), sy = std::sin(pi * y);
             return 0.2 * pi * pi * sx * sy + pi * std::cos(pi * x) * sy +
                    pi * sx * std::cos(pi * y);
         }},
    };
    for (const auto &c : cases) {
        const auto sys = assemble_system(c.pde, p, bc, 24);
        const auto sol = classical_solve(sys, forward_transform(sys, sample(sys, c.f)).coefficients);
        std::vector<double> truth;
        for (const auto &pt : sys.grid_points()) {
            truth.push_back(u(pt[0], pt[1]));
        }
        EXPECT_LE(metrics(sol.nodal_values, truth, sys.grid_weights()).rel_l2, 1e-8)
            << to_string(c.pde);
    }
}

TEST(Solve, ManufacturedWave) {
    // u = t^2/2 [sin(pi(1+w)x) + sin(pi(1-w)x)] has u(x,0) = u_t(x,0) = 0 and
    // vanishes at x = 0, 1 for integer w; it solves u_tt - u_xx = f with the
    // wave-family forcing.
    const double w = 1.0;
    PdeParams p;
    BoundarySpec bc{{DirectionBoundary::dirichlet(), DirectionBoundary::initial_value()}};
    const auto sys = assemble_system(PdeKind::wave1d, p, bc, 20);
    std::vector<double> f, truth;
    for (const auto &pt : sys.grid_points()) {
        const double x = pt[0], t = pt[1];
        const double a = pi * (1 + w), b = pi * (1 - w);
        f.push_back((1 + a * a * t * t / 2) * std::sin(a * x) + (1 + b * b * t * t / 2) * std::sin(b * x));
        truth.push_back(0.5 * t * t * (std::sin(a * x) + std::sin(b * x)));
    }
    const auto sol = classical_solve(sys, forward_transform(sys, f).coefficients);
    EXPECT_LE(metrics(sol.nodal_values, truth, sys.grid_weights()).rel_l2, 1e-8);
}

TEST(Solve, IdentityAndSingular) {
    const auto sys = system_1d(PdeKind::rd1d, DirectionBoundary::dirichlet(), 4);
    const Eigen::VectorXd F = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
    const auto sol = classical_solve(sys, Eigen::MatrixXd::Identity(4, 4), F);
    EXPECT_EQ((sol.coefficients - F).norm(), 0.0);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(4, 4);
    Z(0, 0) = 1.0;
    try {
        (void)dense_solve(Z, F);
        FAIL() << "expected SingularSystemError";
    } catch (const SingularSystemError &e) {
        EXPECT_GT(e.condition_estimate(), 1e14);
    }
}

TEST(Solve, RoundTripNodalValues) {
    const auto sys = system_1d(PdeKind::helm1d, DirectionBoundary::neumann(), 16);
    Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(16, -1.0, 1.0);
    const auto field = make_solution_field(sys, c);
    const auto pts = sys.grid_points();
    for (std::size_t j = 0; j < pts.size(); ++j) {
        double v = 0.0;
        for (int k = 0; k < 16; ++k) {
            v += c(k) * sys.bases[0].value(k, pts[j][0]);
        }
        EXPECT_NEAR(field.nodal_values[j], v, 1e-10);
    }
}

TEST(Metrics, Examples) {
    const auto sys = system_1d(PdeKind::rd1d, DirectionBoundary::dirichlet(), 8);
    const auto truth = sample(sys, [](double x, double) { return std::sin(pi * x); });
    const auto w = sys.grid_weights();
    const auto same = metrics(truth, truth, w);
    EXPECT_EQ(same.mae, 0.0);
    EXPECT_EQ(same.rel_l2, 0.0);
    EXPECT_EQ(same.rel_linf, 0.0);

    std::vector<double> twice, shifted;
    for (double t : truth) {
        twice.push_back(2 * t);
        shifted.push_back(t + 0.25);
    }
    const auto m2 = metrics(twice, truth, w);
    EXPECT_NEAR(m2.rel_l2, 1.0, 1e-14);
    EXPECT_NEAR(m2.rel_linf, 1.0, 1e-14);
    EXPECT_NEAR(metrics(shifted, truth, w).mae, 0.25, 1e-15);

    std::vector<double> zero(truth.size(), 0.0);
    EXPECT_THROW((void)metrics(truth, zero, w), DivisionGuardError);
}

TEST(Export, MatrixCsv) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.1, -2.5, 1.0 / 3.0;
    std::ostringstream os;
    write_matrix_csv(os, m);
    EXPECT_EQ(os.str(), "1,0.10000000000000001\n-2.5,0.33333333333333331\n");
}
