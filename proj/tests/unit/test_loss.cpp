#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qspec/errors.hpp"
#include "qspec/loss/loss.hpp"
#include "qspec/spectral/assembly.hpp"
#include "qspec/spectral/transform.hpp"

using namespace qspec;
using namespace qspec::loss;
using qsim::StateVector;

namespace {

constexpr double pi = std::numbers::pi;

StateVector state_of(const Eigen::VectorXd &v) {
    StateVector s;
    s.n_qubits = static_cast<int>(std::log2(static_cast<double>(v.size())));
    s.amplitudes = v.cast<cplx>();
    return s;
}

Eigen::VectorXd unit(int dim, int k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e(k) = 1.0;
    return e;
}

Eigen::VectorXd random_unit(std::mt19937_64 &rng, int dim) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
        v(i) = g(rng);
    }
    return v.normalized();
}

Eigen::MatrixXd random_matrix(std::mt19937_64 &rng, int dim) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            m(i, j) = g(rng);
        }
    }
    return m + dim * Eigen::MatrixXd::Identity(dim, dim);
}

spectral::SpectralSystem helm(int N, int d = 1, spectral::PdeKind pde = spectral::PdeKind::joint_helm) {
    spectral::PdeParams p;
    p.joint_dimension = d;
    return assemble_system(pde, p,
                           spectral::BoundarySpec::uniform(spectral::DirectionBoundary::dirichlet(), d),
                           N);
}

} // namespace

TEST(Loss, IdentityExamples) {
    const auto F = unit(2, 0);
    const auto I = Eigen::MatrixXd::Identity(2, 2);
    const auto ctx = LossContext::direct(I, {F});
    const std::vector<StateVector> same{state_of(F)};
    const std::vector<StateVector> flipped{state_of(-F)};
    EXPECT_NEAR(loss_phase_aware(ctx, same).total, 0.0, 1e-15);
    const auto pa = loss_phase_aware(ctx, flipped);
    EXPECT_NEAR(pa.total, 2.0, 1e-15);
    EXPECT_NEAR(pa.gamma[0], -1.0, 1e-15);
    EXPECT_NEAR(pa.beta[0], 1.0, 1e-15);
    EXPECT_NEAR(loss_unnormalized(ctx, same).total, 0.0, 1e-15);
    EXPECT_NEAR(loss_unnormalized(ctx, flipped).total, 4.0, 1e-14);
    EXPECT_NEAR(loss_vqls_standard(ctx, same).total, 0.0, 1e-15);
    EXPECT_NEAR(loss_vqls_standard(ctx, flipped).total, 0.0, 1e-15);

    const auto ctx2 = LossContext::direct(Eigen::MatrixXd(2.0 * I), {F});
    const auto two = loss_phase_aware(ctx2, same);
    EXPECT_NEAR(two.total, 0.0, 1e-15);
    EXPECT_NEAR(two.gamma[0], 2.0, 1e-15);
    EXPECT_NEAR(two.beta[0], 4.0, 1e-14);
}

TEST(Loss, DenseOracles) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::MatrixXd A = random_matrix(rng, 4);
        const Eigen::VectorXd F = random_unit(rng, 4) * 3.0;
        const Eigen::VectorXd a = random_unit(rng, 4);
        const auto ctx = LossContext::direct(A, {F});
        const std::vector<StateVector> s{state_of(a)};
        const Eigen::VectorXd Fu = F.normalized();
        const double g = Fu.dot(A * a);
        const double nrm = (A * a).norm();
        EXPECT_NEAR(loss_unnormalized(ctx, s).total, (g - nrm) * (g - nrm), 1e-10);
        EXPECT_NEAR(loss_phase_aware(ctx, s).total, 1 - g / nrm, 1e-10);
        EXPECT_NEAR(loss_vqls_standard(ctx, s).total, 1 - g * g / (nrm * nrm), 1e-10);
    }
}

TEST(Loss, SignFlipIdentities) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10000; ++trial) {
        const Eigen::MatrixXd A = random_matrix(rng, 4);
        const auto ctx = LossContext::direct(A, {random_unit(rng, 4)});
        const Eigen::VectorXd a = random_unit(rng, 4);
        const std::vector<StateVector> p{state_of(a)}, m{state_of(-a)};
        const double pa = loss_phase_aware(ctx, p).total;
        EXPECT_NEAR(loss_phase_aware(ctx, m).total, 2.0 - pa, 1e-12);
        EXPECT_NEAR(loss_vqls_standard(ctx, m).total, loss_vqls_standard(ctx, p).total, 1e-12);
        EXPECT_GE(pa, -1e-12);
        EXPECT_LE(pa, 2.0 + 1e-12);
    }
}

TEST(Loss, OptimumAtExactSolution) {
    const auto sys = helm(16, 1, spectral::PdeKind::helm1d);
    std::vector<double> f;
    for (const auto &pt : sys.grid_points()) {
        f.push_back(std::sin(pi * pt[0]) + 0.3 * std::cos(2 * pt[0]));
    }
    const Eigen::VectorXd F = spectral::forward_transform(sys, f).coefficients;
    const Eigen::VectorXd alpha = sys.A.partialPivLu().solve(F);
    const auto ctx = LossContext::direct(sys.A, {F});
    const std::vector<StateVector> s{state_of(alpha.normalized())};
    EXPECT_NEAR(loss_phase_aware(ctx, s).total, 0.0, 1e-10);
    EXPECT_NEAR(loss_unnormalized(ctx, s).total, 0.0, 1e-10);

    const auto rec = recover_solution(s[0], ctx, 0);
    EXPECT_LE((rec.coefficients - alpha).norm(), 1e-10 * alpha.norm());
    EXPECT_FALSE(rec.phase_warning);
}

TEST(Loss, RecoverExamples) {
    const auto I = Eigen::MatrixXd::Identity(4, 4);
    const auto ctx = LossContext::direct(Eigen::MatrixXd(2.0 * I), {Eigen::VectorXd(2.0 * unit(4, 0))});
    const auto r = recover_solution(state_of(unit(4, 0)), ctx, 0);
    EXPECT_NEAR(r.scale, 1.0, 1e-15);
    EXPECT_NEAR(r.coefficients(0), 1.0, 1e-15);

    const auto ctx3 = LossContext::direct(Eigen::MatrixXd(I), {Eigen::VectorXd(3.0 * unit(4, 2))});
    const auto r3 = recover_solution(state_of(unit(4, 2)), ctx3, 0);
    EXPECT_NEAR(r3.coefficients(2), 3.0, 1e-15);

    StateVector phased = state_of(unit(4, 2));
    phased.amplitudes *= std::polar(1.0, 0.1);
    EXPECT_TRUE(recover_solution(phased, ctx3, 0).phase_warning);
}

TEST(Loss, DegenerateDenominator) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1.0;
    const auto ctx = LossContext::direct(A, {unit(2, 0)});
    const std::vector<StateVector> s{state_of(unit(2, 1))};
    EXPECT_THROW((void)loss_phase_aware(ctx, s), DegenerateDenominatorError);
}

TEST(Loss, ParametricMatchesDirect) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> kd(4.0, 5.0);
    const auto sys = helm(16);
    const auto &S = sys.parametric->B;
    const auto &M = sys.parametric->C;
    for (int trial = 0; trial < 50; ++trial) {
        const double k2 = kd(rng);
        const Eigen::VectorXd F = random_unit(rng, 16);
        const auto pctx = LossContext::parametric(S, M, {F}, {k2});
        const auto dctx = LossContext::direct(Eigen::MatrixXd(S + k2 * M), {F});
        const std::vector<StateVector> s{state_of(random_unit(rng, 16))};
        const std::vector<double> k{k2};
        EXPECT_NEAR(loss_parametric(pctx, s, k).total, loss_phase_aware(dctx, s).total, 1e-10);
        EXPECT_NEAR(loss_phase_aware(pctx, s).total, loss_phase_aware(dctx, s).total, 1e-10);
    }
    // k = 0 reduces to A = S.
    const Eigen::VectorXd F = random_unit(rng, 16);
    const auto pctx = LossContext::parametric(S, M, {F}, {0.0});
    const auto sctx = LossContext::direct(S, {F});
    const std::vector<StateVector> s{state_of(random_unit(rng, 16))};
    EXPECT_NEAR(loss_parametric(pctx, s, std::vector<double>{0.0}).total,
                loss_phase_aware(sctx, s).total, 1e-12);

    // 2D joint Helmholtz at k^2 = 4.03.
    const auto s2 = helm(8, 2);
    const Eigen::VectorXd F2 = random_unit(rng, 64);
    const auto p2 = LossContext::parametric(s2.parametric->B, s2.parametric->C, {F2}, {4.03});
    const auto d2 = LossContext::direct(s2.parametric->at(4.03), {F2});
    const std::vector<StateVector> st2{state_of(random_unit(rng, 64))};
    EXPECT_NEAR(loss_parametric(p2, st2, std::vector<double>{4.03}).total,
                loss_phase_aware(d2, st2).total, 1e-10);
    EXPECT_THROW((void)loss_parametric(d2, st2, std::vector<double>{4.03}), ConfigError);
}

TEST(Loss, ContextExpansionsReconstruct) {
    const auto sys = helm(16, 1, spectral::PdeKind::helm1d);
    const auto ctx = LossContext::direct(sys.A, {unit(16, 0)});
    const Eigen::MatrixXd AtA = sys.A.transpose() * sys.A;
    EXPECT_LE((ctx.expansion_AdagA().to_dense() - AtA.cast<cplx>()).norm(), 1e-10);
    EXPECT_TRUE(pauli::is_valid_grouping(ctx.expansion_A(), ctx.grouping_num()));
    EXPECT_TRUE(pauli::is_valid_grouping(ctx.expansion_AdagA(), ctx.grouping_den()));
}

namespace {

struct Pipeline {
    LossContext ctx;
    qsim::GateProgram program;
    net::Network network;
    std::vector<std::vector<double>> features;
};

Pipeline small_pipeline(std::uint64_t seed, bool parametric) {
    std::mt19937_64 rng(seed);
    const auto sys = helm(8);
    std::vector<Eigen::VectorXd> F{random_unit(rng, 8), random_unit(rng, 8)};
    std::vector<double> k{4.01, 4.03};
    Pipeline p{parametric ? LossContext::parametric(sys.parametric->B, sys.parametric->C, F, k)
                          : LossContext::direct(sys.parametric->at(4.0), F),
               qsim::build_strongly_entangling(3, 2), {}, {}};
    const int in = parametric ? 9 : 8;
    p.network = net::Network::init(net::NetworkSpec::mlp(in, {12}, p.program.n_angle_slots,
                                                         net::Activation::gelu),
                                   seed);
    for (std::size_t i = 0; i < F.size(); ++i) {
        std::vector<double> x(F[i].data(), F[i].data() + 8);
        if (parametric) {
            x.push_back(k[i]);
        }
        p.features.push_back(x);
    }
    return p;
}

double total_loss(Objective obj, const Pipeline &p) {
    std::vector<StateVector> states;
    for (const auto &x : p.features) {
        states.push_back(qsim::run(p.program, p.network.forward(x)));
    }
    return evaluate(obj, p.ctx, states).total;
}

} // namespace

TEST(GradTotal, ModesAgreeAndMatchFiniteDifference) {
    for (bool parametric : {false, true}) {
        for (auto obj : {Objective::unnormalized, Objective::phase_aware, Objective::vqls_standard}) {
            auto p = small_pipeline(51, parametric);
            const auto adj = grad_total(obj, GradientMode::adjoint, p.ctx, p.program, p.network,
                                        p.features);
            const auto ps = grad_total(obj, GradientMode::parameter_shift, p.ctx, p.program,
                                       p.network, p.features);
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < adj.parameters.size(); ++j) {
                num += std::pow(adj.parameters[j] - ps.parameters[j], 2);
                den += std::pow(ps.parameters[j], 2);
            }
            EXPECT_LE(std::sqrt(num / den), 1e-8);
            EXPECT_NEAR(adj.loss.total, total_loss(obj, p), 1e-14);

            const double h = 1e-6;
            std::mt19937_64 rng(52);
            std::uniform_int_distribution<std::size_t> pick(0, p.network.parameter_count() - 1);
            for (int s = 0; s < 25; ++s) {
                const std::size_t j = pick(rng);
                const double keep = p.network.parameters()[j];
                p.network.parameters()[j] = keep + h;
                const double up = total_loss(obj, p);
                p.network.parameters()[j] = keep - h;
                const double dn = total_loss(obj, p);
                p.network.parameters()[j] = keep;
                const double fd = (up - dn) / (2 * h);
                EXPECT_NEAR(ps.parameters[j], fd, 1e-4 * std::max(1e-2, std::abs(fd)));
            }
        }
    }
}

TEST(GradTotal, IdenticalBatchEqualsSingle) {
    auto p = small_pipeline(53, false);
    const auto sys = helm(8);
    const Eigen::VectorXd F = Eigen::Map<const Eigen::VectorXd>(p.features[0].data(), 8);
    const auto one = LossContext::direct(sys.parametric->at(4.0), {F});
    const auto two = LossContext::direct(sys.parametric->at(4.0), {F, F});
    const auto g1 = grad_total(Objective::unnormalized, GradientMode::adjoint, one, p.program,
                               p.network, {p.features[0]});
    const auto g2 = grad_total(Objective::unnormalized, GradientMode::adjoint, two, p.program,
                               p.network, {p.features[0], p.features[0]});
    for (std::size_t j = 0; j < g1.parameters.size(); ++j) {
        EXPECT_NEAR(g1.parameters[j], g2.parameters[j], 1e-15 * std::max(1.0, std::abs(g1.parameters[j])));
    }
}

TEST(GradTotal, VanishesAtExactAngles) {
    // One qubit, A = I, F = Ry(t)|0>: a network whose bias outputs t is optimal.
    const double t = 0.9;
    qsim::GateProgram prog;
    prog.n_qubits = 1;
    prog.n_angle_slots = 1;
    prog.ry(0, 0);
    Eigen::VectorXd F(2);
    F << std::cos(t / 2), std::sin(t / 2);
    const auto ctx = LossContext::direct(Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2)), {F});
    net::NetworkSpec spec = net::NetworkSpec::mlp(2, {}, 1, net::Activation::identity);
    net::Network net(spec, {0.0, 0.0, t});
    for (auto obj : {Objective::unnormalized, Objective::phase_aware}) {
        const auto g = grad_total(obj, GradientMode::parameter_shift, ctx, prog, net,
                                  {{F(0), F(1)}});
        double n2 = 0.0;
        for (double v : g.parameters) {
            n2 += v * v;
        }
        EXPECT_LE(std::sqrt(n2), 1e-6);
    }
}
