#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qspec/errors.hpp"
#include "qspec/pauli/grouping.hpp"
#include "qspec/qsim/circuit.hpp"
#include "qspec/qsim/gradient.hpp"
#include "qspec/qsim/measure.hpp"

using namespace qspec;
using namespace qspec::qsim;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> random_angles(std::mt19937_64 &rng, int n) {
    std::uniform_real_distribution<double> u(-pi, pi);
    std::vector<double> a(static_cast<std::size_t>(n));
    for (auto &x : a) {
        x = u(rng);
    }
    return a;
}

GateProgram random_program(std::mt19937_64 &rng, int n) {
    GateProgram p;
    p.n_qubits = n;
    const int gates = 4 + static_cast<int>(rng() % 12);
    for (int g = 0; g < gates; ++g) {
        const int q = static_cast<int>(rng() % n);
        switch (rng() % 4) {
        case 0:
            p.ry(q, p.n_angle_slots++);
            break;
        case 1:
            p.rz(q, p.n_angle_slots++);
            break;
        case 2:
            p.h(q);
            break;
        default:
            if (n > 1) {
                p.cnot(q, static_cast<int>((q + 1 + rng() % (n - 1)) % n));
            }
        }
    }
    return p;
}

pauli::PauliExpansion single(const char *s, double c = 1.0) {
    pauli::PauliExpansion e;
    e.n_qubits = static_cast<int>(std::string(s).size());
    e.terms.push_back({pauli::PauliString::from_text(s), c});
    return e;
}

StateVector one_qubit_ry(double theta) {
    GateProgram p;
    p.n_qubits = 1;
    p.n_angle_slots = 1;
    p.ry(0, 0);
    return run(p, std::vector<double>{theta});
}

} // namespace

TEST(Builders, StronglyEntangling) {
    EXPECT_EQ(build_strongly_entangling(4, 12).n_angle_slots, 144);
    const auto p = build_strongly_entangling(2, 1);
    EXPECT_EQ(p.n_angle_slots, 6);
    std::vector<std::pair<int, int>> cnots;
    for (const auto &g : p.gates) {
        if (g.kind == GateKind::cnot) {
            cnots.emplace_back(g.control, g.target);
        }
    }
    EXPECT_EQ(cnots, (std::vector<std::pair<int, int>>{{0, 1}, {1, 0}}));
    const auto big = build_strongly_entangling(4, 3);
    big.validate();
    const auto s = run(big, std::vector<double>(36, 0.0));
    EXPECT_NEAR(std::abs(s.amplitudes(0)), 1.0, 1e-14);
    EXPECT_THROW((void)build_strongly_entangling(1, 2), ConfigError);

    // Offsets r = 1, 2, 3, 1 on n = 4.
    std::vector<int> offsets;
    for (std::size_t i = 0; i < big.gates.size(); ++i) {
        const auto &g = big.gates[i];
        if (g.kind == GateKind::cnot && g.control == 0) {
            offsets.push_back(g.target);
        }
    }
    EXPECT_EQ(offsets, (std::vector<int>{1, 2, 3}));
}

TEST(Builders, HardwareEfficient) {
    EXPECT_EQ(build_hardware_efficient_ry(3, 2).n_angle_slots, 6);
    const auto s = run(build_hardware_efficient_ry(2, 1), std::vector<double>{0.0, 0.0});
    for (Eigen::Index j = 0; j < 4; ++j) {
        EXPECT_NEAR(s.amplitudes(j).real(), 0.5, 1e-15);
        EXPECT_EQ(s.amplitudes(j).imag(), 0.0);
    }
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = build_hardware_efficient_ry(4, 3);
        const auto st = run(p, random_angles(rng, p.n_angle_slots));
        EXPECT_LE(st.amplitudes.imag().cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(st.norm(), 1.0, 1e-12);
    }
}

TEST(Builders, RyEmbedding) {
    EXPECT_NEAR(std::abs(build_ry_embedding(std::vector<double>(3, 0.0)).amplitudes(0)), 1.0, 0);
    const auto s1 = build_ry_embedding(std::vector<double>{pi});
    EXPECT_NEAR(s1.amplitudes(0).real(), 0.0, 1e-16);
    EXPECT_NEAR(s1.amplitudes(1).real(), 1.0, 1e-16);
    const auto s2 = build_ry_embedding(std::vector<double>{pi / 2, pi / 2});
    for (Eigen::Index j = 0; j < 4; ++j) {
        EXPECT_NEAR(s2.amplitudes(j).real(), 0.5, 1e-15);
    }
    // Kronecker oracle with distinct angles, qubit 0 outermost.
    const std::vector<double> th{0.3, 1.1, -2.0};
    const auto s3 = build_ry_embedding(th);
    for (int j = 0; j < 8; ++j) {
        double a = 1.0;
        for (int q = 0; q < 3; ++q) {
            const bool bit = (j >> (2 - q)) & 1;
            a *= bit ? std::sin(th[q] / 2) : std::cos(th[q] / 2);
        }
        EXPECT_NEAR(s3.amplitudes(j).real(), a, 1e-15);
    }
}

TEST(Run, MatchesDenseUnitary) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const auto p = random_program(rng, n);
        const auto angles = random_angles(rng, p.n_angle_slots);
        const auto s = run(p, angles);
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(1 << n);
        e0(0) = 1.0;
        EXPECT_LE((s.amplitudes - program_unitary(p, angles) * e0).norm(), 1e-12);
        EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    }
    GateProgram empty;
    empty.n_qubits = 2;
    const auto z = run(empty, {});
    EXPECT_EQ(z.amplitudes(0), cplx(1.0));
    EXPECT_THROW((void)run(build_hardware_efficient_ry(2, 1), std::vector<double>{1.0}),
                 ContractViolation);
}

TEST(Run, ValidateRejectsReusedSlots) {
    GateProgram p;
    p.n_qubits = 2;
    p.n_angle_slots = 1;
    p.ry(0, 0);
    p.rz(1, 0);
    EXPECT_THROW(p.validate(), ContractViolation);
    EXPECT_THROW((void)grad_parameter_shift(p, std::vector<double>{0.1}, single("ZI")),
                 ContractViolation);
}

TEST(Measure, ExpectationExamples) {
    const auto zero = StateVector::zero(1);
    EXPECT_EQ(expectation(zero, pauli::PauliString::from_text("Z")), 1.0);
    EXPECT_EQ(expectation(zero, pauli::PauliString::from_text("X")), 0.0);
    EXPECT_NEAR(expectation(one_qubit_ry(pi / 3), pauli::PauliString::from_text("Z")), 0.5, 1e-15);
}

TEST(Measure, OverlapExamples) {
    const auto zero = StateVector::zero(1);
    const auto id = pauli::PauliString::from_text("I");
    EXPECT_EQ(overlap(zero, id, zero), cplx(1.0));
    StateVector neg = zero;
    neg.amplitudes *= -1.0;
    EXPECT_EQ(overlap(zero, id, neg), cplx(-1.0));

    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    StateVector a = StateVector::zero(2), b = StateVector::zero(2);
    for (Eigen::Index j = 0; j < 4; ++j) {
        a.amplitudes(j) = g(rng);
        b.amplitudes(j) = g(rng);
    }
    a.amplitudes.normalize();
    b.amplitudes.normalize();
    const auto zi = pauli::PauliString::from_text("ZI");
    const cplx dense = a.amplitudes.dot(zi.to_dense() * b.amplitudes);
    EXPECT_LE(std::abs(overlap(a, zi, b) - dense), 1e-12);
}

TEST(Gradient, ShiftRuleExamples) {
    GateProgram p;
    p.n_qubits = 1;
    p.n_angle_slots = 1;
    p.ry(0, 0);
    const auto g = grad_parameter_shift(p, std::vector<double>{pi / 3}, single("Z"));
    EXPECT_NEAR(g[0], -std::sqrt(3.0) / 2, 1e-14);
    const auto gi = grad_parameter_shift(p, std::vector<double>{0.7}, single("I"));
    EXPECT_NEAR(gi[0], 0.0, 1e-15);
}

TEST(Gradient, ShiftMatchesFiniteDifference) {
    std::mt19937_64 rng(14);
    const double h = 1e-5;
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = trial % 2 ? build_hardware_efficient_ry(3, 2) : build_strongly_entangling(3, 1);
        const auto angles = random_angles(rng, p.n_angle_slots);
        pauli::PauliExpansion obs;
        obs.n_qubits = 3;
        for (const char *s : {"ZII", "XZI", "IYY", "ZZZ", "III"}) {
            obs.terms.push_back({pauli::PauliString::from_text(s), g(rng)});
        }
        obs.canonicalize();
        const auto ps = grad_parameter_shift(p, angles, obs);

        StateVector bra = StateVector::zero(3);
        for (Eigen::Index j = 0; j < 8; ++j) {
            bra.amplitudes(j) = cplx{g(rng), g(rng)};
        }
        const auto pso = grad_parameter_shift_overlap(p, angles, bra, obs);

        for (std::size_t j = 0; j < angles.size(); ++j) {
            auto plus = angles, minus = angles;
            plus[j] += h;
            minus[j] -= h;
            const double fd = (expectation(run(p, plus), obs).real() -
                               expectation(run(p, minus), obs).real()) / (2 * h);
            EXPECT_NEAR(ps[j], fd, 1e-5 * std::max(1.0, std::abs(fd)));
            const double fdo = (overlap(bra, obs, run(p, plus)).real() -
                                overlap(bra, obs, run(p, minus)).real()) / (2 * h);
            EXPECT_NEAR(pso[j], fdo, 1e-5 * std::max(1.0, std::abs(fdo)));
        }
    }
}

TEST(Gradient, AdjointMatchesShift) {
    std::mt19937_64 rng(15);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = build_strongly_entangling(3, 2);
        const auto angles = random_angles(rng, p.n_angle_slots);
        Eigen::VectorXcd u(8);
        for (Eigen::Index j = 0; j < 8; ++j) {
            u(j) = cplx{g(rng), g(rng)};
        }
        // L = Re <u|psi>: cotangent is u itself.
        const auto psi = run(p, angles);
        const auto adj = adjoint_gradient(p, angles, psi, u);
        const auto shift = grad_parameter_shift_linear(p, angles, u);
        for (std::size_t j = 0; j < adj.size(); ++j) {
            EXPECT_NEAR(adj[j], shift[j], 1e-12);
        }
    }
}

TEST(Shots, DeterministicAndGrouped) {
    const auto zero = StateVector::zero(1);
    const auto e = single("Z");
    const auto r = estimate_shots(zero, pauli::group_commuting(e), e, 17, 1);
    EXPECT_EQ(r.estimate, 1.0);
    EXPECT_EQ(r.circuits_used, 1u);

    pauli::PauliExpansion diag;
    diag.n_qubits = 2;
    for (const char *s : {"II", "IZ", "ZI", "ZZ"}) {
        diag.terms.push_back({pauli::PauliString::from_text(s), 0.5});
    }
    diag.canonicalize();
    const auto st = run(build_hardware_efficient_ry(2, 1), std::vector<double>{0.4, -1.2});
    const auto gr = pauli::group_commuting(diag);
    const auto a = estimate_shots(st, gr, diag, 1000, 42);
    const auto b = estimate_shots(st, gr, diag, 1000, 42);
    EXPECT_EQ(a.circuits_used, 1u);
    EXPECT_EQ(a.estimate, b.estimate);
}

TEST(Shots, ConvergesWithStandardError) {
    const auto s = one_qubit_ry(pi / 3);
    const auto e = single("Z");
    const auto g = pauli::group_commuting(e);
    // Var of a +-1 outcome with mean 0.5 is 0.75.
    for (std::size_t shots : {1000u, 100000u}) {
        const double se = std::sqrt(0.75 / double(shots));
        const auto r = estimate_shots(s, g, e, shots, 99);
        EXPECT_NEAR(r.estimate, 0.5, 4 * se);
    }
}

TEST(Shots, UnbiasedOverSeedsInRotatedBases) {
    std::mt19937_64 rng(16);
    const auto p = build_strongly_entangling(2, 2);
    const auto st = run(p, random_angles(rng, p.n_angle_slots));
    pauli::PauliExpansion e;
    e.n_qubits = 2;
    for (const auto &[s, c] : std::vector<std::pair<const char *, double>>{
             {"XI", 0.7}, {"YZ", -0.4}, {"ZZ", 0.3}, {"XY", 0.9}, {"II", 0.2}}) {
        e.terms.push_back({pauli::PauliString::from_text(s), c});
    }
    e.canonicalize();
    const double exact = expectation(st, e).real();
    const auto g = pauli::group_commuting(e);
    const std::size_t shots = 2000;
    double mean = 0.0, m2 = 0.0;
    const int seeds = 200;
    for (int seed = 0; seed < seeds; ++seed) {
        const double x = estimate_shots(st, g, e, shots, static_cast<std::uint64_t>(seed)).estimate;
        mean += x;
        m2 += x * x;
    }
    mean /= seeds;
    const double var = m2 / seeds - mean * mean;
    EXPECT_NEAR(mean, exact, 3 * std::sqrt(var / seeds));
}

TEST(Export, AmplitudeCsv) {
    std::ostringstream os;
    write_amplitudes_csv(os, StateVector::zero(1));
    EXPECT_EQ(os.str(), "index,re,im\n0,1,0\n1,0,0\n");
}
