#include <benchmark/benchmark.h>

#include <random>

#include "qspec/bench/config.hpp"
#include "qspec/loss/loss.hpp"
#include "qspec/pauli/expansion.hpp"
#include "qspec/pauli/grouping.hpp"
#include "qspec/qsim/circuit.hpp"

using namespace qspec;

namespace {

spectral::SpectralSystem rd1d(int n_modes) {
    bench::ExperimentConfig c;
    c.pde = spectral::PdeKind::rd1d;
    c.n_modes = n_modes;
    return bench::build_system(c);
}

void BM_Assemble(benchmark::State &state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(rd1d(static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_Assemble)->RangeMultiplier(2)->Range(8, 64);

void BM_Decompose(benchmark::State &state) {
    const auto sys = rd1d(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pauli::decompose(sys.A));
    }
}
BENCHMARK(BM_Decompose)->RangeMultiplier(2)->Range(8, 64);

void BM_NormalOperator(benchmark::State &state) {
    const auto e = pauli::decompose(rd1d(static_cast<int>(state.range(0))).A);
    const auto route = state.range(1) == 0 ? pauli::ProductRoute::pairwise : pauli::ProductRoute::dense;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pauli::normal_operator(e, route));
    }
}
BENCHMARK(BM_NormalOperator)->ArgsProduct({{8, 16, 32}, {0, 1}});

void BM_Grouping(benchmark::State &state) {
    const auto e = pauli::normal_operator(pauli::decompose(rd1d(static_cast<int>(state.range(0))).A));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pauli::group_commuting(e));
    }
}
BENCHMARK(BM_Grouping)->RangeMultiplier(2)->Range(8, 32);

void BM_RunStronglyEntangling(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto p = qsim::build_strongly_entangling(n, 4);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> angles(static_cast<std::size_t>(p.n_angle_slots));
    for (auto &a : angles) {
        a = u(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsim::run(p, angles));
    }
}
BENCHMARK(BM_RunStronglyEntangling)->DenseRange(2, 8, 2);

void BM_GradTotal(benchmark::State &state) {
    const int n_modes = static_cast<int>(state.range(0));
    const auto sys = rd1d(n_modes);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<Eigen::VectorXd> forcings;
    std::vector<std::vector<double>> features;
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd f(n_modes);
        for (auto &v : f) {
            v = g(rng);
        }
        forcings.push_back(f.normalized());
        features.emplace_back(f.data(), f.data() + n_modes);
    }
    const auto ctx = loss::LossContext::direct(sys.A, forcings);
    int n = 0;
    while ((1 << n) < n_modes) {
        ++n;
    }
    const auto program = qsim::build_strongly_entangling(n, 4);
    const auto network = net::Network::init(
        net::NetworkSpec::mlp(n_modes, {64, 64}, program.n_angle_slots, net::Activation::gelu), 3);
    const auto mode = state.range(1) == 0 ? loss::GradientMode::adjoint : loss::GradientMode::parameter_shift;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            loss::grad_total(loss::Objective::phase_aware, mode, ctx, program, network, features));
    }
}
BENCHMARK(BM_GradTotal)->ArgsProduct({{8, 16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
