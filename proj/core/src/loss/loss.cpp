#include "qspec/loss/loss.hpp"

#include <cmath>
#include <sstream>

#include "qspec/errors.hpp"
#include "qspec/parallel.hpp"
#include "qspec/qsim/gradient.hpp"
#include "qspec/qsim/measure.hpp"

namespace qspec::loss {

namespace {

pauli::PauliExpansion adjoint_of(const pauli::PauliExpansion &e) {
    pauli::PauliExpansion out = e;
    for (auto &t : out.terms) {
        t.coefficient = std::conj(t.coefficient);
    }
    return out;
}

void check_beta(double beta, std::size_t instance) {
    if (!(beta > kBetaTolerance)) {
        std::ostringstream msg;
        msg << "loss: radicand beta = " << beta << " for instance " << instance
            << " is at or below " << kBetaTolerance << " (A a vanishes)";
        throw DegenerateDenominatorError(msg.str());
    }
}

// dL/dgamma, dL/dbeta and, for the standard cost, dL/d(Im <F|A|a>).
struct Partials {
    double d_gamma = 0.0;
    double d_beta = 0.0;
    double d_imag = 0.0;
};

Partials partials(Objective objective, const OverlapTerms &t) {
    const double sb = std::sqrt(t.beta);
    switch (objective) {
    case Objective::phase_aware:
        return {-1.0 / sb, 0.5 * t.gamma / (t.beta * sb), 0.0};
    case Objective::unnormalized:
        return {2.0 * (t.gamma - sb), -(t.gamma - sb) / sb, 0.0};
    case Objective::vqls_standard: {
        const double m2 = t.gamma * t.gamma + t.gamma_imag * t.gamma_imag;
        return {-2.0 * t.gamma / t.beta, m2 / (t.beta * t.beta), -2.0 * t.gamma_imag / t.beta};
    }
    }
    return {};
}

LossValue fold(Objective objective, const std::vector<OverlapTerms> &terms) {
    LossValue v;
    v.per_instance.reserve(terms.size());
    for (const auto &t : terms) {
        v.per_instance.push_back(instance_loss(objective, t));
        v.gamma.push_back(t.gamma);
        v.beta.push_back(t.beta);
    }
    double sum = 0.0;
    for (const double x : v.per_instance) {
        sum += x;
    }
    v.total = terms.empty() ? 0.0 : sum / static_cast<double>(terms.size());
    return v;
}

void check_batch(const LossContext &ctx, std::size_t n_states) {
    if (n_states != ctx.instance_count()) {
        throw ContractViolation("loss: expected one state per instance (" +
                                std::to_string(ctx.instance_count()) + "), got " +
                                std::to_string(n_states));
    }
}

} // namespace

LossContext LossContext::direct(const Eigen::MatrixXd &A,
                                const std::vector<Eigen::VectorXd> &forcings) {
    return direct(pauli::decompose(A, "A"), forcings);
}

LossContext LossContext::direct(pauli::PauliExpansion expansion_A,
                                const std::vector<Eigen::VectorXd> &forcings) {
    LossContext ctx;
    ctx.n_qubits_ = expansion_A.n_qubits;
    ctx.A_ = std::move(expansion_A);
    ctx.AdagA_ = pauli::normal_operator(ctx.A_);
    ctx.group_num_ = pauli::group_commuting(ctx.A_);
    ctx.group_den_ = pauli::group_commuting(ctx.AdagA_);
    ctx.set_targets(forcings, std::vector<double>(forcings.size(), 0.0));
    return ctx;
}

LossContext LossContext::parametric(const Eigen::MatrixXd &S, const Eigen::MatrixXd &M,
                                    const std::vector<Eigen::VectorXd> &forcings,
                                    const std::vector<double> &wave_numbers_sq) {
    if (wave_numbers_sq.size() != forcings.size()) {
        throw ContractViolation("LossContext::parametric: need one k^2 per forcing");
    }
    LossContext ctx;
    ParametricExpansions p;
    p.S = pauli::decompose(S, "S");
    p.M = pauli::decompose(M, "M");
    p.SdagS = pauli::adjoint_product(p.S, p.S);
    p.SdagM = pauli::adjoint_product(p.S, p.M);
    p.MdagS = pauli::adjoint_product(p.M, p.S);
    p.MdagM = pauli::adjoint_product(p.M, p.M);
    ctx.n_qubits_ = p.S.n_qubits;
    ctx.parametric_ = std::move(p);
    ctx.set_targets(forcings, wave_numbers_sq);
    return ctx;
}

void LossContext::set_targets(const std::vector<Eigen::VectorXd> &forcings,
                              const std::vector<double> &wave_numbers_sq) {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits_;
    targets_.clear();
    adjoint_targets_.clear();
    for (std::size_t i = 0; i < forcings.size(); ++i) {
        const auto &F = forcings[i];
        if (F.size() != dim) {
            throw ContractViolation("LossContext: forcing " + std::to_string(i) +
                                    " has the wrong length");
        }
        const double norm = F.norm();
        if (!(norm > 0.0)) {
            throw DivisionGuardError("LossContext: forcing " + std::to_string(i) +
                                     " has zero norm");
        }
        Target t;
        t.unit = F.cast<cplx>() / norm;
        t.raw_norm = norm;
        t.wave_number_sq = wave_numbers_sq[i];
        targets_.push_back(std::move(t));
    }
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        Eigen::VectorXcd u;
        if (parametric_) {
            u = qsim::apply_expansion(adjoint_of(parametric_->S), targets_[i].unit) +
                targets_[i].wave_number_sq *
                    qsim::apply_expansion(adjoint_of(parametric_->M), targets_[i].unit);
        } else {
            u = qsim::apply_expansion(adjoint_of(A_), targets_[i].unit);
        }
        adjoint_targets_.push_back(std::move(u));
    }
}

const pauli::PauliExpansion &LossContext::expansion_A() const {
    if (parametric_) {
        throw ConfigError("LossContext: parametric context has no fixed A expansion");
    }
    return A_;
}

const pauli::PauliExpansion &LossContext::expansion_AdagA() const {
    if (parametric_) {
        throw ConfigError("LossContext: parametric context has no fixed A^dag A expansion");
    }
    return AdagA_;
}

const pauli::MeasurementGrouping &LossContext::grouping_num() const {
    static_cast<void>(expansion_A());
    return group_num_;
}

const pauli::MeasurementGrouping &LossContext::grouping_den() const {
    static_cast<void>(expansion_A());
    return group_den_;
}

const ParametricExpansions &LossContext::parametric_expansions() const {
    if (!parametric_) {
        throw ConfigError("LossContext: missing parametric expansions");
    }
    return *parametric_;
}

Eigen::VectorXcd LossContext::apply_A(std::size_t i, const Eigen::VectorXcd &v) const {
    if (!parametric_) {
        return qsim::apply_expansion(A_, v);
    }
    const double k2 = targets_.at(i).wave_number_sq;
    return qsim::apply_expansion(parametric_->S, v) + k2 * qsim::apply_expansion(parametric_->M, v);
}

Eigen::VectorXcd LossContext::apply_AdagA(std::size_t i, const Eigen::VectorXcd &v) const {
    if (!parametric_) {
        return qsim::apply_expansion(AdagA_, v);
    }
    const double k2 = targets_.at(i).wave_number_sq;
    const auto &p = *parametric_;
    return qsim::apply_expansion(p.SdagS, v) +
           k2 * (qsim::apply_expansion(p.SdagM, v) + qsim::apply_expansion(p.MdagS, v)) +
           k2 * k2 * qsim::apply_expansion(p.MdagM, v);
}

OverlapTerms overlap_terms(const LossContext &ctx, std::size_t instance,
                           const qsim::StateVector &state) {
    const auto &t = ctx.target(instance);
    if (static_cast<Eigen::Index>(state.dimension()) != t.unit.size()) {
        throw ContractViolation("loss: state dimension does not match the context");
    }
    const cplx num = t.unit.dot(ctx.apply_A(instance, state.amplitudes));
    const double beta = state.amplitudes.dot(ctx.apply_AdagA(instance, state.amplitudes)).real();
    check_beta(beta, instance);
    return {num.real(), beta, num.imag()};
}

double instance_loss(Objective objective, const OverlapTerms &t) {
    const double sb = std::sqrt(t.beta);
    switch (objective) {
    case Objective::phase_aware:
        return 1.0 - t.gamma / sb;
    case Objective::unnormalized:
        return (t.gamma - sb) * (t.gamma - sb);
    case Objective::vqls_standard:
        return 1.0 - (t.gamma * t.gamma + t.gamma_imag * t.gamma_imag) / t.beta;
    }
    return 0.0;
}

LossValue evaluate(Objective objective, const LossContext &ctx,
                   std::span<const qsim::StateVector> states) {
    check_batch(ctx, states.size());
    std::vector<OverlapTerms> terms(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        terms[i] = overlap_terms(ctx, i, states[i]);
    }
    return fold(objective, terms);
}

LossValue loss_phase_aware(const LossContext &ctx, std::span<const qsim::StateVector> states) {
    return evaluate(Objective::phase_aware, ctx, states);
}

LossValue loss_unnormalized(const LossContext &ctx, std::span<const qsim::StateVector> states) {
    return evaluate(Objective::unnormalized, ctx, states);
}

LossValue loss_vqls_standard(const LossContext &ctx, std::span<const qsim::StateVector> states) {
    return evaluate(Objective::vqls_standard, ctx, states);
}

LossValue loss_parametric(const LossContext &ctx, std::span<const qsim::StateVector> states,
                          std::span<const double> wave_numbers_sq) {
    const auto &p = ctx.parametric_expansions();
    check_batch(ctx, states.size());
    if (wave_numbers_sq.size() != states.size()) {
        throw ContractViolation("loss_parametric: need one k^2 per state");
    }
    std::vector<OverlapTerms> terms(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto &F = ctx.target(i);
        const auto &a = states[i];
        const double k2 = wave_numbers_sq[i];
        const cplx num = qsim::overlap({a.n_qubits, F.unit}, p.S, a) +
                         k2 * qsim::overlap({a.n_qubits, F.unit}, p.M, a);
        const cplx den = qsim::expectation(a, p.SdagS) +
                         k2 * (qsim::expectation(a, p.SdagM) + qsim::expectation(a, p.MdagS)) +
                         k2 * k2 * qsim::expectation(a, p.MdagM);
        check_beta(den.real(), i);
        terms[i] = {num.real(), den.real(), num.imag()};
    }
    return fold(Objective::phase_aware, terms);
}

std::vector<double> angle_gradient(Objective objective, GradientMode mode, const LossContext &ctx,
                                   std::size_t instance, const qsim::GateProgram &program,
                                   std::span<const double> angles) {
    const qsim::StateVector psi = qsim::run(program, angles);
    const OverlapTerms t = overlap_terms(ctx, instance, psi);
    const Partials d = partials(objective, t);
    const Eigen::VectorXcd &u = ctx.adjoint_target(instance);

    if (mode == GradientMode::adjoint) {
        // gamma + i*imag = <u|psi>, beta = <psi|B|psi>, so
        // dL = Re <d_gamma u + i d_imag u + 2 d_beta B psi | dpsi>.
        const Eigen::VectorXcd lambda = (d.d_gamma + cplx{0.0, d.d_imag}) * u +
                                        2.0 * d.d_beta * ctx.apply_AdagA(instance, psi.amplitudes);
        return qsim::adjoint_gradient(program, angles, psi, lambda);
    }

    auto g_gamma = qsim::grad_parameter_shift_linear(program, angles, u);
    // Re <i u|psi> = Im <u|psi>.
    std::vector<double> g_imag;
    if (d.d_imag != 0.0) {
        g_imag = qsim::grad_parameter_shift_linear(program, angles, cplx{0.0, 1.0} * u);
    }
    std::vector<double> g_beta;
    if (ctx.is_parametric()) {
        // beta is quadratic in psi with the instance-specific A(k)^dag A(k).
        const double k2 = ctx.target(instance).wave_number_sq;
        const auto &p = ctx.parametric_expansions();
        const auto B = pauli::combine({&p.SdagS, &p.SdagM, &p.MdagS, &p.MdagM},
                                      {1.0, k2, k2, k2 * k2}, "A(k)^dag A(k)");
        g_beta = qsim::grad_parameter_shift(program, angles, B);
    } else {
        g_beta = qsim::grad_parameter_shift(program, angles, ctx.expansion_AdagA());
    }
    std::vector<double> g(g_gamma.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        g[j] = d.d_gamma * g_gamma[j] + d.d_beta * g_beta[j] +
               (g_imag.empty() ? 0.0 : d.d_imag * g_imag[j]);
    }
    return g;
}

TotalGradient grad_total(Objective objective, GradientMode mode, const LossContext &ctx,
                         const qsim::GateProgram &program, const net::Network &network,
                         const std::vector<std::vector<double>> &features) {
    const std::size_t D = features.size();
    check_batch(ctx, D);
    if (D == 0) {
        throw ContractViolation("grad_total: empty batch");
    }
    std::vector<OverlapTerms> terms(D);
    std::vector<std::vector<double>> grads(D);
    parallel_for(D, [&](std::size_t i) {
        net::ForwardCache cache;
        const auto angles = network.forward(features[i], cache);
        terms[i] = overlap_terms(ctx, i, qsim::run(program, angles));
        auto dtheta = angle_gradient(objective, mode, ctx, i, program, angles);
        for (double &x : dtheta) {
            x /= static_cast<double>(D);
        }
        grads[i] = network.backward(cache, dtheta).parameters;
    });

    TotalGradient out;
    out.loss = fold(objective, terms);
    out.parameters.assign(network.parameter_count(), 0.0);
    for (const auto &g : grads) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            out.parameters[j] += g[j];
        }
    }
    return out;
}

RecoveredSolution recover_solution(const qsim::StateVector &state, const LossContext &ctx,
                                   std::size_t instance) {
    const auto &t = ctx.target(instance);
    const double beta =
        state.amplitudes.dot(ctx.apply_AdagA(instance, state.amplitudes)).real();
    check_beta(beta, instance);
    RecoveredSolution r;
    r.scale = t.raw_norm / std::sqrt(beta);
    r.coefficients = state.amplitudes.real() * r.scale;
    const double n = state.amplitudes.norm();
    r.imag_residue = n > 0.0 ? state.amplitudes.imag().norm() / n : 0.0;
    r.phase_warning = r.imag_residue > kImagResidueTolerance;
    return r;
}

} // namespace qspec::loss
