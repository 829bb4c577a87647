#include "qspec/qsim/gradient.hpp"

#include <numbers>

#include "qspec/errors.hpp"
#include "qspec/qsim/measure.hpp"

namespace qspec::qsim {

namespace {

template <class F>
std::vector<double> shift_rule(const GateProgram &program, std::span<const double> angles,
                               double shift, double factor, F &&value) {
    program.validate();
    if (angles.size() != static_cast<std::size_t>(program.n_angle_slots)) {
        throw ContractViolation("parameter shift: angle count mismatch");
    }
    std::vector<double> shifted(angles.begin(), angles.end());
    std::vector<double> grad(angles.size(), 0.0);
    for (std::size_t j = 0; j < angles.size(); ++j) {
        shifted[j] = angles[j] + shift;
        const double plus = value(run(program, shifted));
        shifted[j] = angles[j] - shift;
        const double minus = value(run(program, shifted));
        shifted[j] = angles[j];
        grad[j] = factor * (plus - minus);
    }
    return grad;
}

} // namespace

std::vector<double> grad_parameter_shift(const GateProgram &program,
                                         std::span<const double> angles,
                                         const pauli::PauliExpansion &observable) {
    return shift_rule(program, angles, 0.5 * std::numbers::pi, 0.5, [&](const StateVector &s) {
        return expectation(s, observable).real();
    });
}

std::vector<double> grad_parameter_shift_overlap(const GateProgram &program,
                                                 std::span<const double> angles,
                                                 const StateVector &bra,
                                                 const pauli::PauliExpansion &op) {
    return shift_rule(program, angles, std::numbers::pi, 0.25,
                      [&](const StateVector &s) { return overlap(bra, op, s).real(); });
}

std::vector<double> grad_parameter_shift_linear(const GateProgram &program,
                                                std::span<const double> angles,
                                                const Eigen::VectorXcd &bra) {
    return shift_rule(program, angles, std::numbers::pi, 0.25,
                      [&](const StateVector &s) { return bra.dot(s.amplitudes).real(); });
}

std::vector<double> adjoint_gradient(const GateProgram &program, std::span<const double> angles,
                                     const StateVector &final_state,
                                     const Eigen::VectorXcd &cotangent) {
    program.validate();
    if (angles.size() != static_cast<std::size_t>(program.n_angle_slots) ||
        cotangent.size() != final_state.amplitudes.size()) {
        throw ContractViolation("adjoint_gradient: dimension mismatch");
    }
    std::vector<double> grad(angles.size(), 0.0);
    StateVector psi = final_state;
    StateVector lambda{final_state.n_qubits, cotangent};
    const std::size_t tbit_base = std::size_t{1} << (program.n_qubits - 1);
    for (auto it = program.gates.rbegin(); it != program.gates.rend(); ++it) {
        const Gate &g = *it;
        const double angle = g.slot >= 0 ? angles[static_cast<std::size_t>(g.slot)] : 0.0;
        if (g.kind == GateKind::ry || g.kind == GateKind::rz) {
            const std::size_t bit = tbit_base >> g.target;
            // <lambda| -i G/2 |psi> with G = Y or Z acting on the target qubit.
            cplx acc = 0.0;
            for (std::size_t j = 0; j < psi.dimension(); ++j) {
                if (j & bit) {
                    continue;
                }
                const auto i0 = static_cast<Eigen::Index>(j);
                const auto i1 = static_cast<Eigen::Index>(j | bit);
                cplx g0, g1;
                if (g.kind == GateKind::ry) {
                    // Y (a0, a1) = (-i a1, i a0)
                    g0 = cplx{0.0, -1.0} * psi.amplitudes(i1);
                    g1 = cplx{0.0, 1.0} * psi.amplitudes(i0);
                } else {
                    g0 = psi.amplitudes(i0);
                    g1 = -psi.amplitudes(i1);
                }
                acc += std::conj(lambda.amplitudes(i0)) * g0 + std::conj(lambda.amplitudes(i1)) * g1;
            }
            grad[static_cast<std::size_t>(g.slot)] = (cplx{0.0, -0.5} * acc).real();
        }
        apply_gate(psi, g, angle, true);
        apply_gate(lambda, g, angle, true);
    }
    return grad;
}

} // namespace qspec::qsim
