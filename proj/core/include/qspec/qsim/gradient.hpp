#pragma once

#include <span>
#include <vector>

#include "qspec/pauli/expansion.hpp"
#include "qspec/qsim/circuit.hpp"

namespace qspec::qsim {

/**
 * d/dtheta_j Re <psi|O|psi> by the two-term rule
 * (f(theta_j + pi/2) - f(theta_j - pi/2)) / 2.
 * Throws ContractViolation if the program reuses or skips a slot.
 */
[[nodiscard]] std::vector<double> grad_parameter_shift(const GateProgram &program,
                                                       std::span<const double> angles,
                                                       const pauli::PauliExpansion &observable);

/**
 * d/dtheta_j Re <bra|O|psi>. This functional is linear in the amplitudes, so
 * it is a first harmonic of theta_j / 2 and the exact rule uses a shift of
 * pi: (f(theta_j + pi) - f(theta_j - pi)) / 4.
 */
[[nodiscard]] std::vector<double> grad_parameter_shift_overlap(const GateProgram &program,
                                                               std::span<const double> angles,
                                                               const StateVector &bra,
                                                               const pauli::PauliExpansion &op);

/// Same rule for Re <bra|psi> with a precomputed bra (e.g. A^dag F).
[[nodiscard]] std::vector<double> grad_parameter_shift_linear(const GateProgram &program,
                                                              std::span<const double> angles,
                                                              const Eigen::VectorXcd &bra);

/**
 * @brief Reverse-mode gradient through the statevector.
 *
 * Given the final state psi and a cotangent lambda with dL = Re <lambda|dpsi>,
 * returns dL/dtheta_j for every slot. Rotations exp(-i theta G / 2) contribute
 * Re <lambda_j| -i G/2 |psi_j> with both vectors taken right after gate j.
 */
[[nodiscard]] std::vector<double> adjoint_gradient(const GateProgram &program,
                                                   std::span<const double> angles,
                                                   const StateVector &final_state,
                                                   const Eigen::VectorXcd &cotangent);

} // namespace qspec::qsim
