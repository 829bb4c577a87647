#pragma once

#include <cstdint>
#include <iosfwd>

#include "qspec/pauli/expansion.hpp"
#include "qspec/pauli/grouping.hpp"
#include "qspec/qsim/circuit.hpp"

namespace qspec::qsim {

/// P|v> without forming P.
[[nodiscard]] Eigen::VectorXcd apply_pauli(const pauli::PauliString &p, const Eigen::VectorXcd &v);
/// (sum_l c_l P_l)|v>.
[[nodiscard]] Eigen::VectorXcd apply_expansion(const pauli::PauliExpansion &e,
                                               const Eigen::VectorXcd &v);

/// Re <s|P|s>. Throws NumericError if the imaginary part exceeds 1e-12.
[[nodiscard]] double expectation(const StateVector &state, const pauli::PauliString &p);
/// sum_l c_l <s|P_l|s>.
[[nodiscard]] cplx expectation(const StateVector &state, const pauli::PauliExpansion &e);

/// <bra|P|ket>.
[[nodiscard]] cplx overlap(const StateVector &bra, const pauli::PauliString &p,
                           const StateVector &ket);
/// sum_l c_l <bra|P_l|ket>.
[[nodiscard]] cplx overlap(const StateVector &bra, const pauli::PauliExpansion &e,
                           const StateVector &ket);

struct ShotEstimate {
    double estimate = 0.0;
    std::size_t circuits_used = 0;
};

/**
 * @brief Sampled estimate of Re sum_l c_l <P_l>.
 *
 * Each group is rotated into its measurement basis (H for X, S^dag then H
 * for Y), `shots` bitstrings are drawn from the rotated distribution, and
 * all member terms are estimated from those samples. Deterministic per seed.
 */
[[nodiscard]] ShotEstimate estimate_shots(const StateVector &state,
                                          const pauli::MeasurementGrouping &grouping,
                                          const pauli::PauliExpansion &e, std::size_t shots,
                                          std::uint64_t rng_seed);

/// "index,re,im" rows with 17 significant digits.
void write_amplitudes_csv(std::ostream &os, const StateVector &state);

} // namespace qspec::qsim
