#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "qspec/pauli/pauli_string.hpp"

namespace qspec::pauli {

/// Coefficients with magnitude at or below this are treated as exact zeros.
inline constexpr double kDropTolerance = 1e-14;

struct PauliTerm {
    PauliString string;
    cplx coefficient;
};

/// sum_l c_l P_l with distinct strings, kept in text order (I < X < Y < Z).
struct PauliExpansion {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;
    std::string source_tag;

    [[nodiscard]] std::size_t size() const noexcept { return terms.size(); }
    [[nodiscard]] bool empty() const noexcept { return terms.empty(); }
    [[nodiscard]] Eigen::MatrixXcd to_dense() const;
    /// max_l |Im c_l|
    [[nodiscard]] double max_imag() const noexcept;
    /// Sorts terms, merges duplicates and drops near-zero coefficients.
    void canonicalize();
};

/**
 * @brief Exhaustive decomposition c_P = tr(P A) / 2^n over all 4^n strings.
 *
 * For every x-mask the diagonal band A(k, k ^ x) is Walsh-Hadamard
 * transformed, which yields the traces for all z-masks at once.
 * Throws ContractViolation unless A is square with power-of-two size.
 */
[[nodiscard]] PauliExpansion decompose(const Eigen::MatrixXcd &A, std::string source_tag = {});
[[nodiscard]] PauliExpansion decompose(const Eigen::MatrixXd &A, std::string source_tag = {});

enum class ProductRoute { pairwise, dense };

/// Expansion of a^dag b, either symbolically (Pauli products with phase
/// bookkeeping) or by dense multiply followed by decompose.
[[nodiscard]] PauliExpansion adjoint_product(const PauliExpansion &a, const PauliExpansion &b,
                                             ProductRoute route = ProductRoute::pairwise);

/// Expansion of A^dag A.
[[nodiscard]] PauliExpansion normal_operator(const PauliExpansion &a,
                                             ProductRoute route = ProductRoute::pairwise);

/// Linear combination sum_i w_i E_i of expansions on the same qubits.
[[nodiscard]] PauliExpansion combine(const std::vector<const PauliExpansion *> &parts,
                                     const std::vector<double> &weights, std::string source_tag);

/// One term per line: "<string> <re> <im>", 17 significant digits.
void write_expansion(std::ostream &os, const PauliExpansion &e);
[[nodiscard]] PauliExpansion read_expansion(std::istream &is, std::string source_tag = {});

} // namespace qspec::pauli
