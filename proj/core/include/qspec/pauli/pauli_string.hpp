#pragma once

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace qspec::pauli {

using cplx = std::complex<double>;

/**
 * @brief n-qubit Pauli operator packed as two bitmasks.
 *
 * Letter q of the text form acts on qubit q, and qubit q is bit (n - 1 - q)
 * of a computational basis index, so "ZI" is diag(1, 1, -1, -1). Per qubit,
 * (x, z) = (0,0) I, (1,0) X, (1,1) Y, (0,1) Z, and the operator is
 * i^{#Y} X^x Z^z.
 */
class PauliString {
  public:
    PauliString() = default;
    PauliString(int n_qubits, std::uint64_t x_bits, std::uint64_t z_bits);

    static PauliString identity(int n_qubits) { return {n_qubits, 0, 0}; }
    /// Parses letters from {I, X, Y, Z}; throws ContractViolation otherwise.
    static PauliString from_text(std::string_view text);

    [[nodiscard]] std::string to_text() const;
    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::uint64_t x_bits() const noexcept { return x_; }
    [[nodiscard]] std::uint64_t z_bits() const noexcept { return z_; }
    [[nodiscard]] std::uint64_t support() const noexcept { return x_ | z_; }
    [[nodiscard]] bool is_identity() const noexcept { return (x_ | z_) == 0; }
    [[nodiscard]] int y_count() const noexcept { return std::popcount(x_ & z_); }
    [[nodiscard]] char letter(int qubit) const;

    /// Bit of a basis index that qubit q occupies.
    [[nodiscard]] std::uint64_t qubit_mask(int qubit) const noexcept {
        return std::uint64_t{1} << (n_qubits_ - 1 - qubit);
    }

    /// P|j> = phase_on(j) |j ^ x_bits()>.
    [[nodiscard]] cplx phase_on(std::uint64_t basis_index) const noexcept;

    /// Per qubit the letters agree or one of them is I.
    [[nodiscard]] bool qubit_wise_commutes(const PauliString &other) const noexcept;
    [[nodiscard]] bool commutes(const PauliString &other) const noexcept;

    [[nodiscard]] Eigen::MatrixXcd to_dense() const;

    /// Ordering of the text form with I < X < Y < Z.
    [[nodiscard]] std::uint64_t sort_key() const noexcept;

    bool operator==(const PauliString &) const = default;

  private:
    int n_qubits_ = 0;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
};

struct PauliProduct {
    cplx phase;
    PauliString string;
};

/// a * b = phase * string, with phase in {1, i, -1, -i}.
[[nodiscard]] PauliProduct multiply(const PauliString &a, const PauliString &b);

} // namespace qspec::pauli
