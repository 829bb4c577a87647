#include "qspec/pauli/pauli_string.hpp"

#include <array>

#include "qspec/errors.hpp"

namespace qspec::pauli {

namespace {

constexpr std::array<cplx, 4> kPowersOfI{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};

constexpr int kMaxQubits = 31;

} // namespace

PauliString::PauliString(int n_qubits, std::uint64_t x_bits, std::uint64_t z_bits)
    : n_qubits_(n_qubits), x_(x_bits), z_(z_bits) {
    if (n_qubits < 0 || n_qubits > kMaxQubits) {
        throw ContractViolation("PauliString: qubit count out of range");
    }
    const std::uint64_t valid = (std::uint64_t{1} << n_qubits) - 1;
    if ((x_bits | z_bits) & ~valid) {
        throw ContractViolation("PauliString: bits set beyond qubit count");
    }
}

PauliString PauliString::from_text(std::string_view text) {
    const int n = static_cast<int>(text.size());
    std::uint64_t x = 0, z = 0;
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        switch (text[q]) {
        case 'I':
            break;
        case 'X':
            x |= bit;
            break;
        case 'Y':
            x |= bit;
            z |= bit;
            break;
        case 'Z':
            z |= bit;
            break;
        default:
            throw ContractViolation("PauliString::from_text: invalid letter '" +
                                    std::string(1, text[q]) + "'");
        }
    }
    return {n, x, z};
}

char PauliString::letter(int qubit) const {
    if (qubit < 0 || qubit >= n_qubits_) {
        throw ContractViolation("PauliString::letter: qubit out of range");
    }
    const std::uint64_t bit = qubit_mask(qubit);
    const bool xb = (x_ & bit) != 0;
    const bool zb = (z_ & bit) != 0;
    if (xb && zb) {
        return 'Y';
    }
    if (xb) {
        return 'X';
    }
    return zb ? 'Z' : 'I';
}

std::string PauliString::to_text() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(n_qubits_));
    for (int q = 0; q < n_qubits_; ++q) {
        s.push_back(letter(q));
    }
    return s;
}

cplx PauliString::phase_on(std::uint64_t basis_index) const noexcept {
    const int sign_flips = std::popcount(basis_index & z_);
    return kPowersOfI[(y_count() + 2 * sign_flips) & 3];
}

bool PauliString::qubit_wise_commutes(const PauliString &other) const noexcept {
    const std::uint64_t both = support() & other.support();
    const std::uint64_t differ = (x_ ^ other.x_) | (z_ ^ other.z_);
    return (both & differ) == 0;
}

bool PauliString::commutes(const PauliString &other) const noexcept {
    return ((std::popcount(x_ & other.z_) + std::popcount(z_ & other.x_)) & 1) == 0;
}

Eigen::MatrixXcd PauliString::to_dense() const {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const auto col = static_cast<std::uint64_t>(j);
        m(static_cast<Eigen::Index>(col ^ x_), j) = phase_on(col);
    }
    return m;
}

std::uint64_t PauliString::sort_key() const noexcept {
    std::uint64_t key = 0;
    for (int q = 0; q < n_qubits_; ++q) {
        const std::uint64_t bit = qubit_mask(q);
        const bool xb = (x_ & bit) != 0;
        const bool zb = (z_ & bit) != 0;
        const std::uint64_t rank = xb ? (zb ? 2 : 1) : (zb ? 3 : 0);
        key = (key << 2) | rank;
    }
    return key;
}

PauliProduct multiply(const PauliString &a, const PauliString &b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw ContractViolation("multiply: qubit count mismatch");
    }
    const std::uint64_t x = a.x_bits() ^ b.x_bits();
    const std::uint64_t z = a.z_bits() ^ b.z_bits();
    const PauliString out(a.n_qubits(), x, z);
    // (i^ya X^xa Z^za)(i^yb X^xb Z^zb) = i^(ya+yb) (-1)^|za&xb| X^x Z^z
    const int exponent = a.y_count() + b.y_count() - out.y_count() +
                         2 * std::popcount(a.z_bits() & b.x_bits());
    return {kPowersOfI[static_cast<std::size_t>(((exponent % 4) + 4) % 4)], out};
}

} // namespace qspec::pauli
