#include "qspec/qsim/measure.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "qspec/errors.hpp"

namespace qspec::qsim {

namespace {

void check_dims(std::size_t a, std::size_t b) {
    if (a != b) {
        throw ContractViolation("qsim: state dimension mismatch");
    }
}

} // namespace

Eigen::VectorXcd apply_pauli(const pauli::PauliString &p, const Eigen::VectorXcd &v) {
    check_dims(static_cast<std::size_t>(v.size()), std::size_t{1} << p.n_qubits());
    Eigen::VectorXcd out(v.size());
    const std::uint64_t x = p.x_bits();
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const auto col = static_cast<std::uint64_t>(j);
        out(static_cast<Eigen::Index>(col ^ x)) = p.phase_on(col) * v(j);
    }
    return out;
}

Eigen::VectorXcd apply_expansion(const pauli::PauliExpansion &e, const Eigen::VectorXcd &v) {
    check_dims(static_cast<std::size_t>(v.size()), std::size_t{1} << e.n_qubits);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    for (const auto &t : e.terms) {
        const std::uint64_t x = t.string.x_bits();
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            const auto col = static_cast<std::uint64_t>(j);
            out(static_cast<Eigen::Index>(col ^ x)) += t.coefficient * t.string.phase_on(col) * v(j);
        }
    }
    return out;
}

double expectation(const StateVector &state, const pauli::PauliString &p) {
    const cplx value = state.amplitudes.dot(apply_pauli(p, state.amplitudes));
    if (std::abs(value.imag()) > 1e-12) {
        std::ostringstream msg;
        msg << "expectation: imaginary part " << value.imag() << " for Hermitian string "
            << p.to_text();
        throw NumericError(msg.str());
    }
    return value.real();
}

cplx expectation(const StateVector &state, const pauli::PauliExpansion &e) {
    return state.amplitudes.dot(apply_expansion(e, state.amplitudes));
}

cplx overlap(const StateVector &bra, const pauli::PauliString &p, const StateVector &ket) {
    check_dims(bra.dimension(), ket.dimension());
    // Eigen's dot conjugates the first argument.
    return bra.amplitudes.dot(apply_pauli(p, ket.amplitudes));
}

cplx overlap(const StateVector &bra, const pauli::PauliExpansion &e, const StateVector &ket) {
    check_dims(bra.dimension(), ket.dimension());
    return bra.amplitudes.dot(apply_expansion(e, ket.amplitudes));
}

ShotEstimate estimate_shots(const StateVector &state, const pauli::MeasurementGrouping &grouping,
                            const pauli::PauliExpansion &e, std::size_t shots,
                            std::uint64_t rng_seed) {
    if (shots < 1) {
        throw ContractViolation("estimate_shots: shots must be positive");
    }
    check_dims(state.dimension(), std::size_t{1} << e.n_qubits);
    std::mt19937_64 rng(rng_seed);
    const double r = 1.0 / std::sqrt(2.0);
    ShotEstimate out;
    out.circuits_used = grouping.size();
    std::vector<double> probs(state.dimension());
    std::vector<std::size_t> counts(state.dimension());

    for (std::size_t g = 0; g < grouping.size(); ++g) {
        StateVector rotated = state;
        for (int q = 0; q < state.n_qubits; ++q) {
            const auto basis = grouping.basis_of(g, q);
            if (basis == pauli::MeasureBasis::Z) {
                continue;
            }
            const std::size_t bit = std::size_t{1} << (state.n_qubits - 1 - q);
            auto &v = rotated.amplitudes;
            for (std::size_t j = 0; j < rotated.dimension(); ++j) {
                if (j & bit) {
                    continue;
                }
                const auto i0 = static_cast<Eigen::Index>(j);
                const auto i1 = static_cast<Eigen::Index>(j | bit);
                cplx a0 = v(i0);
                cplx a1 = v(i1);
                if (basis == pauli::MeasureBasis::Y) {
                    a1 *= cplx{0.0, -1.0};
                }
                v(i0) = r * (a0 + a1);
                v(i1) = r * (a0 - a1);
            }
        }
        for (std::size_t j = 0; j < probs.size(); ++j) {
            probs[j] = std::norm(rotated.amplitudes(static_cast<Eigen::Index>(j)));
        }
        std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t s = 0; s < shots; ++s) {
            ++counts[dist(rng)];
        }
        // After rotation every member is diagonal: eigenvalue (-1)^|j & support|.
        for (const std::size_t idx : grouping.groups[g]) {
            const auto &term = e.terms[idx];
            const std::uint64_t support = term.string.support();
            double mean = 0.0;
            for (std::size_t j = 0; j < counts.size(); ++j) {
                if (counts[j] != 0) {
                    const double sign = (std::popcount(j & support) & 1) ? -1.0 : 1.0;
                    mean += sign * static_cast<double>(counts[j]);
                }
            }
            out.estimate += term.coefficient.real() * mean / static_cast<double>(shots);
        }
    }
    return out;
}

void write_amplitudes_csv(std::ostream &os, const StateVector &state) {
    const auto old_precision = os.precision(17);
    os << "index,re,im\n";
    for (Eigen::Index j = 0; j < state.amplitudes.size(); ++j) {
        os << j << ',' << state.amplitudes(j).real() << ',' << state.amplitudes(j).imag() << '\n';
    }
    os.precision(old_precision);
}

} // namespace qspec::qsim
