#include "qspec/pauli/expansion.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "qspec/errors.hpp"

namespace qspec::pauli {

namespace {

int qubits_for_dimension(Eigen::Index dim) {
    if (dim < 1 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
        throw ContractViolation("decompose: dimension " + std::to_string(dim) +
                                " is not a power of two");
    }
    return std::countr_zero(static_cast<std::uint64_t>(dim));
}

// In-place unnormalized Walsh-Hadamard transform: v[z] <- sum_k (-1)^|k&z| v[k].
template <class C> void walsh_hadamard(std::vector<C> &v) {
    for (std::size_t h = 1; h < v.size(); h <<= 1) {
        for (std::size_t i = 0; i < v.size(); i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const C a = v[j];
                const C b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

// Products run in extended precision and are rounded once, so the pairwise
// and dense routes land on the same doubles even for large-norm operators.
using wide = std::complex<long double>;
using WideMatrix = Eigen::Matrix<wide, Eigen::Dynamic, Eigen::Dynamic>;

wide widen(cplx c) {
    return {static_cast<long double>(c.real()), static_cast<long double>(c.imag())};
}

cplx narrow(wide c) {
    return {static_cast<double>(c.real()), static_cast<double>(c.imag())};
}

WideMatrix to_dense_wide(const PauliExpansion &e) {
    const Eigen::Index dim = Eigen::Index{1} << e.n_qubits;
    WideMatrix m = WideMatrix::Zero(dim, dim);
    for (const auto &t : e.terms) {
        const std::uint64_t x = t.string.x_bits();
        const wide c = widen(t.coefficient);
        for (Eigen::Index j = 0; j < dim; ++j) {
            const auto col = static_cast<std::uint64_t>(j);
            m(static_cast<Eigen::Index>(col ^ x), j) += c * widen(t.string.phase_on(col));
        }
    }
    return m;
}

template <class Matrix> PauliExpansion decompose_impl(const Matrix &A, std::string source_tag) {
    using C = typename Matrix::Scalar;
    using R = typename C::value_type;
    if (A.rows() != A.cols()) {
        throw ContractViolation("decompose: matrix must be square");
    }
    const int n = qubits_for_dimension(A.rows());
    const std::uint64_t dim = std::uint64_t{1} << n;
    const R inv_dim = R(1) / static_cast<R>(dim);

    PauliExpansion out;
    out.n_qubits = n;
    out.source_tag = std::move(source_tag);
    std::vector<C> band(dim);
    for (std::uint64_t x = 0; x < dim; ++x) {
        for (std::uint64_t k = 0; k < dim; ++k) {
            band[k] = A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k ^ x));
        }
        walsh_hadamard(band);
        for (std::uint64_t z = 0; z < dim; ++z) {
            const PauliString p(n, x, z);
            // tr(P A) = i^{#Y} sum_k (-1)^|k&z| A(k, k^x)
            const auto ph = p.phase_on(0);
            const cplx c = cplx(C(static_cast<R>(ph.real()), static_cast<R>(ph.imag())) *
                                band[z] * inv_dim);
            if (std::abs(c) > kDropTolerance) {
                out.terms.push_back({p, c});
            }
        }
    }
    std::sort(out.terms.begin(), out.terms.end(), [](const PauliTerm &a, const PauliTerm &b) {
        return a.string.sort_key() < b.string.sort_key();
    });
    return out;
}

std::uint64_t pack(const PauliString &p) {
    return (p.x_bits() << 32) | p.z_bits();
}

PauliExpansion from_accumulator(int n_qubits, const std::unordered_map<std::uint64_t, wide> &acc,
                                std::string tag) {
    PauliExpansion out;
    out.n_qubits = n_qubits;
    out.source_tag = std::move(tag);
    out.terms.reserve(acc.size());
    for (const auto &[key, c] : acc) {
        out.terms.push_back({PauliString(n_qubits, key >> 32, key & 0xffffffffULL), narrow(c)});
    }
    out.canonicalize();
    return out;
}

} // namespace

Eigen::MatrixXcd PauliExpansion::to_dense() const {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto &t : terms) {
        const std::uint64_t x = t.string.x_bits();
        for (Eigen::Index j = 0; j < dim; ++j) {
            const auto col = static_cast<std::uint64_t>(j);
            m(static_cast<Eigen::Index>(col ^ x), j) += t.coefficient * t.string.phase_on(col);
        }
    }
    return m;
}

double PauliExpansion::max_imag() const noexcept {
    double m = 0.0;
    for (const auto &t : terms) {
        m = std::max(m, std::abs(t.coefficient.imag()));
    }
    return m;
}

void PauliExpansion::canonicalize() {
    std::unordered_map<std::uint64_t, cplx> acc;
    acc.reserve(terms.size());
    for (const auto &t : terms) {
        if (t.string.n_qubits() != n_qubits) {
            throw ContractViolation("PauliExpansion: term qubit count mismatch");
        }
        acc[pack(t.string)] += t.coefficient;
    }
    terms.clear();
    for (const auto &[key, c] : acc) {
        if (std::abs(c) > kDropTolerance) {
            terms.push_back({PauliString(n_qubits, key >> 32, key & 0xffffffffULL), c});
        }
    }
    std::sort(terms.begin(), terms.end(), [](const PauliTerm &a, const PauliTerm &b) {
        return a.string.sort_key() < b.string.sort_key();
    });
}

PauliExpansion decompose(const Eigen::MatrixXcd &A, std::string source_tag) {
    return decompose_impl(A, std::move(source_tag));
}

PauliExpansion decompose(const Eigen::MatrixXd &A, std::string source_tag) {
    return decompose(Eigen::MatrixXcd(A.cast<cplx>()), std::move(source_tag));
}

PauliExpansion adjoint_product(const PauliExpansion &a, const PauliExpansion &b,
                               ProductRoute route) {
    if (a.n_qubits != b.n_qubits) {
        throw ContractViolation("adjoint_product: qubit count mismatch");
    }
    std::string tag = "(" + a.source_tag + ")^dag(" + b.source_tag + ")";
    if (route == ProductRoute::dense) {
        const WideMatrix p = to_dense_wide(a).adjoint() * to_dense_wide(b);
        return decompose_impl(p, std::move(tag));
    }
    std::unordered_map<std::uint64_t, wide> acc;
    acc.reserve(std::min<std::size_t>(a.size() * b.size(), std::size_t{1} << 16));
    for (const auto &ta : a.terms) {
        const wide ca = std::conj(widen(ta.coefficient));
        for (const auto &tb : b.terms) {
            const auto prod = multiply(ta.string, tb.string);
            acc[pack(prod.string)] += ca * widen(tb.coefficient) * widen(prod.phase);
        }
    }
    return from_accumulator(a.n_qubits, acc, std::move(tag));
}

PauliExpansion normal_operator(const PauliExpansion &a, ProductRoute route) {
    auto out = adjoint_product(a, a, route);
    out.source_tag = a.source_tag + "^dag " + a.source_tag;
    return out;
}

PauliExpansion combine(const std::vector<const PauliExpansion *> &parts,
                       const std::vector<double> &weights, std::string source_tag) {
    if (parts.empty() || parts.size() != weights.size()) {
        throw ContractViolation("combine: need one weight per expansion");
    }
    PauliExpansion out;
    out.n_qubits = parts.front()->n_qubits;
    out.source_tag = std::move(source_tag);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i]->n_qubits != out.n_qubits) {
            throw ContractViolation("combine: qubit count mismatch");
        }
        for (const auto &t : parts[i]->terms) {
            out.terms.push_back({t.string, weights[i] * t.coefficient});
        }
    }
    out.canonicalize();
    return out;
}

void write_expansion(std::ostream &os, const PauliExpansion &e) {
    const auto old_precision = os.precision(17);
    for (const auto &t : e.terms) {
        os << t.string.to_text() << ' ' << t.coefficient.real() << ' ' << t.coefficient.imag()
           << '\n';
    }
    os.precision(old_precision);
}

PauliExpansion read_expansion(std::istream &is, std::string source_tag) {
    PauliExpansion out;
    out.source_tag = std::move(source_tag);
    out.n_qubits = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream ls(line);
        std::string text;
        double re = 0.0, im = 0.0;
        if (!(ls >> text >> re >> im)) {
            throw ContractViolation("read_expansion: malformed line " + std::to_string(line_no));
        }
        auto p = PauliString::from_text(text);
        if (out.n_qubits < 0) {
            out.n_qubits = p.n_qubits();
        } else if (p.n_qubits() != out.n_qubits) {
            throw ContractViolation("read_expansion: inconsistent string length on line " +
                                    std::to_string(line_no));
        }
        out.terms.push_back({p, cplx{re, im}});
    }
    if (out.n_qubits < 0) {
        out.n_qubits = 0;
    }
    out.canonicalize();
    return out;
}

} // namespace qspec::pauli
