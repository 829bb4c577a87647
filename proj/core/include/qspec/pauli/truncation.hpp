#pragma once

#include <cstddef>

#include "qspec/pauli/expansion.hpp"

namespace qspec::pauli {

struct TruncationDiagnostics {
    double rel_frobenius_error = 0.0; ///< ||A - A_trunc||_F / ||A||_F
    double condition_number = 0.0;    ///< 2-norm condition of A_trunc
    std::size_t term_count = 0;
};

struct Truncation {
    PauliExpansion expansion;
    TruncationDiagnostics diagnostics;
};

/// Keeps terms with |c| > threshold. Throws TruncationDegenerateError when
/// nothing survives and ContractViolation for a negative threshold.
[[nodiscard]] Truncation truncate(const PauliExpansion &e, double threshold);

} // namespace qspec::pauli
