#include "qspec/pauli/truncation.hpp"

#include <limits>
#include <sstream>

#include "qspec/errors.hpp"

namespace qspec::pauli {

Truncation truncate(const PauliExpansion &e, double threshold) {
    if (!(threshold >= 0.0)) {
        throw ContractViolation("truncate: threshold must be non-negative");
    }
    Truncation out;
    out.expansion.n_qubits = e.n_qubits;
    out.expansion.source_tag = e.source_tag;
    for (const auto &t : e.terms) {
        if (std::abs(t.coefficient) > threshold) {
            out.expansion.terms.push_back(t);
        }
    }
    if (out.expansion.empty()) {
        std::ostringstream msg;
        msg << "truncate: threshold " << threshold << " removes all " << e.size() << " terms";
        throw TruncationDegenerateError(msg.str());
    }

    const Eigen::MatrixXcd full = e.to_dense();
    const Eigen::MatrixXcd kept = out.expansion.to_dense();
    const double ref = full.norm();
    out.diagnostics.rel_frobenius_error = ref > 0.0 ? (full - kept).norm() / ref : 0.0;
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(kept);
    const auto &s = svd.singularValues();
    out.diagnostics.condition_number = s(s.size() - 1) > 0.0
                                           ? s(0) / s(s.size() - 1)
                                           : std::numeric_limits<double>::infinity();
    out.diagnostics.term_count = out.expansion.size();
    return out;
}

} // namespace qspec::pauli
