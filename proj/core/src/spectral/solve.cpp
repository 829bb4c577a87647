#include "qspec/spectral/solve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "qspec/errors.hpp"
#include "qspec/spectral/transform.hpp"

namespace qspec::spectral {

namespace {

// Reciprocal condition below this is treated as rank deficient.
constexpr double kMinReciprocalCondition = 1e-14;

} // namespace

Eigen::VectorXd dense_solve(const Eigen::MatrixXd &A, const Eigen::VectorXd &rhs) {
    if (A.rows() != A.cols() || A.rows() != rhs.size()) {
        throw ContractViolation("dense_solve: dimension mismatch");
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    // The 1-norm estimate can miss exact zero pivots, so the pivot spread
    // is checked as well.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double spread = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
    const double rcond = std::min(lu.rcond(), spread);
    if (!(rcond > kMinReciprocalCondition)) {
        const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
        std::ostringstream msg;
        msg << "dense_solve: matrix is singular to working precision (condition estimate "
            << cond << ")";
        throw SingularSystemError(msg.str(), cond);
    }
    Eigen::VectorXd x = lu.solve(rhs);
    if (!x.allFinite()) {
        throw SingularSystemError("dense_solve: non-finite solution", 1.0 / rcond);
    }
    return x;
}

SolutionField make_solution_field(const SpectralSystem &sys, Eigen::VectorXd coefficients,
                                  double scale) {
    SolutionField out;
    out.nodal_values = evaluate_on_grid(sys, coefficients);
    out.coefficients = std::move(coefficients);
    out.scale = scale;
    return out;
}

SolutionField classical_solve(const SpectralSystem &sys, const Eigen::MatrixXd &A,
                              const Eigen::VectorXd &F) {
    return make_solution_field(sys, dense_solve(A, F));
}

SolutionField classical_solve(const SpectralSystem &sys, const Eigen::VectorXd &F) {
    return classical_solve(sys, sys.A, F);
}

double condition_number(const Eigen::MatrixXd &A) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto &s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / smin;
}

ErrorMetrics metrics(std::span<const double> pred, std::span<const double> truth,
                     std::span<const double> weights) {
    if (pred.size() != truth.size() || pred.size() != weights.size() || pred.empty()) {
        throw ContractViolation("metrics: prediction, truth and weights must share one grid");
    }
    double abs_sum = 0.0, err2 = 0.0, ref2 = 0.0, err_max = 0.0, ref_max = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        const double e = pred[j] - truth[j];
        abs_sum += std::abs(e);
        err2 += weights[j] * e * e;
        ref2 += weights[j] * truth[j] * truth[j];
        err_max = std::max(err_max, std::abs(e));
        ref_max = std::max(ref_max, std::abs(truth[j]));
    }
    if (ref2 <= 0.0 || ref_max <= 0.0) {
        throw DivisionGuardError("metrics: reference solution has zero norm");
    }
    return {abs_sum / static_cast<double>(pred.size()), std::sqrt(err2 / ref2), err_max / ref_max};
}

ErrorMetrics metrics(const SolutionField &pred, const SolutionField &truth,
                     std::span<const double> weights) {
    return metrics(pred.nodal_values, truth.nodal_values, weights);
}

void write_matrix_csv(std::ostream &os, const Eigen::MatrixXd &m) {
    const auto old_precision = os.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                os << ',';
            }
            os << m(i, j);
        }
        os << '\n';
    }
    os.precision(old_precision);
}

} // namespace qspec::spectral
