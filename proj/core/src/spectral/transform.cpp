#include "qspec/spectral/transform.hpp"

#include "qspec/errors.hpp"

namespace qspec::spectral {

namespace {

// Reshape a grid vector (x fastest) into an nq x nq matrix G(ix, iy).
Eigen::MatrixXd as_grid(std::span<const double> values, Eigen::Index nq) {
    return Eigen::Map<const Eigen::MatrixXd>(values.data(), nq, nq);
}

} // namespace

Eigen::MatrixXd basis_table(const CompactBasis &basis, std::span<const double> nodes) {
    Eigen::MatrixXd table(basis.n_modes, static_cast<Eigen::Index>(nodes.size()));
    for (int k = 0; k < basis.n_modes; ++k) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            table(k, static_cast<Eigen::Index>(j)) = basis.value(k, nodes[j]);
        }
    }
    return table;
}

ForwardTransform forward_transform(std::span<const double> f_values, const CompactBasis &basis,
                                   const QuadratureRule &quad) {
    if (f_values.size() != quad.size()) {
        throw ContractViolation("forward_transform: expected " + std::to_string(quad.size()) +
                                " samples, got " + std::to_string(f_values.size()));
    }
    const auto phi = basis_table(basis, quad.nodes);
    Eigen::VectorXd wf(static_cast<Eigen::Index>(quad.size()));
    for (std::size_t j = 0; j < quad.size(); ++j) {
        wf(static_cast<Eigen::Index>(j)) = quad.weights[j] * f_values[j];
    }
    ForwardTransform out;
    out.coefficients = phi * wf;
    out.norm = out.coefficients.norm();
    return out;
}

ForwardTransform forward_transform(const SpectralSystem &sys, std::span<const double> f_values) {
    if (f_values.size() != sys.grid_size()) {
        throw ContractViolation("forward_transform: expected " + std::to_string(sys.grid_size()) +
                                " grid samples, got " + std::to_string(f_values.size()));
    }
    const auto weights = sys.grid_weights();
    std::vector<double> wf(f_values.size());
    for (std::size_t i = 0; i < wf.size(); ++i) {
        wf[i] = weights[i] * f_values[i];
    }
    ForwardTransform out;
    if (sys.dimension() == 1) {
        const auto phi = basis_table(sys.bases[0], sys.quadrature.nodes);
        out.coefficients = phi * Eigen::Map<const Eigen::VectorXd>(wf.data(), phi.cols());
    } else {
        const auto nq = static_cast<Eigen::Index>(sys.quadrature.size());
        const auto phix = basis_table(sys.bases[0], sys.quadrature.nodes);
        const auto phiy = basis_table(sys.bases[1], sys.quadrature.nodes);
        // F(kx, ky) = sum_{ix,iy} phix(kx,ix) W(ix,iy) phiy(ky,iy)
        const Eigen::MatrixXd f = phix * as_grid(wf, nq) * phiy.transpose();
        out.coefficients = Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
    }
    out.norm = out.coefficients.norm();
    return out;
}

std::vector<double> evaluate_on_grid(const SpectralSystem &sys,
                                     const Eigen::VectorXd &coefficients) {
    if (static_cast<std::size_t>(coefficients.size()) != sys.size()) {
        throw ContractViolation("evaluate_on_grid: coefficient length mismatch");
    }
    std::vector<double> out(sys.grid_size());
    if (sys.dimension() == 1) {
        const auto phi = basis_table(sys.bases[0], sys.quadrature.nodes);
        Eigen::Map<Eigen::VectorXd>(out.data(), phi.cols()) = phi.transpose() * coefficients;
        return out;
    }
    const Eigen::Index n = sys.n_modes();
    const auto nq = static_cast<Eigen::Index>(sys.quadrature.size());
    const auto phix = basis_table(sys.bases[0], sys.quadrature.nodes);
    const auto phiy = basis_table(sys.bases[1], sys.quadrature.nodes);
    const Eigen::Map<const Eigen::MatrixXd> alpha(coefficients.data(), n, n);
    const Eigen::MatrixXd u = phix.transpose() * alpha * phiy;
    Eigen::Map<Eigen::MatrixXd>(out.data(), nq, nq) = u;
    return out;
}

} // namespace qspec::spectral
