#include "qspec/qsim/circuit.hpp"

#include <cmath>
#include <string>

#include "qspec/errors.hpp"

namespace qspec::qsim {

namespace {

constexpr int kMaxQubits = 24;

using Mat2 = Eigen::Matrix2cd;

Mat2 single_qubit_matrix(const Gate &gate, double angle) {
    Mat2 m;
    switch (gate.kind) {
    case GateKind::ry: {
        const double c = std::cos(0.5 * angle);
        const double s = std::sin(0.5 * angle);
        m << c, -s, s, c;
        break;
    }
    case GateKind::rz:
        m << std::polar(1.0, -0.5 * angle), 0.0, 0.0, std::polar(1.0, 0.5 * angle);
        break;
    case GateKind::hadamard: {
        const double r = 1.0 / std::sqrt(2.0);
        m << r, r, r, -r;
        break;
    }
    case GateKind::cnot:
        throw ContractViolation("single_qubit_matrix: cnot is a two-qubit gate");
    }
    return m;
}

std::size_t qubit_bit(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

void check_qubit(int n_qubits, int q, const char *what) {
    if (q < 0 || q >= n_qubits) {
        throw ContractViolation(std::string("GateProgram: ") + what + " qubit " +
                                std::to_string(q) + " out of range");
    }
}

} // namespace

StateVector StateVector::zero(int n_qubits) {
    if (n_qubits < 0 || n_qubits > kMaxQubits) {
        throw ContractViolation("StateVector: qubit count out of range");
    }
    StateVector s;
    s.n_qubits = n_qubits;
    s.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
    s.amplitudes(0) = 1.0;
    return s;
}

void GateProgram::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits || n_angle_slots < 0) {
        throw ContractViolation("GateProgram: invalid qubit or slot count");
    }
    std::vector<int> uses(static_cast<std::size_t>(n_angle_slots), 0);
    for (const auto &g : gates) {
        check_qubit(n_qubits, g.target, "target");
        if (g.kind == GateKind::cnot) {
            check_qubit(n_qubits, g.control, "control");
            if (g.control == g.target) {
                throw ContractViolation("GateProgram: cnot control equals target");
            }
        }
        if (g.kind == GateKind::ry || g.kind == GateKind::rz) {
            if (g.slot < 0 || g.slot >= n_angle_slots) {
                throw ContractViolation("GateProgram: angle slot " + std::to_string(g.slot) +
                                        " out of range");
            }
            ++uses[static_cast<std::size_t>(g.slot)];
        }
    }
    for (std::size_t s = 0; s < uses.size(); ++s) {
        if (uses[s] != 1) {
            throw ContractViolation("GateProgram: angle slot " + std::to_string(s) + " used " +
                                    std::to_string(uses[s]) + " times");
        }
    }
}

GateProgram build_strongly_entangling(int n_qubits, int layers) {
    if (n_qubits < 2 || layers < 1) {
        throw ConfigError("strongly entangling ansatz needs n >= 2 and layers >= 1");
    }
    GateProgram p;
    p.n_qubits = n_qubits;
    p.n_angle_slots = 3 * n_qubits * layers;
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < n_qubits; ++q) {
            const int base = 3 * (l * n_qubits + q);
            p.ry(q, base + 2);
            p.rz(q, base + 1);
            p.ry(q, base);
        }
        const int r = (l % (n_qubits - 1)) + 1;
        for (int q = 0; q < n_qubits; ++q) {
            p.cnot(q, (q + r) % n_qubits);
        }
    }
    return p;
}

GateProgram build_hardware_efficient_ry(int n_qubits, int layers) {
    if (n_qubits < 2 || layers < 1) {
        throw ConfigError("hardware-efficient ansatz needs n >= 2 and layers >= 1");
    }
    GateProgram p;
    p.n_qubits = n_qubits;
    p.n_angle_slots = n_qubits * layers;
    for (int q = 0; q < n_qubits; ++q) {
        p.h(q);
    }
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < n_qubits; ++q) {
            p.ry(q, l * n_qubits + q);
        }
        for (int q = 0; q < n_qubits; ++q) {
            p.cnot(q, (q + 1) % n_qubits);
        }
    }
    return p;
}

StateVector build_ry_embedding(std::span<const double> angles) {
    const int n = static_cast<int>(angles.size());
    if (n < 1) {
        throw ContractViolation("build_ry_embedding: need at least one angle");
    }
    StateVector s = StateVector::zero(n);
    for (std::size_t j = 0; j < s.dimension(); ++j) {
        double a = 1.0;
        for (int q = 0; q < n; ++q) {
            const double half = 0.5 * angles[static_cast<std::size_t>(q)];
            a *= (j & qubit_bit(n, q)) ? std::sin(half) : std::cos(half);
        }
        s.amplitudes(static_cast<Eigen::Index>(j)) = a;
    }
    return s;
}

void apply_gate(StateVector &state, const Gate &gate, double angle, bool inverse) {
    auto &v = state.amplitudes;
    const std::size_t dim = state.dimension();
    const std::size_t tbit = qubit_bit(state.n_qubits, gate.target);
    if (gate.kind == GateKind::cnot) {
        const std::size_t cbit = qubit_bit(state.n_qubits, gate.control);
        for (std::size_t j = 0; j < dim; ++j) {
            if ((j & cbit) && !(j & tbit)) {
                std::swap(v(static_cast<Eigen::Index>(j)), v(static_cast<Eigen::Index>(j | tbit)));
            }
        }
        return;
    }
    Mat2 m = single_qubit_matrix(gate, angle);
    if (inverse) {
        m.adjointInPlace();
    }
    for (std::size_t j = 0; j < dim; ++j) {
        if (j & tbit) {
            continue;
        }
        const auto i0 = static_cast<Eigen::Index>(j);
        const auto i1 = static_cast<Eigen::Index>(j | tbit);
        const cplx a0 = v(i0);
        const cplx a1 = v(i1);
        v(i0) = m(0, 0) * a0 + m(0, 1) * a1;
        v(i1) = m(1, 0) * a0 + m(1, 1) * a1;
    }
}

StateVector run(const GateProgram &program, std::span<const double> angles) {
    if (angles.size() != static_cast<std::size_t>(program.n_angle_slots)) {
        throw ContractViolation("run: expected " + std::to_string(program.n_angle_slots) +
                                " angles, got " + std::to_string(angles.size()));
    }
    StateVector s = StateVector::zero(program.n_qubits);
    for (const auto &g : program.gates) {
        const double angle = g.slot >= 0 ? angles[static_cast<std::size_t>(g.slot)] : 0.0;
        apply_gate(s, g, angle);
    }
    return s;
}

Eigen::MatrixXcd gate_matrix(int n_qubits, const Gate &gate, double angle) {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    if (gate.kind == GateKind::cnot) {
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
        const std::size_t cbit = qubit_bit(n_qubits, gate.control);
        const std::size_t tbit = qubit_bit(n_qubits, gate.target);
        for (std::size_t j = 0; j < static_cast<std::size_t>(dim); ++j) {
            const std::size_t out = (j & cbit) ? (j ^ tbit) : j;
            u(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(j)) = 1.0;
        }
        return u;
    }
    // I (x) ... (x) m (x) ... (x) I with qubit 0 outermost.
    const Mat2 m = single_qubit_matrix(gate, angle);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q) {
        const Eigen::MatrixXcd f = q == gate.target ? Eigen::MatrixXcd(m)
                                                    : Eigen::MatrixXcd::Identity(2, 2);
        Eigen::MatrixXcd next(u.rows() * 2, u.cols() * 2);
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            for (Eigen::Index c = 0; c < u.cols(); ++c) {
                next.block(2 * r, 2 * c, 2, 2) = u(r, c) * f;
            }
        }
        u = std::move(next);
    }
    return u;
}

Eigen::MatrixXcd program_unitary(const GateProgram &program, std::span<const double> angles) {
    const Eigen::Index dim = Eigen::Index{1} << program.n_qubits;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto &g : program.gates) {
        const double angle = g.slot >= 0 ? angles[static_cast<std::size_t>(g.slot)] : 0.0;
        u = gate_matrix(program.n_qubits, g, angle) * u;
    }
    return u;
}

} // namespace qspec::qsim
