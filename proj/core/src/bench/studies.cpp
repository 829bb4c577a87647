#include "qspec/bench/studies.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "qspec/pauli/truncation.hpp"
#include "qspec/spectral/solve.hpp"

namespace qspec::bench {

namespace {

int qubits_of(std::size_t dim) {
    int n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    return n;
}

std::string bc_label(const ExperimentConfig &c) {
    std::string out;
    for (std::size_t i = 0; i < c.bc.size(); ++i) {
        out += (i ? "/" : "") + c.bc[i];
    }
    return out;
}

struct Prepared {
    spectral::SpectralSystem system;
    train::Dataset data;
    loss::LossContext train_ctx;
    loss::LossContext test_ctx;
    qsim::GateProgram program;
    net::NetworkSpec net_spec;
};

Prepared prepare(const ExperimentConfig &c) {
    auto system = build_system(c);
    auto ds = c.dataset;
    ds.seed = c.seed;
    auto data = train::generate_dataset(ds, system);
    auto trc = train::make_context(system, data.train, ds.generation);
    auto tec = train::make_context(system, data.test, ds.generation);
    auto program = build_program(c, qubits_of(system.size()));
    auto spec = build_network_spec(c, system, program.n_angle_slots);
    return {std::move(system), std::move(data), std::move(trc), std::move(tec),
            std::move(program), std::move(spec)};
}

std::vector<double> overlaps(const Prepared &p, const net::Network &network) {
    const auto states = train::predict_states(p.program, network, p.data.test);
    std::vector<double> out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto rec = loss::recover_solution(states[i], p.test_ctx, i);
        const auto &u = p.data.test[i].truth.coefficients;
        out.push_back(rec.coefficients.dot(u) / (rec.coefficients.norm() * u.norm()));
    }
    return out;
}

spectral::PdeKind with_dimension(spectral::PdeKind pde, int d) {
    using spectral::PdeKind;
    switch (pde) {
    case PdeKind::rd1d:
    case PdeKind::rd2d:
        return d == 1 ? PdeKind::rd1d : PdeKind::rd2d;
    case PdeKind::helm1d:
    case PdeKind::helm2d:
        return d == 1 ? PdeKind::helm1d : PdeKind::helm2d;
    case PdeKind::cd1d:
    case PdeKind::cd2d:
        return d == 1 ? PdeKind::cd1d : PdeKind::cd2d;
    case PdeKind::wave1d:
        if (d != 2) {
            throw ConfigKeyError("scaling.dimensions", "wave1d is only defined on a 2D grid");
        }
        return pde;
    case PdeKind::joint_helm:
        return pde;
    }
    return pde;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(item);
    }
    return out;
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig &c) {
    c.validate();
    const auto p = prepare(c);
    auto network = net::Network::init(p.net_spec, c.seed + 1);
    RunOutcome out;
    out.resampled = p.data.resampled;
    if (p.train_ctx.is_parametric()) {
        const auto &pe = p.train_ctx.parametric_expansions();
        out.terms_A = pe.S.size() + pe.M.size();
    } else {
        out.terms_A = p.train_ctx.expansion_A().size();
        out.groups_A = p.train_ctx.grouping_num().size();
    }
    out.record = train::train(c.train, p.system, p.program, network, {&p.train_ctx, &p.data.train},
                              {&p.test_ctx, &p.data.test});
    const net::Network &best = out.record.best_network ? *out.record.best_network : network;
    out.test = train::evaluate_split(c.train.objective, p.system, p.program, best,
                                     {&p.test_ctx, &p.data.test});
    auto &r = out.row;
    r.key = c.name;
    r.pde = spectral::to_string(c.pde);
    r.bc = bc_label(c);
    r.n_modes = c.n_modes;
    r.n_qubits = qubits_of(p.system.size());
    r.mean_rel_l2 = out.test.mean_rel_l2();
    r.sd_rel_l2 = out.test.sd_rel_l2();
    r.mean_rel_linf = out.test.mean_rel_linf();
    r.sd_rel_linf = out.test.sd_rel_linf();
    r.mean_mae = out.test.mean_mae();
    r.best_rel_l2 = out.test.best_rel_l2();
    return out;
}

std::vector<TruncationRow> truncation_study(const ExperimentConfig &c) {
    c.validate();
    const auto system = build_system(c);
    const Eigen::MatrixXd A = system.operator_at(c.params.wave_number_sq);
    const auto full = pauli::decompose(A, "A");
    auto ds = c.dataset;
    ds.seed = c.seed;
    const auto data = train::generate_dataset(ds, system);
    const auto weights = system.grid_weights();
    std::vector<TruncationRow> rows;
    for (double thr : c.thresholds) {
        TruncationRow row;
        row.threshold = thr;
        try {
            const auto t = pauli::truncate(full, thr);
            row.term_count = t.diagnostics.term_count;
            row.rel_frobenius = t.diagnostics.rel_frobenius_error;
            row.condition_number = t.diagnostics.condition_number;
            const Eigen::MatrixXd At = t.expansion.to_dense().real();
            double sum = 0.0;
            for (const auto &inst : data.train) {
                try {
                    const auto approx = spectral::classical_solve(system, At, inst.forcing);
                    sum += spectral::metrics(approx, inst.truth, weights).rel_l2;
                } catch (const SingularSystemError &) {
                    sum = std::numeric_limits<double>::infinity();
                }
            }
            row.solution_error = sum / static_cast<double>(data.train.size());
        } catch (const TruncationDegenerateError &) {
            row.degenerate = true;
            row.rel_frobenius = 1.0;
            row.condition_number = std::numeric_limits<double>::infinity();
            row.solution_error = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

ScalingRow scaling_row(spectral::PdeKind family, const ExperimentConfig &c, int n_modes,
                       int dimension) {
    std::size_t k = 1;
    for (int i = 0; i < dimension; ++i) {
        k *= static_cast<std::size_t>(n_modes);
    }
    if (k > kMaxScalingSize) {
        throw ConfigKeyError("scaling.n_modes", "system size " + std::to_string(k) +
                                                    " exceeds the limit of " +
                                                    std::to_string(kMaxScalingSize));
    }
    ExperimentConfig sc = c;
    sc.pde = with_dimension(family, dimension);
    sc.n_modes = n_modes;
    sc.params.joint_dimension = dimension;
    sc.bc = {c.bc.front()};
    const auto system = build_system(sc);
    const auto eA = pauli::decompose(system.operator_at(c.params.wave_number_sq), "A");
    const auto eN = pauli::normal_operator(eA, pauli::ProductRoute::dense);
    ScalingRow row;
    row.pde = spectral::to_string(sc.pde);
    row.n_modes = n_modes;
    row.dimension = dimension;
    row.n_qubits = qubits_of(system.size());
    row.terms_A = pauli::count_measurements(eA, false);
    row.groups_A = pauli::count_measurements(eA, true);
    row.terms_AdagA = pauli::count_measurements(eN, false);
    row.groups_AdagA = pauli::count_measurements(eN, true);
    row.vqls_pairwise = row.terms_A * row.terms_A;
    return row;
}

std::vector<ScalingRow> scaling_study(const ExperimentConfig &c) {
    c.validate();
    std::vector<ScalingRow> rows;
    for (int d : c.scaling_dimensions) {
        for (int n : c.scaling_modes) {
            rows.push_back(scaling_row(c.pde, c, n, d));
        }
    }
    return rows;
}

SignFlipReport sign_flip_demo(const ExperimentConfig &c) {
    c.validate();
    const auto p = prepare(c);
    SignFlipReport report;
    report.phase_aware_all_positive = true;

    auto arm_config = [&](loss::Objective obj, int epochs) {
        auto t = c.train;
        t.objective = obj;
        t.epochs = epochs;
        t.eval_every = epochs;
        t.record_wall_time = false;
        return t;
    };
    const std::size_t last = p.net_spec.layers.size() - 1;
    const auto &out_layer = p.net_spec.layers.back();
    const std::size_t bias0 = static_cast<std::size_t>(out_layer.in * out_layer.out);

    for (int s = 0; s < c.signflip_seeds; ++s) {
        const std::uint64_t seed = c.seed + 1 + static_cast<std::uint64_t>(s);
        auto base = net::Network::init(p.net_spec, seed);
        (void)train::train(arm_config(loss::Objective::phase_aware, c.signflip_pretrain_epochs),
                           p.system, p.program, base, {&p.train_ctx, &p.data.train},
                           {&p.test_ctx, &p.data.test});

        // Identity check on the pretrained states and their exact negations.
        const auto plus = train::predict_states(p.program, base, p.data.test);
        auto minus = plus;
        for (auto &st : minus) {
            st.amplitudes = -st.amplitudes;
        }
        for (std::size_t i = 0; i < plus.size(); ++i) {
            const auto tp = loss::overlap_terms(p.test_ctx, i, plus[i]);
            const auto tm = loss::overlap_terms(p.test_ctx, i, minus[i]);
            using loss::Objective;
            report.identity_residual_phase_aware = std::max(
                report.identity_residual_phase_aware,
                std::abs(loss::instance_loss(Objective::phase_aware, tm) -
                         (2.0 - loss::instance_loss(Objective::phase_aware, tp))));
            report.identity_residual_standard = std::max(
                report.identity_residual_standard,
                std::abs(loss::instance_loss(Objective::vqls_standard, tm) -
                         loss::instance_loss(Objective::vqls_standard, tp)));
        }

        // Slot 0 drives exactly one rotation; R(t + 2 pi) = -R(t).
        auto flipped = base;
        flipped.parameters()[flipped.layer_offset(last) + bias0] += 2 * std::numbers::pi;

        auto run_arm = [&](const char *name, loss::Objective obj, net::Network network) {
            const auto rec =
                train::train(arm_config(obj, c.signflip_epochs), p.system, p.program, network,
                             {&p.train_ctx, &p.data.train}, {&p.test_ctx, &p.data.test});
            const auto ov = overlaps(p, network);
            SignFlipRow row;
            row.seed = s;
            row.arm = name;
            row.min_overlap = *std::min_element(ov.begin(), ov.end());
            double sum = 0.0;
            for (double v : ov) {
                sum += v;
            }
            row.mean_overlap = sum / static_cast<double>(ov.size());
            row.final_loss = rec.rows.back().train_loss;
            report.rows.push_back(row);
            return row;
        };

        const auto standard = run_arm("vqls_standard", loss::Objective::vqls_standard, flipped);
        report.standard_any_negative = report.standard_any_negative || standard.mean_overlap < 0;

        auto perturbed = flipped;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, c.signflip_perturbation);
        for (int o = 0; o < out_layer.out; ++o) {
            perturbed.parameters()[perturbed.layer_offset(last) + bias0 +
                                   static_cast<std::size_t>(o)] += noise(rng);
        }
        const auto aware = run_arm("phase_aware", loss::Objective::phase_aware, perturbed);
        report.phase_aware_all_positive = report.phase_aware_all_positive && aware.min_overlap > 0;
    }
    return report;
}

TableResult collect_tables(const std::vector<std::filesystem::path> &dirs) {
    TableResult out;
    for (const auto &dir : dirs) {
        const auto file = dir / "error_table.csv";
        std::ifstream in(file);
        if (!in) {
            out.warnings.push_back("no error_table.csv in " + dir.string() + ", skipped");
            continue;
        }
        auto rows = read_error_table_csv(in);
        if (rows.empty()) {
            out.warnings.push_back("empty error table in " + dir.string() + ", skipped");
            continue;
        }
        auto name = dir.filename().string();
        if (name.empty() || name == ".") {
            name = dir.parent_path().filename().string();
        }
        for (auto &r : rows) {
            r.key = name;
            out.rows.push_back(std::move(r));
        }
    }
    return out;
}

void write_error_table_csv(std::ostream &os, const std::vector<ErrorTableRow> &rows) {
    os << "key,pde,bc,N(n),mean_rel_l2,sd_rel_l2,mean_rel_linf,sd_rel_linf,mean_mae,best_rel_l2\n";
    for (const auto &r : rows) {
        os << r.key << ',' << r.pde << ',' << r.bc << ',' << r.n_modes << '(' << r.n_qubits << ")"
           << ',' << format_number(r.mean_rel_l2) << ',' << format_number(r.sd_rel_l2) << ','
           << format_number(r.mean_rel_linf) << ',' << format_number(r.sd_rel_linf) << ','
           << format_number(r.mean_mae) << ',' << format_number(r.best_rel_l2) << '\n';
    }
}

std::vector<ErrorTableRow> read_error_table_csv(std::istream &is) {
    std::vector<ErrorTableRow> rows;
    std::string line;
    if (!std::getline(is, line)) {
        return rows;
    }
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 10) {
            throw ConfigError("malformed error table row: " + line);
        }
        ErrorTableRow r;
        r.key = f[0];
        r.pde = f[1];
        r.bc = f[2];
        const auto open = f[3].find('(');
        r.n_modes = std::stoi(f[3].substr(0, open));
        r.n_qubits = std::stoi(f[3].substr(open + 1));
        r.mean_rel_l2 = std::stod(f[4]);
        r.sd_rel_l2 = std::stod(f[5]);
        r.mean_rel_linf = std::stod(f[6]);
        r.sd_rel_linf = std::stod(f[7]);
        r.mean_mae = std::stod(f[8]);
        r.best_rel_l2 = std::stod(f[9]);
        rows.push_back(r);
    }
    return rows;
}

void write_truncation_csv(std::ostream &os, const std::vector<TruncationRow> &rows) {
    os << "threshold,term_count,rel_frobenius,condition_number,theoretical_solution_error,"
          "degenerate\n";
    for (const auto &r : rows) {
        os << format_number(r.threshold) << ',' << r.term_count << ','
           << format_number(r.rel_frobenius) << ',' << format_number(r.condition_number) << ','
           << format_number(r.solution_error) << ',' << (r.degenerate ? 1 : 0) << '\n';
    }
}

void write_scaling_csv(std::ostream &os, const std::vector<ScalingRow> &rows) {
    os << "pde,N,d,n_qubits,terms_A,groups_A,terms_AdagA,groups_AdagA,vqls_pairwise\n";
    for (const auto &r : rows) {
        os << r.pde << ',' << r.n_modes << ',' << r.dimension << ',' << r.n_qubits << ','
           << r.terms_A << ',' << r.groups_A << ',' << r.terms_AdagA << ',' << r.groups_AdagA
           << ',' << r.vqls_pairwise << '\n';
    }
}

void write_signflip_csv(std::ostream &os, const SignFlipReport &report) {
    os << "seed,arm,mean_overlap,min_overlap,final_loss\n";
    for (const auto &r : report.rows) {
        os << r.seed << ',' << r.arm << ',' << format_number(r.mean_overlap) << ','
           << format_number(r.min_overlap) << ',' << format_number(r.final_loss) << '\n';
    }
}

} // namespace qspec::bench
