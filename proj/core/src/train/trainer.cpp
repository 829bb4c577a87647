#include "qspec/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "qspec/errors.hpp"
#include "qspec/parallel.hpp"

namespace qspec::train {

std::string_view to_string(OptimizerKind k) noexcept {
    return k == OptimizerKind::adam ? "adam" : "lbfgs";
}

OptimizerKind parse_optimizer(std::string_view name) {
    if (name == "adam") {
        return OptimizerKind::adam;
    }
    if (name == "lbfgs") {
        return OptimizerKind::lbfgs;
    }
    throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(loss::Objective o) noexcept {
    switch (o) {
    case loss::Objective::phase_aware:
        return "phase_aware";
    case loss::Objective::unnormalized:
        return "unnormalized";
    case loss::Objective::vqls_standard:
        return "vqls_standard";
    }
    return "?";
}

loss::Objective parse_objective(std::string_view name) {
    if (name == "normalized") {
        return loss::Objective::phase_aware;
    }
    for (auto o : {loss::Objective::phase_aware, loss::Objective::unnormalized,
                   loss::Objective::vqls_standard}) {
        if (to_string(o) == name) {
            return o;
        }
    }
    throw ConfigError("unknown objective '" + std::string(name) + "'");
}

std::string_view to_string(loss::GradientMode m) noexcept {
    return m == loss::GradientMode::adjoint ? "adjoint" : "parameter_shift";
}

loss::GradientMode parse_gradient_mode(std::string_view name) {
    if (name == "adjoint") {
        return loss::GradientMode::adjoint;
    }
    if (name == "parameter_shift") {
        return loss::GradientMode::parameter_shift;
    }
    throw ConfigError("unknown gradient mode '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw ConfigError("train.epochs must be at least 1");
    }
    if (!(adam.learning_rate > 0)) {
        throw ConfigError("train.learning_rate must be positive");
    }
    if (eval_every < 1) {
        throw ConfigError("train.eval_every must be at least 1");
    }
}

namespace {

double mean(const std::vector<spectral::ErrorMetrics> &v, double spectral::ErrorMetrics::*f) {
    double s = 0.0;
    for (const auto &m : v) {
        s += m.*f;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd(const std::vector<spectral::ErrorMetrics> &v, double spectral::ErrorMetrics::*f) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double mu = mean(v, f);
    double s = 0.0;
    for (const auto &m : v) {
        s += (m.*f - mu) * (m.*f - mu);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace

double SplitEvaluation::mean_rel_l2() const { return mean(per_instance, &spectral::ErrorMetrics::rel_l2); }
double SplitEvaluation::sd_rel_l2() const { return sd(per_instance, &spectral::ErrorMetrics::rel_l2); }
double SplitEvaluation::mean_rel_linf() const { return mean(per_instance, &spectral::ErrorMetrics::rel_linf); }
double SplitEvaluation::sd_rel_linf() const { return sd(per_instance, &spectral::ErrorMetrics::rel_linf); }
double SplitEvaluation::mean_mae() const { return mean(per_instance, &spectral::ErrorMetrics::mae); }

double SplitEvaluation::best_rel_l2() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto &m : per_instance) {
        best = std::min(best, m.rel_l2);
    }
    return best;
}

std::vector<qsim::StateVector> predict_states(const qsim::GateProgram &program,
                                              const net::Network &network,
                                              const std::vector<Instance> &instances) {
    std::vector<qsim::StateVector> states(instances.size());
    parallel_for(instances.size(), [&](std::size_t i) {
        states[i] = qsim::run(program, network.forward(instances[i].features));
    });
    return states;
}

SplitEvaluation evaluate_split(loss::Objective objective, const spectral::SpectralSystem &system,
                               const qsim::GateProgram &program, const net::Network &network,
                               const Split &split) {
    const auto &instances = *split.instances;
    const auto &ctx = *split.context;
    if (ctx.instance_count() != instances.size()) {
        throw ContractViolation("evaluate_split: context and instances differ in size");
    }
    const auto states = predict_states(program, network, instances);
    const auto weights = system.grid_weights();
    SplitEvaluation out;
    out.loss = loss::evaluate(objective, ctx, states).total;
    out.per_instance.resize(instances.size());
    std::vector<char> warned(instances.size(), 0);
    parallel_for(instances.size(), [&](std::size_t i) {
        auto rec = loss::recover_solution(states[i], ctx, i);
        warned[i] = rec.phase_warning ? 1 : 0;
        const auto pred = spectral::make_solution_field(system, std::move(rec.coefficients));
        out.per_instance[i] = spectral::metrics(pred, instances[i].truth, weights);
    });
    for (std::size_t i = 0; i < warned.size(); ++i) {
        if (warned[i]) {
            out.phase_warnings.push_back(static_cast<int>(i));
        }
    }
    return out;
}

RunRecord train(const TrainConfig &config, const spectral::SpectralSystem &system,
                const qsim::GateProgram &program, net::Network &network, const Split &train_split,
                const Split &test_split) {
    config.validate();
    const auto features = features_of(*train_split.instances);
    const auto start = std::chrono::steady_clock::now();
    RunRecord record;

    auto elapsed = [&] {
        if (!config.record_wall_time) {
            return 0.0;
        }
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    auto bad = [&](double loss) {
        return !std::isfinite(loss) || loss > config.divergence_threshold;
    };
    auto add_row = [&](int epoch) {
        const auto tr = evaluate_split(config.objective, system, program, network, train_split);
        const auto te = evaluate_split(config.objective, system, program, network, test_split);
        EpochRow row;
        row.epoch = epoch;
        row.train_loss = tr.loss;
        row.test_loss = te.loss;
        row.train_rel_l2 = tr.mean_rel_l2();
        row.test_rel_l2 = te.mean_rel_l2();
        row.test_rel_linf = te.mean_rel_linf();
        row.test_mae = te.mean_mae();
        row.wall_seconds = elapsed();
        record.rows.push_back(row);
        if (std::isfinite(row.test_rel_l2) &&
            (record.best_epoch < 0 || row.test_rel_l2 < record.best_test_rel_l2)) {
            record.best_epoch = epoch;
            record.best_test_rel_l2 = row.test_rel_l2;
            record.best_network = network;
        }
        return !bad(row.train_loss);
    };

    auto objective = [&](std::span<const double> x, std::vector<double> &g) {
        std::copy(x.begin(), x.end(), network.parameters().begin());
        auto tg = loss::grad_total(config.objective, config.gradient_mode, *train_split.context,
                                   program, network, features);
        g = std::move(tg.parameters);
        return tg.loss.total;
    };

    try {
        if (!add_row(0)) {
            record.diverged = true;
            record.abort_reason = "initial loss is non-finite or above the divergence threshold";
            return record;
        }
        AdamState adam = AdamState::zeros(network.parameter_count());
        std::optional<Lbfgs> lbfgs;
        std::vector<double> x(network.parameters().begin(), network.parameters().end());
        if (config.optimizer == OptimizerKind::lbfgs) {
            lbfgs.emplace(config.lbfgs, objective);
        }
        for (int epoch = 1; epoch <= config.epochs; ++epoch) {
            double loss = 0.0;
            if (lbfgs) {
                loss = lbfgs->step(x);
                std::copy(x.begin(), x.end(), network.parameters().begin());
            } else {
                auto tg = loss::grad_total(config.objective, config.gradient_mode,
                                           *train_split.context, program, network, features);
                loss = tg.loss.total;
                if (!bad(loss)) {
                    adam_step(network.parameters(), tg.parameters, adam, config.adam);
                }
            }
            if (bad(loss)) {
                record.diverged = true;
                record.abort_reason = "train loss " + std::to_string(loss) + " at epoch " +
                                      std::to_string(epoch);
                break;
            }
            if (epoch % config.eval_every == 0 || epoch == config.epochs) {
                if (!add_row(epoch)) {
                    record.diverged = true;
                    record.abort_reason = "train loss diverged at epoch " + std::to_string(epoch);
                    break;
                }
            }
        }
    } catch (const NumericError &e) {
        record.diverged = true;
        record.abort_reason = e.what();
    } catch (const DegenerateDenominatorError &e) {
        record.diverged = true;
        record.abort_reason = e.what();
    }
    return record;
}

void write_run_record_csv(std::ostream &os, const RunRecord &record) {
    os << "epoch,train_loss,test_loss,train_rel_l2,test_rel_l2,test_rel_linf,test_mae,"
          "wall_seconds\n";
    const auto old = os.precision(17);
    for (const auto &r : record.rows) {
        os << r.epoch << ',' << r.train_loss << ',' << r.test_loss << ',' << r.train_rel_l2 << ','
           << r.test_rel_l2 << ',' << r.test_rel_linf << ',' << r.test_mae << ','
           << r.wall_seconds << '\n';
    }
    os.precision(old);
}

} // namespace qspec::train
