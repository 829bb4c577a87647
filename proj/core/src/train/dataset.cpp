#include "qspec/train/dataset.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qspec/errors.hpp"
#include "qspec/qsim/circuit.hpp"
#include "qspec/spectral/transform.hpp"

namespace qspec::train {

namespace {

constexpr double kZeroForcing = 1e-10;
constexpr int kMaxResample = 1000;

double draw(std::mt19937_64 &rng, const UniformRange &r) {
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

void check_range(const UniformRange &r, const char *name) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw ConfigError(std::string("dataset range ") + name + " is invalid");
    }
}

int qubits_for(std::size_t dim) {
    int n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    if ((std::size_t{1} << n) != dim) {
        throw ConfigError("shallow_ry needs a power-of-two system size, got " +
                          std::to_string(dim));
    }
    return n;
}

ForcingDraw sample(Generation g, std::mt19937_64 &rng, const DatasetSpec &spec, int n_qubits) {
    ForcingDraw d;
    switch (g) {
    case Generation::shallow_ry:
        d.theta.resize(static_cast<std::size_t>(n_qubits));
        for (auto &t : d.theta) {
            t = draw(rng, spec.theta);
        }
        break;
    case Generation::trig_1d:
    case Generation::trig_2d:
    case Generation::joint_k:
        d.h1 = draw(rng, spec.amplitude);
        d.m1 = draw(rng, spec.frequency);
        d.h2 = draw(rng, spec.amplitude);
        d.m2 = draw(rng, spec.frequency);
        if (g == Generation::joint_k) {
            d.wave_number_sq = draw(rng, spec.wave_number_sq);
        }
        break;
    case Generation::wave_family:
        d.omega = draw(rng, spec.omega);
        break;
    }
    return d;
}

} // namespace

std::string_view to_string(Generation g) noexcept {
    switch (g) {
    case Generation::shallow_ry:
        return "shallow_ry";
    case Generation::trig_1d:
        return "trig_1d";
    case Generation::trig_2d:
        return "trig_2d";
    case Generation::wave_family:
        return "wave_family";
    case Generation::joint_k:
        return "joint_k";
    }
    return "?";
}

Generation parse_generation(std::string_view name) {
    for (auto g : {Generation::shallow_ry, Generation::trig_1d, Generation::trig_2d,
                   Generation::wave_family, Generation::joint_k}) {
        if (to_string(g) == name) {
            return g;
        }
    }
    throw ConfigError("unknown dataset generation '" + std::string(name) + "'");
}

void DatasetSpec::validate() const {
    if (train_count < 1 || test_count < 1) {
        throw ConfigError("dataset needs at least one train and one test instance");
    }
    check_range(theta, "theta");
    check_range(amplitude, "amplitude");
    check_range(frequency, "frequency");
    check_range(omega, "omega");
    check_range(wave_number_sq, "wave_number_sq");
}

std::vector<double> forcing_values(Generation g, const ForcingDraw &d,
                                   const spectral::SpectralSystem &system) {
    const auto pts = system.grid_points();
    std::vector<double> f(pts.size());
    const double pi = std::numbers::pi;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const double x = pts[j][0];
        const double t = pts[j][1];
        switch (g) {
        case Generation::shallow_ry:
            throw ContractViolation("shallow_ry has no forcing function");
        case Generation::trig_1d:
            f[j] = d.h1 * std::sin(d.m1 * x) + d.h2 * std::cos(d.m2 * x);
            break;
        case Generation::trig_2d:
            f[j] = d.h1 * std::sin(d.m1 * (x + t)) + d.h2 * std::cos(d.m2 * (x + t));
            break;
        case Generation::joint_k: {
            const double s = system.dimension() == 2 ? x + t : x;
            f[j] = d.h1 * std::sin(d.m1 * s) + d.h2 * std::cos(d.m2 * s);
            break;
        }
        case Generation::wave_family: {
            const double wp = pi * (1 + d.omega);
            const double wm = pi * (1 - d.omega);
            f[j] = (1 + wp * wp * t * t / 2) * std::sin(wp * x) +
                   (1 + wm * wm * t * t / 2) * std::sin(wm * x);
            break;
        }
        }
    }
    return f;
}

Dataset generate_dataset(const DatasetSpec &spec, const spectral::SpectralSystem &system) {
    spec.validate();
    const Generation g = spec.generation;
    if (g == Generation::joint_k && !system.parametric) {
        throw ConfigError("joint_k generation needs a parametric (joint_helm) system");
    }
    if ((g == Generation::trig_2d || g == Generation::wave_family) && system.dimension() != 2) {
        throw ConfigError(std::string(to_string(g)) + " generation needs a 2D system");
    }
    if (g == Generation::trig_1d && system.dimension() != 1) {
        throw ConfigError("trig_1d generation needs a 1D system");
    }
    const int n_qubits = g == Generation::shallow_ry ? qubits_for(system.size()) : 0;

    std::mt19937_64 rng(spec.seed);
    Dataset out;
    auto make = [&](std::vector<Instance> &split, int count) {
        split.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            Instance inst;
            for (int attempt = 0;; ++attempt) {
                if (attempt == kMaxResample) {
                    throw ConfigError("forcing distribution keeps producing zero forcings");
                }
                inst.draw = sample(g, rng, spec, n_qubits);
                if (g == Generation::shallow_ry) {
                    const auto psi = qsim::build_ry_embedding(inst.draw.theta);
                    inst.forcing = psi.amplitudes.real();
                    inst.features.assign(inst.forcing.data(),
                                         inst.forcing.data() + inst.forcing.size());
                } else {
                    inst.features = forcing_values(g, inst.draw, system);
                    inst.forcing = spectral::forward_transform(system, inst.features).coefficients;
                }
                if (inst.forcing.norm() > kZeroForcing) {
                    break;
                }
                ++out.resampled;
            }
            if (spec.normalize_features && g != Generation::shallow_ry) {
                double n2 = 0.0;
                for (double v : inst.features) {
                    n2 += v * v;
                }
                for (auto &v : inst.features) {
                    v /= std::sqrt(n2);
                }
            }
            inst.wave_number_sq =
                g == Generation::joint_k ? inst.draw.wave_number_sq : system.params.wave_number_sq;
            if (g == Generation::joint_k) {
                inst.features.push_back(inst.wave_number_sq);
            }
            inst.truth = spectral::classical_solve(
                system, system.operator_at(inst.wave_number_sq), inst.forcing);
            split.push_back(std::move(inst));
        }
    };
    make(out.train, spec.train_count);
    make(out.test, spec.test_count);
    return out;
}

loss::LossContext make_context(const spectral::SpectralSystem &system,
                               const std::vector<Instance> &instances, Generation g) {
    std::vector<Eigen::VectorXd> forcings;
    std::vector<double> k2;
    for (const auto &inst : instances) {
        forcings.push_back(inst.forcing);
        k2.push_back(inst.wave_number_sq);
    }
    if (g == Generation::joint_k) {
        return loss::LossContext::parametric(system.parametric->B, system.parametric->C, forcings,
                                             k2);
    }
    return loss::LossContext::direct(system.A, forcings);
}

loss::LossContext make_context(const pauli::PauliExpansion &expansion_A,
                               const std::vector<Instance> &instances) {
    std::vector<Eigen::VectorXd> forcings;
    for (const auto &inst : instances) {
        forcings.push_back(inst.forcing);
    }
    return loss::LossContext::direct(expansion_A, forcings);
}

std::vector<std::vector<double>> features_of(const std::vector<Instance> &instances) {
    std::vector<std::vector<double>> out;
    out.reserve(instances.size());
    for (const auto &inst : instances) {
        out.push_back(inst.features);
    }
    return out;
}

} // namespace qspec::train
