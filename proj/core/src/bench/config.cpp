#include "qspec/bench/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qspec::bench {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) {
        return out;
    }
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next - pos)));
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

std::string fmt(double v) { return format_number(v); }

template <class T> T parse_number(std::string_view s) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

bool parse_bool(std::string_view s) {
    if (s == "true") {
        return true;
    }
    if (s == "false") {
        return false;
    }
    throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
}

template <class T> std::vector<T> parse_list(std::string_view s) {
    std::vector<T> out;
    for (auto item : split(s, ',')) {
        out.push_back(parse_number<T>(item));
    }
    return out;
}

template <class T> std::string fmt_list(const std::vector<T> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out += ',';
        }
        if constexpr (std::is_floating_point_v<T>) {
            out += fmt(v[i]);
        } else {
            out += std::to_string(v[i]);
        }
    }
    return out;
}

train::UniformRange parse_range(std::string_view s) {
    const auto v = parse_list<double>(s);
    if (v.size() != 2) {
        throw std::invalid_argument("expected 'lo,hi'");
    }
    return {v[0], v[1]};
}

std::string fmt_range(const train::UniformRange &r) { return fmt(r.lo) + "," + fmt(r.hi); }

struct Key {
    std::string section;
    std::string name;
    std::function<void(ExperimentConfig &, std::string_view)> set;
    std::function<std::string(const ExperimentConfig &)> get;
};

#define QSPEC_KEY(sec, key, setter, getter)                                                        \
    Key {                                                                                          \
        sec, key, [](ExperimentConfig & c, std::string_view v) { setter; },                        \
            [](const ExperimentConfig &c) -> std::string { return getter; }                        \
    }

const std::vector<Key> &keys() {
    static const std::vector<Key> table = {
        QSPEC_KEY("experiment", "name", c.name = std::string(v), c.name),
        QSPEC_KEY("experiment", "pde", c.pde = spectral::parse_pde(v),
                  std::string(spectral::to_string(c.pde))),
        QSPEC_KEY("experiment", "seed", c.seed = parse_number<std::uint64_t>(v),
                  std::to_string(c.seed)),

        QSPEC_KEY("spectral", "n_modes", c.n_modes = parse_number<int>(v),
                  std::to_string(c.n_modes)),
        QSPEC_KEY("spectral", "bc",
                  {
                      c.bc.clear();
                      for (auto s : split(v, ',')) {
                          c.bc.emplace_back(s);
                      }
                  },
                  [&c] {
                      std::string out;
                      for (std::size_t i = 0; i < c.bc.size(); ++i) {
                          out += (i ? "," : "") + c.bc[i];
                      }
                      return out;
                  }()),
        QSPEC_KEY("spectral", "epsilon", c.params.epsilon = parse_number<double>(v),
                  fmt(c.params.epsilon)),
        QSPEC_KEY("spectral", "wave_number_sq", c.params.wave_number_sq = parse_number<double>(v),
                  fmt(c.params.wave_number_sq)),
        QSPEC_KEY("spectral", "nu", c.params.nu = parse_number<double>(v), fmt(c.params.nu)),
        QSPEC_KEY("spectral", "nu_y", c.params.nu_y = parse_number<double>(v),
                  fmt(c.params.nu_y)),
        QSPEC_KEY("spectral", "wave_horizon", c.params.wave_horizon = parse_number<double>(v),
                  fmt(c.params.wave_horizon)),
        QSPEC_KEY("spectral", "joint_dimension", c.params.joint_dimension = parse_number<int>(v),
                  std::to_string(c.params.joint_dimension)),

        QSPEC_KEY("circuit", "ansatz", c.ansatz = parse_ansatz(v),
                  std::string(to_string(c.ansatz))),
        QSPEC_KEY("circuit", "layers", c.layers = parse_number<int>(v), std::to_string(c.layers)),

        QSPEC_KEY("network", "hidden", c.hidden = parse_list<int>(v), fmt_list(c.hidden)),
        QSPEC_KEY("network", "activation", c.activation = net::parse_activation(v),
                  std::string(net::to_string(c.activation))),
        QSPEC_KEY("network", "conv_channels", c.conv_channels = parse_list<int>(v),
                  fmt_list(c.conv_channels)),
        QSPEC_KEY("network", "kernel", c.kernel = parse_number<int>(v), std::to_string(c.kernel)),

        QSPEC_KEY("dataset", "generation", c.dataset.generation = train::parse_generation(v),
                  std::string(train::to_string(c.dataset.generation))),
        QSPEC_KEY("dataset", "train_count", c.dataset.train_count = parse_number<int>(v),
                  std::to_string(c.dataset.train_count)),
        QSPEC_KEY("dataset", "test_count", c.dataset.test_count = parse_number<int>(v),
                  std::to_string(c.dataset.test_count)),
        QSPEC_KEY("dataset", "theta", c.dataset.theta = parse_range(v), fmt_range(c.dataset.theta)),
        QSPEC_KEY("dataset", "amplitude", c.dataset.amplitude = parse_range(v),
                  fmt_range(c.dataset.amplitude)),
        QSPEC_KEY("dataset", "frequency", c.dataset.frequency = parse_range(v),
                  fmt_range(c.dataset.frequency)),
        QSPEC_KEY("dataset", "omega", c.dataset.omega = parse_range(v), fmt_range(c.dataset.omega)),
        QSPEC_KEY("dataset", "wave_number_sq", c.dataset.wave_number_sq = parse_range(v),
                  fmt_range(c.dataset.wave_number_sq)),
        QSPEC_KEY("dataset", "normalize_features", c.dataset.normalize_features = parse_bool(v),
                  c.dataset.normalize_features ? "true" : "false"),

        QSPEC_KEY("train", "objective", c.train.objective = train::parse_objective(v),
                  std::string(train::to_string(c.train.objective))),
        QSPEC_KEY("train", "optimizer", c.train.optimizer = train::parse_optimizer(v),
                  std::string(train::to_string(c.train.optimizer))),
        QSPEC_KEY("train", "learning_rate", c.train.adam.learning_rate = parse_number<double>(v),
                  fmt(c.train.adam.learning_rate)),
        QSPEC_KEY("train", "beta1", c.train.adam.beta1 = parse_number<double>(v),
                  fmt(c.train.adam.beta1)),
        QSPEC_KEY("train", "beta2", c.train.adam.beta2 = parse_number<double>(v),
                  fmt(c.train.adam.beta2)),
        QSPEC_KEY("train", "epsilon", c.train.adam.epsilon = parse_number<double>(v),
                  fmt(c.train.adam.epsilon)),
        QSPEC_KEY("train", "epochs", c.train.epochs = parse_number<int>(v),
                  std::to_string(c.train.epochs)),
        QSPEC_KEY("train", "gradient_mode", c.train.gradient_mode = train::parse_gradient_mode(v),
                  std::string(train::to_string(c.train.gradient_mode))),
        QSPEC_KEY("train", "eval_every", c.train.eval_every = parse_number<int>(v),
                  std::to_string(c.train.eval_every)),
        QSPEC_KEY("train", "divergence_threshold",
                  c.train.divergence_threshold = parse_number<double>(v),
                  fmt(c.train.divergence_threshold)),
        QSPEC_KEY("train", "record_wall_time", c.train.record_wall_time = parse_bool(v),
                  c.train.record_wall_time ? "true" : "false"),
        QSPEC_KEY("train", "lbfgs_history", c.train.lbfgs.history = parse_number<int>(v),
                  std::to_string(c.train.lbfgs.history)),

        QSPEC_KEY("truncation", "thresholds", c.thresholds = parse_list<double>(v),
                  fmt_list(c.thresholds)),

        QSPEC_KEY("scaling", "n_modes", c.scaling_modes = parse_list<int>(v),
                  fmt_list(c.scaling_modes)),
        QSPEC_KEY("scaling", "dimensions", c.scaling_dimensions = parse_list<int>(v),
                  fmt_list(c.scaling_dimensions)),

        QSPEC_KEY("signflip", "seeds", c.signflip_seeds = parse_number<int>(v),
                  std::to_string(c.signflip_seeds)),
        QSPEC_KEY("signflip", "pretrain_epochs", c.signflip_pretrain_epochs = parse_number<int>(v),
                  std::to_string(c.signflip_pretrain_epochs)),
        QSPEC_KEY("signflip", "epochs", c.signflip_epochs = parse_number<int>(v),
                  std::to_string(c.signflip_epochs)),
        QSPEC_KEY("signflip", "perturbation", c.signflip_perturbation = parse_number<double>(v),
                  fmt(c.signflip_perturbation)),

        QSPEC_KEY("study", "truncation_sweep", c.truncation_sweep = parse_bool(v),
                  c.truncation_sweep ? "true" : "false"),
        QSPEC_KEY("study", "measurement_scaling", c.measurement_scaling = parse_bool(v),
                  c.measurement_scaling ? "true" : "false"),
        QSPEC_KEY("study", "sign_flip_demo", c.sign_flip_demo = parse_bool(v),
                  c.sign_flip_demo ? "true" : "false"),
        QSPEC_KEY("study", "joint_param", c.joint_param = parse_bool(v),
                  c.joint_param ? "true" : "false"),
    };
    return table;
}

#undef QSPEC_KEY

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int direction_count(const ExperimentConfig &c) {
    using spectral::PdeKind;
    switch (c.pde) {
    case PdeKind::rd2d:
    case PdeKind::helm2d:
    case PdeKind::cd2d:
    case PdeKind::wave1d:
        return 2;
    case PdeKind::joint_helm:
        return c.params.joint_dimension;
    default:
        return 1;
    }
}

spectral::DirectionBoundary parse_direction(std::string_view s) {
    if (s == "dirichlet") {
        return spectral::DirectionBoundary::dirichlet();
    }
    if (s == "neumann") {
        return spectral::DirectionBoundary::neumann();
    }
    if (s == "initial_value") {
        return spectral::DirectionBoundary::initial_value();
    }
    if (s.starts_with("mixed:")) {
        const auto parts = split(s.substr(6), ':');
        if (parts.size() == 2) {
            const auto e = spectral::EndpointCondition::mixed(parse_number<double>(parts[0]),
                                                              parse_number<double>(parts[1]));
            return {e, e, false};
        }
    }
    throw std::invalid_argument("unknown boundary '" + std::string(s) + "'");
}

} // namespace

std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string_view to_string(Ansatz a) noexcept {
    return a == Ansatz::strongly_entangling ? "strongly_entangling" : "hardware_efficient_ry";
}

Ansatz parse_ansatz(std::string_view name) {
    if (name == "strongly_entangling") {
        return Ansatz::strongly_entangling;
    }
    if (name == "hardware_efficient_ry") {
        return Ansatz::hardware_efficient_ry;
    }
    throw ConfigError("unknown ansatz '" + std::string(name) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
    std::map<std::string, const Key *> index;
    std::set<std::string> sections;
    for (const auto &k : keys()) {
        index[k.section + "." + k.name] = &k;
        sections.insert(k.section);
    }
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string section;
    int line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (const auto c = line.find('#'); c != std::string_view::npos) {
            line = trim(line.substr(0, c));
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigKeyError("line " + std::to_string(line_no), "unterminated section");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!sections.contains(section)) {
                throw ConfigKeyError(section, "unknown section");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigKeyError("line " + std::to_string(line_no), "expected key = value");
        }
        const std::string full = section + "." + std::string(trim(line.substr(0, eq)));
        const auto it = index.find(full);
        if (section.empty() || it == index.end()) {
            throw ConfigKeyError(full, "unknown key");
        }
        if (!seen.insert(full).second) {
            throw ConfigKeyError(full, "given twice");
        }
        try {
            it->second->set(cfg, trim(line.substr(eq + 1)));
        } catch (const ConfigKeyError &) {
            throw;
        } catch (const std::exception &e) {
            throw ConfigKeyError(full, e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_text(const ExperimentConfig &config) {
    std::string out, section;
    for (const auto &k : keys()) {
        if (k.section != section) {
            out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
            section = k.section;
        }
        out += k.name + " = " + k.get(config) + "\n";
    }
    return out;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const char *key, const std::string &why) {
        if (!ok) {
            throw ConfigKeyError(key, why);
        }
    };
    require(!name.empty() && name.find_first_of("\n/") == std::string::npos, "experiment.name",
            "must be a non-empty single path component");
    require(n_modes >= 2 && is_power_of_two(n_modes), "spectral.n_modes",
            "must be a power of two >= 2");
    const int dirs = direction_count(*this);
    require(dirs == 1 || dirs == 2, "spectral.joint_dimension", "must be 1 or 2");
    require(static_cast<int>(bc.size()) == 1 || static_cast<int>(bc.size()) == dirs,
            "spectral.bc", "needs 1 or " + std::to_string(dirs) + " entries");
    try {
        (void)boundary_of(*this);
    } catch (const std::exception &e) {
        throw ConfigKeyError("spectral.bc", e.what());
    }
    require(params.epsilon > 0, "spectral.epsilon", "must be positive");
    require(params.wave_horizon > 0, "spectral.wave_horizon", "must be positive");
    require(layers >= 1, "circuit.layers", "must be at least 1");
    for (int h : hidden) {
        require(h >= 1, "network.hidden", "widths must be positive");
    }
    for (int ch : conv_channels) {
        require(ch >= 1, "network.conv_channels", "channel counts must be positive");
    }
    require(kernel >= 1 && kernel % 2 == 1, "network.kernel", "must be odd and positive");
    require(conv_channels.empty() || dirs == 2, "network.conv_channels",
            "conv layers need a 2D system");
    require(conv_channels.empty() || dataset.generation != train::Generation::shallow_ry,
            "network.conv_channels", "conv layers need grid features, not shallow_ry");
    try {
        dataset.validate();
    } catch (const ConfigError &e) {
        throw ConfigKeyError("dataset", e.what());
    }
    try {
        train.validate();
    } catch (const ConfigError &e) {
        throw ConfigKeyError("train", e.what());
    }
    require(train.adam.beta1 >= 0 && train.adam.beta1 < 1, "train.beta1", "must lie in [0, 1)");
    require(train.adam.beta2 >= 0 && train.adam.beta2 < 1, "train.beta2", "must lie in [0, 1)");
    require(train.adam.epsilon > 0, "train.epsilon", "must be positive");
    require(train.lbfgs.history >= 0, "train.lbfgs_history", "must be non-negative");
    for (double t : thresholds) {
        require(t >= 0, "truncation.thresholds", "thresholds must be non-negative");
    }
    for (int n : scaling_modes) {
        require(n >= 2 && is_power_of_two(n), "scaling.n_modes", "entries must be powers of two");
    }
    for (int d : scaling_dimensions) {
        require(d == 1 || d == 2, "scaling.dimensions", "entries must be 1 or 2");
    }
    require(signflip_seeds >= 1, "signflip.seeds", "must be at least 1");
    require(signflip_pretrain_epochs >= 1, "signflip.pretrain_epochs", "must be at least 1");
    require(signflip_epochs >= 1, "signflip.epochs", "must be at least 1");
    require(signflip_perturbation >= 0, "signflip.perturbation", "must be non-negative");
    const bool joint = pde == spectral::PdeKind::joint_helm;
    require(joint_param == (dataset.generation == train::Generation::joint_k),
            "study.joint_param", "must be true exactly when dataset.generation = joint_k");
    require(!joint_param || joint, "study.joint_param", "needs pde = joint_helm");
}

spectral::BoundarySpec boundary_of(const ExperimentConfig &c) {
    const int dirs = direction_count(c);
    spectral::BoundarySpec spec;
    for (const auto &s : c.bc) {
        spec.directions.push_back(parse_direction(s));
    }
    if (spec.directions.size() == 1 && dirs == 2) {
        spec.directions.push_back(c.pde == spectral::PdeKind::wave1d
                                      ? spectral::DirectionBoundary::initial_value()
                                      : spec.directions.front());
    }
    spec.validate();
    return spec;
}

spectral::SpectralSystem build_system(const ExperimentConfig &c) {
    return spectral::assemble_system(c.pde, c.params, boundary_of(c), c.n_modes);
}

qsim::GateProgram build_program(const ExperimentConfig &c, int n_qubits) {
    return c.ansatz == Ansatz::strongly_entangling
               ? qsim::build_strongly_entangling(n_qubits, c.layers)
               : qsim::build_hardware_efficient_ry(n_qubits, c.layers);
}

net::NetworkSpec build_network_spec(const ExperimentConfig &c,
                                    const spectral::SpectralSystem &system, int output_dim) {
    const bool joint = c.dataset.generation == train::Generation::joint_k;
    const int extra = joint ? 1 : 0;
    const int features = c.dataset.generation == train::Generation::shallow_ry
                             ? static_cast<int>(system.size())
                             : static_cast<int>(system.grid_size()) + extra;
    if (c.conv_channels.empty()) {
        return net::NetworkSpec::mlp(features, c.hidden, output_dim, c.activation);
    }
    const int side = static_cast<int>(system.quadrature.nodes.size());
    net::NetworkSpec spec;
    spec.input_dim = features;
    spec.extra_inputs = extra;
    int channels = 1;
    for (int ch : c.conv_channels) {
        spec.layers.push_back(net::LayerSpec::conv(channels, ch, c.kernel, side, side, c.activation));
        channels = ch;
    }
    int width = channels * side * side + extra;
    for (int h : c.hidden) {
        spec.layers.push_back(net::LayerSpec::dense(width, h, c.activation));
        width = h;
    }
    spec.layers.push_back(net::LayerSpec::dense(width, output_dim, net::Activation::identity));
    spec.validate();
    return spec;
}

} // namespace qspec::bench
