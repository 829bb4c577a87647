#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qspec/errors.hpp"
#include "qspec/net/network.hpp"
#include "qspec/qsim/circuit.hpp"
#include "qspec/spectral/assembly.hpp"
#include "qspec/train/dataset.hpp"
#include "qspec/train/trainer.hpp"

namespace qspec::bench {

/// Config problem tied to one key ("section.key").
class ConfigKeyError : public ConfigError {
  public:
    ConfigKeyError(std::string key, const std::string &why)
        : ConfigError("config key '" + key + "': " + why), key_(std::move(key)) {}

    [[nodiscard]] const std::string &key() const noexcept { return key_; }

  private:
    std::string key_;
};

enum class Ansatz { strongly_entangling, hardware_efficient_ry };

[[nodiscard]] std::string_view to_string(Ansatz a) noexcept;
[[nodiscard]] Ansatz parse_ansatz(std::string_view name);

/**
 * @brief Every knob of one experiment.
 *
 * The dataset uses seed, the network initialization seed + 1. bc holds one
 * entry per direction: dirichlet, neumann, initial_value or mixed:a:b.
 */
struct ExperimentConfig {
    std::string name = "experiment";
    spectral::PdeKind pde = spectral::PdeKind::helm1d;
    std::uint64_t seed = 1;

    int n_modes = 16;
    std::vector<std::string> bc{"dirichlet"};
    spectral::PdeParams params;

    Ansatz ansatz = Ansatz::strongly_entangling;
    int layers = 4;

    std::vector<int> hidden{64, 64};
    net::Activation activation = net::Activation::gelu;
    std::vector<int> conv_channels;
    int kernel = 3;

    train::DatasetSpec dataset;
    train::TrainConfig train;

    std::vector<double> thresholds{0.0, 0.5, 0.1, 0.05, 0.01};

    std::vector<int> scaling_modes{4, 8, 16, 32};
    std::vector<int> scaling_dimensions{1};

    int signflip_seeds = 10;
    int signflip_pretrain_epochs = 1000;
    int signflip_epochs = 500;
    double signflip_perturbation = 0.05;

    bool truncation_sweep = false;
    bool measurement_scaling = false;
    bool sign_flip_demo = false;
    bool joint_param = false;

    /// Cross-field checks; throws ConfigKeyError.
    void validate() const;
};

/// Shortest text that parses back to the same double.
[[nodiscard]] std::string format_number(double v);

/// Parses sectioned key = value text. Unknown sections or keys, duplicates
/// and malformed values throw ConfigKeyError naming the key.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path &path);

/// Every key in fixed order with shortest round-trip numbers.
[[nodiscard]] std::string canonical_text(const ExperimentConfig &config);

[[nodiscard]] spectral::BoundarySpec boundary_of(const ExperimentConfig &config);
[[nodiscard]] spectral::SpectralSystem build_system(const ExperimentConfig &config);
[[nodiscard]] qsim::GateProgram build_program(const ExperimentConfig &config, int n_qubits);
/// MLP for 1D systems; conv_channels switches to a conv stack over the grid.
[[nodiscard]] net::NetworkSpec build_network_spec(const ExperimentConfig &config,
                                                  const spectral::SpectralSystem &system,
                                                  int output_dim);

} // namespace qspec::bench
