#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

#include "qspec/loss/loss.hpp"
#include "qspec/spectral/assembly.hpp"
#include "qspec/spectral/solve.hpp"

namespace qspec::train {

enum class Generation { shallow_ry, trig_1d, trig_2d, wave_family, joint_k };

[[nodiscard]] std::string_view to_string(Generation g) noexcept;
/// Throws ConfigError for unknown names.
[[nodiscard]] Generation parse_generation(std::string_view name);

/// Half-open uniform range [lo, hi).
struct UniformRange {
    double lo = 0.0;
    double hi = 1.0;

    bool operator==(const UniformRange &) const = default;
};

struct DatasetSpec {
    Generation generation = Generation::trig_1d;
    int train_count = 20;
    int test_count = 50;
    UniformRange theta{0.0, 6.283185307179586}; ///< shallow_ry angles
    UniformRange amplitude{0.0, 1.0};           ///< h_1, h_2
    UniformRange frequency{0.0, 1.0};           ///< m_1, m_2
    UniformRange omega{1.0, 2.0};               ///< wave_family
    UniformRange wave_number_sq{4.0, 4.05};     ///< joint_k
    bool normalize_features = true;             ///< scale nodal features to unit norm
    std::uint64_t seed = 0;

    /// Throws ConfigError for empty splits or inverted ranges.
    void validate() const;
};

/// Draw parameters of one instance, recorded for reproducibility.
struct ForcingDraw {
    std::vector<double> theta;
    double h1 = 0.0, h2 = 0.0, m1 = 0.0, m2 = 0.0;
    double omega = 0.0;
    double wave_number_sq = 0.0;
};

struct Instance {
    ForcingDraw draw;
    std::vector<double> features; ///< network input
    Eigen::VectorXd forcing;      ///< raw F (not normalized)
    double wave_number_sq = 0.0;  ///< k^2 used by this instance's operator
    spectral::SolutionField truth;
};

struct Dataset {
    std::vector<Instance> train;
    std::vector<Instance> test;
    int resampled = 0; ///< draws rejected for a vanishing forcing
};

/**
 * @brief Sample forcings, transform them and solve classically.
 *
 * shallow_ry sets F to the amplitudes of a product of Ry rotations and uses F
 * as the features. The trigonometric and wave families evaluate f on the
 * system grid; the nodal values (unit-normalized unless disabled) are the
 * features. joint_k appends k^2 to the features. Truth solutions are for evaluation only.
 */
[[nodiscard]] Dataset generate_dataset(const DatasetSpec &spec, const spectral::SpectralSystem &system);

/// Evaluates one forcing family on the system grid.
[[nodiscard]] std::vector<double> forcing_values(Generation g, const ForcingDraw &draw,
                                                 const spectral::SpectralSystem &system);

/// Loss context matching the instances: parametric for joint_k, else direct.
[[nodiscard]] loss::LossContext make_context(const spectral::SpectralSystem &system,
                                             const std::vector<Instance> &instances,
                                             Generation g);
/// Same, but with a caller-supplied expansion of A (e.g. truncated).
[[nodiscard]] loss::LossContext make_context(const pauli::PauliExpansion &expansion_A,
                                             const std::vector<Instance> &instances);

[[nodiscard]] std::vector<std::vector<double>> features_of(const std::vector<Instance> &instances);

} // namespace qspec::train
