#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace qspec::net {

enum class Activation { relu, gelu, identity };

[[nodiscard]] std::string_view to_string(Activation a) noexcept;
/// Throws ConfigError for unknown names.
[[nodiscard]] Activation parse_activation(std::string_view name);

/// act(z) and act'(z). GELU uses the tanh approximation.
[[nodiscard]] double activate(Activation a, double z) noexcept;
[[nodiscard]] double activate_derivative(Activation a, double z) noexcept;

enum class LayerKind { dense, conv };

/**
 * dense: in -> out.
 * conv:  (channels_in, height, width) -> (channels_out, height, width),
 *        stride 1, odd kernel, zero padding that preserves the grid.
 * Tensors are flattened channel-major, then row-major over the grid.
 */
struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    int in = 0;
    int out = 0;
    int kernel = 0;
    int height = 0;
    int width = 0;
    Activation activation = Activation::identity;

    [[nodiscard]] static LayerSpec dense(int in, int out, Activation act);
    [[nodiscard]] static LayerSpec conv(int channels_in, int channels_out, int kernel, int height,
                                        int width, Activation act);

    [[nodiscard]] int input_size() const noexcept;
    [[nodiscard]] int output_size() const noexcept;
    [[nodiscard]] std::size_t weight_count() const noexcept;
    [[nodiscard]] std::size_t bias_count() const noexcept;
    [[nodiscard]] int fan_in() const noexcept;
    [[nodiscard]] int fan_out() const noexcept;

    bool operator==(const LayerSpec &) const = default;
};

/**
 * @brief Layer chain plus input layout.
 *
 * The last `extra_inputs` features skip any leading conv layers and are
 * appended to the flattened conv output before the first dense layer.
 */
struct NetworkSpec {
    int input_dim = 0;
    int extra_inputs = 0;
    std::vector<LayerSpec> layers;

    [[nodiscard]] int output_dim() const;
    [[nodiscard]] std::size_t parameter_count() const noexcept;
    /// Throws ConfigError when dimensions do not chain.
    void validate() const;

    /// Dense stack input_dim -> hidden... -> output_dim with the hidden
    /// activation and an identity output layer.
    [[nodiscard]] static NetworkSpec mlp(int input_dim, const std::vector<int> &hidden,
                                         int output_dim, Activation hidden_activation);

    bool operator==(const NetworkSpec &) const = default;
};

struct ForwardCache {
    std::vector<std::vector<double>> inputs;         ///< input of each layer
    std::vector<std::vector<double>> preactivations; ///< z of each layer
    std::vector<double> extras;
    std::vector<double> output;
};

struct Gradients {
    std::vector<double> parameters;
    std::vector<double> input;
};

class Network {
  public:
    Network() = default;
    Network(NetworkSpec spec, std::vector<double> parameters);

    /// He-uniform weights for relu layers, Xavier-uniform otherwise, zero biases.
    [[nodiscard]] static Network init(const NetworkSpec &spec, std::uint64_t seed);

    [[nodiscard]] const NetworkSpec &spec() const noexcept { return spec_; }
    [[nodiscard]] std::span<const double> parameters() const noexcept { return params_; }
    [[nodiscard]] std::span<double> parameters() noexcept { return params_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return params_.size(); }
    /// Offset of layer l's weights in the flat parameter vector; biases follow.
    [[nodiscard]] std::size_t layer_offset(std::size_t layer) const;

    [[nodiscard]] std::vector<double> forward(std::span<const double> features) const;
    [[nodiscard]] std::vector<double> forward(std::span<const double> features,
                                              ForwardCache &cache) const;
    /// Reverse-mode pass for one sample; cache comes from forward().
    [[nodiscard]] Gradients backward(const ForwardCache &cache,
                                     std::span<const double> output_cotangent) const;

    void save(std::ostream &os) const;
    [[nodiscard]] static Network load(std::istream &is);

  private:
    NetworkSpec spec_;
    std::vector<double> params_;
    std::vector<std::size_t> offsets_;

    void build_offsets();
};

} // namespace qspec::net
