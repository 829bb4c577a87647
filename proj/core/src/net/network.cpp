#include "qspec/net/network.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "qspec/errors.hpp"

namespace qspec::net {

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'P', 'N', 'E', 'T', '0', '1'};
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream &os, T value) {
    os.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <class T>
T get(std::istream &is) {
    T value{};
    is.read(reinterpret_cast<char *>(&value), sizeof(T));
    if (!is) {
        throw ContractViolation("Network::load: truncated checkpoint");
    }
    return value;
}

// Index of the first dense layer, or layers.size() when there is none.
std::size_t first_dense(const NetworkSpec &spec) {
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        if (spec.layers[l].kind == LayerKind::dense) {
            return l;
        }
    }
    return spec.layers.size();
}

void conv_forward(const LayerSpec &L, const double *w, const double *b, const double *x, double *z) {
    const int H = L.height, W = L.width, k = L.kernel, pad = k / 2;
    for (int co = 0; co < L.out; ++co) {
        for (int r = 0; r < H; ++r) {
            for (int c = 0; c < W; ++c) {
                double acc = b[co];
                for (int ci = 0; ci < L.in; ++ci) {
                    const double *kern = w + ((co * L.in + ci) * k) * k;
                    const double *plane = x + ci * H * W;
                    for (int dr = 0; dr < k; ++dr) {
                        const int rr = r + dr - pad;
                        if (rr < 0 || rr >= H) {
                            continue;
                        }
                        for (int dc = 0; dc < k; ++dc) {
                            const int cc = c + dc - pad;
                            if (cc >= 0 && cc < W) {
                                acc += kern[dr * k + dc] * plane[rr * W + cc];
                            }
                        }
                    }
                }
                z[(co * H + r) * W + c] = acc;
            }
        }
    }
}

void conv_backward(const LayerSpec &L, const double *w, const double *x, const double *dz,
                   double *dw, double *db, double *dx) {
    const int H = L.height, W = L.width, k = L.kernel, pad = k / 2;
    for (int co = 0; co < L.out; ++co) {
        for (int r = 0; r < H; ++r) {
            for (int c = 0; c < W; ++c) {
                const double g = dz[(co * H + r) * W + c];
                if (g == 0.0) {
                    continue;
                }
                db[co] += g;
                for (int ci = 0; ci < L.in; ++ci) {
                    const std::size_t kbase = static_cast<std::size_t>((co * L.in + ci) * k * k);
                    const int pbase = ci * H * W;
                    for (int dr = 0; dr < k; ++dr) {
                        const int rr = r + dr - pad;
                        if (rr < 0 || rr >= H) {
                            continue;
                        }
                        for (int dc = 0; dc < k; ++dc) {
                            const int cc = c + dc - pad;
                            if (cc >= 0 && cc < W) {
                                dw[kbase + dr * k + dc] += g * x[pbase + rr * W + cc];
                                dx[pbase + rr * W + cc] += g * w[kbase + dr * k + dc];
                            }
                        }
                    }
                }
            }
        }
    }
}

} // namespace

std::string_view to_string(Activation a) noexcept {
    switch (a) {
    case Activation::relu:
        return "relu";
    case Activation::gelu:
        return "gelu";
    case Activation::identity:
        return "identity";
    }
    return "identity";
}

Activation parse_activation(std::string_view name) {
    if (name == "relu") {
        return Activation::relu;
    }
    if (name == "gelu") {
        return Activation::gelu;
    }
    if (name == "identity" || name == "linear") {
        return Activation::identity;
    }
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double z) noexcept {
    switch (a) {
    case Activation::relu:
        return z > 0.0 ? z : 0.0;
    case Activation::gelu: {
        constexpr double c = 0.7978845608028654; // sqrt(2/pi)
        return 0.5 * z * (1.0 + std::tanh(c * (z + 0.044715 * z * z * z)));
    }
    case Activation::identity:
        break;
    }
    return z;
}

double activate_derivative(Activation a, double z) noexcept {
    switch (a) {
    case Activation::relu:
        return z > 0.0 ? 1.0 : 0.0;
    case Activation::gelu: {
        constexpr double c = 0.7978845608028654;
        const double t = std::tanh(c * (z + 0.044715 * z * z * z));
        return 0.5 * (1.0 + t) + 0.5 * z * (1.0 - t * t) * c * (1.0 + 3.0 * 0.044715 * z * z);
    }
    case Activation::identity:
        break;
    }
    return 1.0;
}

LayerSpec LayerSpec::dense(int in, int out, Activation act) {
    return {LayerKind::dense, in, out, 0, 0, 0, act};
}

LayerSpec LayerSpec::conv(int channels_in, int channels_out, int kernel, int height, int width,
                          Activation act) {
    return {LayerKind::conv, channels_in, channels_out, kernel, height, width, act};
}

int LayerSpec::input_size() const noexcept {
    return kind == LayerKind::dense ? in : in * height * width;
}

int LayerSpec::output_size() const noexcept {
    return kind == LayerKind::dense ? out : out * height * width;
}

std::size_t LayerSpec::weight_count() const noexcept {
    const auto w = static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
    return kind == LayerKind::dense ? w : w * static_cast<std::size_t>(kernel * kernel);
}

std::size_t LayerSpec::bias_count() const noexcept { return static_cast<std::size_t>(out); }

int LayerSpec::fan_in() const noexcept {
    return kind == LayerKind::dense ? in : in * kernel * kernel;
}

int LayerSpec::fan_out() const noexcept {
    return kind == LayerKind::dense ? out : out * kernel * kernel;
}

int NetworkSpec::output_dim() const {
    if (layers.empty()) {
        throw ConfigError("NetworkSpec: no layers");
    }
    return layers.back().output_size();
}

std::size_t NetworkSpec::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto &l : layers) {
        n += l.weight_count() + l.bias_count();
    }
    return n;
}

void NetworkSpec::validate() const {
    if (layers.empty()) {
        throw ConfigError("NetworkSpec: no layers");
    }
    if (input_dim < 1 || extra_inputs < 0 || extra_inputs > input_dim) {
        throw ConfigError("NetworkSpec: invalid input layout");
    }
    const std::size_t fd = first_dense(*this);
    if (fd == layers.size() && extra_inputs > 0) {
        throw ConfigError("NetworkSpec: extra inputs need a dense layer");
    }
    int cur = input_dim - extra_inputs;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto &L = layers[l];
        if (L.in < 1 || L.out < 1) {
            throw ConfigError("NetworkSpec: layer " + std::to_string(l) + " has empty width");
        }
        if (L.kind == LayerKind::conv) {
            if (l > fd) {
                throw ConfigError("NetworkSpec: conv layer after a dense layer");
            }
            if (L.kernel < 1 || L.kernel % 2 == 0 || L.height < 1 || L.width < 1) {
                throw ConfigError("NetworkSpec: conv layer needs an odd kernel and a grid");
            }
        }
        if (l == fd) {
            cur += extra_inputs;
        }
        if (L.input_size() != cur) {
            throw ConfigError("NetworkSpec: layer " + std::to_string(l) + " expects " +
                              std::to_string(L.input_size()) + " inputs, previous stage gives " +
                              std::to_string(cur));
        }
        cur = L.output_size();
    }
}

NetworkSpec NetworkSpec::mlp(int input_dim, const std::vector<int> &hidden, int output_dim,
                             Activation hidden_activation) {
    NetworkSpec s;
    s.input_dim = input_dim;
    int prev = input_dim;
    for (const int h : hidden) {
        s.layers.push_back(LayerSpec::dense(prev, h, hidden_activation));
        prev = h;
    }
    s.layers.push_back(LayerSpec::dense(prev, output_dim, Activation::identity));
    return s;
}

Network::Network(NetworkSpec spec, std::vector<double> parameters)
    : spec_(std::move(spec)), params_(std::move(parameters)) {
    spec_.validate();
    if (params_.size() != spec_.parameter_count()) {
        throw ContractViolation("Network: expected " + std::to_string(spec_.parameter_count()) +
                                " parameters, got " + std::to_string(params_.size()));
    }
    build_offsets();
}

void Network::build_offsets() {
    offsets_.clear();
    std::size_t off = 0;
    for (const auto &l : spec_.layers) {
        offsets_.push_back(off);
        off += l.weight_count() + l.bias_count();
    }
}

std::size_t Network::layer_offset(std::size_t layer) const { return offsets_.at(layer); }

Network Network::init(const NetworkSpec &spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    std::vector<double> p;
    p.reserve(spec.parameter_count());
    for (const auto &L : spec.layers) {
        const double bound = L.activation == Activation::relu
                                 ? std::sqrt(6.0 / L.fan_in())
                                 : std::sqrt(6.0 / (L.fan_in() + L.fan_out()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < L.weight_count(); ++i) {
            p.push_back(dist(rng));
        }
        p.insert(p.end(), L.bias_count(), 0.0);
    }
    return Network(spec, std::move(p));
}

std::vector<double> Network::forward(std::span<const double> features) const {
    ForwardCache cache;
    return forward(features, cache);
}

std::vector<double> Network::forward(std::span<const double> features, ForwardCache &cache) const {
    if (features.size() != static_cast<std::size_t>(spec_.input_dim)) {
        throw ContractViolation("Network::forward: expected " + std::to_string(spec_.input_dim) +
                                " features, got " + std::to_string(features.size()));
    }
    const auto n_lead = static_cast<std::size_t>(spec_.input_dim - spec_.extra_inputs);
    const std::size_t fd = first_dense(spec_);
    cache.inputs.assign(spec_.layers.size(), {});
    cache.preactivations.assign(spec_.layers.size(), {});
    cache.extras.assign(features.begin() + static_cast<std::ptrdiff_t>(n_lead), features.end());

    std::vector<double> x(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(n_lead));
    for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
        const auto &L = spec_.layers[l];
        if (l == fd) {
            x.insert(x.end(), cache.extras.begin(), cache.extras.end());
        }
        const double *w = params_.data() + offsets_[l];
        const double *b = w + L.weight_count();
        std::vector<double> z(static_cast<std::size_t>(L.output_size()));
        if (L.kind == LayerKind::dense) {
            for (int o = 0; o < L.out; ++o) {
                double acc = b[o];
                const double *row = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(L.in);
                for (int i = 0; i < L.in; ++i) {
                    acc += row[i] * x[static_cast<std::size_t>(i)];
                }
                z[static_cast<std::size_t>(o)] = acc;
            }
        } else {
            conv_forward(L, w, b, x.data(), z.data());
        }
        cache.inputs[l] = std::move(x);
        x.resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            x[i] = activate(L.activation, z[i]);
        }
        cache.preactivations[l] = std::move(z);
    }
    cache.output = x;
    return x;
}

Gradients Network::backward(const ForwardCache &cache,
                            std::span<const double> output_cotangent) const {
    if (cache.inputs.size() != spec_.layers.size() ||
        output_cotangent.size() != cache.output.size()) {
        throw ContractViolation("Network::backward: cache does not match this network");
    }
    const std::size_t fd = first_dense(spec_);
    Gradients out;
    out.parameters.assign(params_.size(), 0.0);
    std::vector<double> extras_grad(cache.extras.size(), 0.0);
    std::vector<double> g(output_cotangent.begin(), output_cotangent.end());

    for (std::size_t l = spec_.layers.size(); l-- > 0;) {
        const auto &L = spec_.layers[l];
        const auto &z = cache.preactivations[l];
        const auto &x = cache.inputs[l];
        std::vector<double> dz(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            dz[i] = g[i] * activate_derivative(L.activation, z[i]);
        }
        const double *w = params_.data() + offsets_[l];
        double *dw = out.parameters.data() + offsets_[l];
        double *db = dw + L.weight_count();
        std::vector<double> dx(x.size(), 0.0);
        if (L.kind == LayerKind::dense) {
            for (int o = 0; o < L.out; ++o) {
                const double d = dz[static_cast<std::size_t>(o)];
                db[o] += d;
                const std::size_t row = static_cast<std::size_t>(o) * static_cast<std::size_t>(L.in);
                for (int i = 0; i < L.in; ++i) {
                    dw[row + static_cast<std::size_t>(i)] += d * x[static_cast<std::size_t>(i)];
                    dx[static_cast<std::size_t>(i)] += d * w[row + static_cast<std::size_t>(i)];
                }
            }
        } else {
            conv_backward(L, w, x.data(), dz.data(), dw, db, dx.data());
        }
        if (l == fd && !extras_grad.empty()) {
            const std::size_t lead = dx.size() - extras_grad.size();
            std::copy(dx.begin() + static_cast<std::ptrdiff_t>(lead), dx.end(), extras_grad.begin());
            dx.resize(lead);
        }
        g = std::move(dx);
    }
    out.input = std::move(g);
    out.input.insert(out.input.end(), extras_grad.begin(), extras_grad.end());
    return out;
}

void Network::save(std::ostream &os) const {
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, kFormatVersion);
    put<std::int32_t>(os, spec_.input_dim);
    put<std::int32_t>(os, spec_.extra_inputs);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(spec_.layers.size()));
    for (const auto &L : spec_.layers) {
        put<std::int32_t>(os, static_cast<std::int32_t>(L.kind));
        put<std::int32_t>(os, L.in);
        put<std::int32_t>(os, L.out);
        put<std::int32_t>(os, L.kernel);
        put<std::int32_t>(os, L.height);
        put<std::int32_t>(os, L.width);
        put<std::int32_t>(os, static_cast<std::int32_t>(L.activation));
    }
    put<std::uint64_t>(os, params_.size());
    os.write(reinterpret_cast<const char *>(params_.data()),
             static_cast<std::streamsize>(params_.size() * sizeof(double)));
}

Network Network::load(std::istream &is) {
    char magic[sizeof(kMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ContractViolation("Network::load: not a network checkpoint");
    }
    if (const auto v = get<std::uint32_t>(is); v != kFormatVersion) {
        throw ContractViolation("Network::load: unsupported checkpoint version " +
                                std::to_string(v));
    }
    NetworkSpec spec;
    spec.input_dim = get<std::int32_t>(is);
    spec.extra_inputs = get<std::int32_t>(is);
    const auto n_layers = get<std::uint32_t>(is);
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        LayerSpec L;
        L.kind = static_cast<LayerKind>(get<std::int32_t>(is));
        L.in = get<std::int32_t>(is);
        L.out = get<std::int32_t>(is);
        L.kernel = get<std::int32_t>(is);
        L.height = get<std::int32_t>(is);
        L.width = get<std::int32_t>(is);
        L.activation = static_cast<Activation>(get<std::int32_t>(is));
        spec.layers.push_back(L);
    }
    const auto count = get<std::uint64_t>(is);
    if (count != spec.parameter_count()) {
        throw ContractViolation("Network::load: parameter count does not match the stored spec");
    }
    std::vector<double> p(count);
    is.read(reinterpret_cast<char *>(p.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) {
        throw ContractViolation("Network::load: truncated parameter block");
    }
    return Network(std::move(spec), std::move(p));
}

} // namespace qspec::net
