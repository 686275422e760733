#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "romlab/errors.hpp"
#include "romlab/mesh.hpp"
#include "romlab/rng.hpp"

namespace romlab {

// ---------------------------------------------------------------------------
// activations
// ---------------------------------------------------------------------------

enum class ActKind : std::uint32_t {
    identity = 0,
    leaky_relu = 1,
    tanh_fn = 2,
    soft_clamp = 3,
};

namespace detail {
inline double lrelu01(double x) { return x >= 0.0 ? x : 0.1 * x; }
inline double lrelu01_slope(double x) { return x >= 0.0 ? 1.0 : 0.1; }
}  // namespace detail

struct Activation {
    ActKind kind = ActKind::identity;
    double alpha = 0.1;  // leaky slope, |alpha| < 1

    static Activation identity() { return {ActKind::identity, 0.0}; }
    static Activation leaky(double alpha = 0.1) {
        if (!(std::abs(alpha) < 1.0)) throw config_error("leaky ReLU slope must satisfy |alpha| < 1");
        return {ActKind::leaky_relu, alpha};
    }
    static Activation tanh_fn() { return {ActKind::tanh_fn, 0.0}; }
    // soft ramp rho(0.5 - rho(0.5 - x)) with rho the 0.1-leaky ReLU:
    // identity on [0, 0.5], slope 0.1 outside
    static Activation soft_clamp() { return {ActKind::soft_clamp, 0.0}; }

    double value(double x) const {
        switch (kind) {
            case ActKind::identity: return x;
            case ActKind::leaky_relu: return x >= 0.0 ? x : alpha * x;
            case ActKind::tanh_fn: return std::tanh(x);
            case ActKind::soft_clamp:
                // rho(0.5 - rho(0.5 - x)) resolved piecewise so the identity
                // region is exact in floating point
                if (x < 0.0) return 0.1 * x;
                if (x > 0.5) return 0.45 + 0.1 * x;
                return x;
        }
        return x;
    }

    double slope(double x) const {
        switch (kind) {
            case ActKind::identity: return 1.0;
            case ActKind::leaky_relu: return x >= 0.0 ? 1.0 : alpha;
            case ActKind::tanh_fn: {
                const double t = std::tanh(x);
                return 1.0 - t * t;
            }
            case ActKind::soft_clamp: return (x < 0.0 || x > 0.5) ? 0.1 : 1.0;
        }
        return 1.0;
    }

    Matrix apply(const Matrix& pre) const {
        if (kind == ActKind::identity) return pre;
        return pre.unaryExpr([this](double x) { return value(x); });
    }

    Matrix derivative(const Matrix& pre) const {
        if (kind == ActKind::identity) return Matrix::Ones(pre.rows(), pre.cols());
        return pre.unaryExpr([this](double x) { return slope(x); });
    }
};

// ---------------------------------------------------------------------------
// layers and networks
// ---------------------------------------------------------------------------

// y = act(W x + b); an optional binary mask keeps the pruned weights at
// exactly zero through init, every update, and serialization
struct AffineLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
    Matrix mask;     // out x in when masked, else empty
    bool masked = false;
    Activation activation;

    int in_width() const { return static_cast<int>(weights.cols()); }
    int out_width() const { return static_cast<int>(weights.rows()); }

    void apply_mask() {
        if (masked) weights = weights.cwiseProduct(mask);
    }
};

inline AffineLayer make_dense_layer(int in, int out, Activation act) {
    if (in < 1 || out < 1) throw config_error("make_dense_layer: widths must be positive");
    AffineLayer layer;
    layer.weights = Matrix::Zero(out, in);
    layer.bias = Vector::Zero(out);
    layer.activation = act;
    return layer;
}

// geometric pruning: connection (i, j) survives iff |x_i_out - x_j_in| <= support
inline Matrix build_support_mask(const std::vector<Point2>& coords_out,
                                 const std::vector<Point2>& coords_in, double support) {
    if (support < 0.0) throw config_error("build_support_mask: support must be nonnegative");
    Matrix mask(static_cast<int>(coords_out.size()), static_cast<int>(coords_in.size()));
    for (std::size_t i = 0; i < coords_out.size(); ++i)
        for (std::size_t j = 0; j < coords_in.size(); ++j)
            mask(static_cast<int>(i), static_cast<int>(j)) =
                distance(coords_out[i], coords_in[j]) <= support ? 1.0 : 0.0;
    return mask;
}

inline AffineLayer make_mesh_informed_layer(const std::vector<Point2>& coords_out,
                                            const std::vector<Point2>& coords_in,
                                            double support, Activation act) {
    AffineLayer layer = make_dense_layer(static_cast<int>(coords_in.size()),
                                         static_cast<int>(coords_out.size()), act);
    layer.mask = build_support_mask(coords_out, coords_in, support);
    layer.masked = true;
    return layer;
}

struct Network {
    std::vector<AffineLayer> layers;

    int input_width() const { return layers.empty() ? 0 : layers.front().in_width(); }
    int output_width() const { return layers.empty() ? 0 : layers.back().out_width(); }

    void validate() const {
        if (layers.empty()) throw config_error("Network: no layers");
        for (std::size_t l = 1; l < layers.size(); ++l)
            if (layers[l].in_width() != layers[l - 1].out_width())
                throw config_error("Network: layer widths do not chain at layer " + std::to_string(l));
    }
};

// He-style fan-in uniform init; for masked layers the fan-in counts only the
// surviving connections of each row. Entries are drawn in row-major order and
// masked ones zeroed post-draw, so streams are reproducible.
inline void init_he_uniform(Network& net, Rng& rng) {
    for (auto& layer : net.layers) {
        const int in = layer.in_width();
        const int out = layer.out_width();
        for (int i = 0; i < out; ++i) {
            int fan_in = in;
            if (layer.masked) {
                fan_in = 0;
                for (int j = 0; j < in; ++j)
                    if (layer.mask(i, j) != 0.0) ++fan_in;
                fan_in = std::max(fan_in, 1);
            }
            const double bound = std::sqrt(6.0 / fan_in);
            for (int j = 0; j < in; ++j) layer.weights(i, j) = rng.uniform(-bound, bound);
        }
        layer.bias.setZero();
        layer.apply_mask();
    }
}

// ---------------------------------------------------------------------------
// forward / backward
// ---------------------------------------------------------------------------

// Batches are row-major: one sample per row, so a layer computes
// act(X W^T + 1 b^T). The cache keeps layer inputs and pre-activations.
struct ForwardCache {
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre;
};

inline Matrix forward(const Network& net, const Matrix& batch, ForwardCache* cache = nullptr) {
    if (batch.cols() != net.input_width())
        throw config_error("forward: batch width " + std::to_string(batch.cols()) +
                           " does not match network input " + std::to_string(net.input_width()));
    if (cache) {
        cache->inputs.clear();
        cache->pre.clear();
        cache->inputs.reserve(net.layers.size());
        cache->pre.reserve(net.layers.size());
    }
    Matrix x = batch;
    for (const auto& layer : net.layers) {
        Matrix pre = x * layer.weights.transpose();
        pre.rowwise() += layer.bias.transpose();
        if (cache) {
            cache->inputs.push_back(std::move(x));
            cache->pre.push_back(pre);
        }
        x = layer.activation.apply(pre);
    }
    return x;
}

struct LayerGrads {
    Matrix weights;
    Vector bias;
};

struct NetworkGrads {
    std::vector<LayerGrads> layers;
    Matrix input;  // gradient with respect to the batch input

    void accumulate(const NetworkGrads& other) {
        for (std::size_t l = 0; l < layers.size(); ++l) {
            layers[l].weights += other.layers[l].weights;
            layers[l].bias += other.layers[l].bias;
        }
    }
};

// Exact reverse-mode pass for the scalar loss whose upstream gradient
// (d loss / d output, one row per sample) is supplied. Masked weight
// gradients are zeroed so pruned connections never revive.
inline NetworkGrads backward(const Network& net, const ForwardCache& cache,
                             const Matrix& upstream) {
    const std::size_t depth = net.layers.size();
    if (cache.inputs.size() != depth || cache.pre.size() != depth)
        throw config_error("backward: cache does not match network (missing or stale)");
    if (upstream.cols() != net.output_width() || upstream.rows() != cache.inputs.front().rows())
        throw config_error("backward: upstream gradient shape mismatch");

    NetworkGrads grads;
    grads.layers.resize(depth);

    Matrix delta = upstream.cwiseProduct(net.layers[depth - 1].activation.derivative(cache.pre[depth - 1]));
    for (std::size_t l = depth; l-- > 0;) {
        const AffineLayer& layer = net.layers[l];
        grads.layers[l].weights.noalias() = delta.transpose() * cache.inputs[l];
        if (layer.masked)
            grads.layers[l].weights = grads.layers[l].weights.cwiseProduct(layer.mask);
        grads.layers[l].bias = delta.colwise().sum().transpose();
        if (l > 0) {
            Matrix next = delta * layer.weights;
            delta = next.cwiseProduct(net.layers[l - 1].activation.derivative(cache.pre[l - 1]));
        } else {
            grads.input.noalias() = delta * layer.weights;
        }
    }
    return grads;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // decoupled, applied before the update
};

struct AdamState {
    AdamConfig config;
    long step = 0;
    std::vector<LayerGrads> m;
    std::vector<LayerGrads> v;

    static AdamState like(const Network& net, AdamConfig cfg) {
        AdamState state;
        state.config = cfg;
        state.m.resize(net.layers.size());
        state.v.resize(net.layers.size());
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const auto& layer = net.layers[l];
            state.m[l].weights = Matrix::Zero(layer.out_width(), layer.in_width());
            state.m[l].bias = Vector::Zero(layer.out_width());
            state.v[l].weights = Matrix::Zero(layer.out_width(), layer.in_width());
            state.v[l].bias = Vector::Zero(layer.out_width());
        }
        return state;
    }
};

inline void adam_step(AdamState& state, Network& net, const NetworkGrads& grads) {
    if (state.m.size() != net.layers.size() || grads.layers.size() != net.layers.size())
        throw config_error("adam_step: state/gradient shape mismatch");
    const AdamConfig& c = state.config;
    state.step += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        const Matrix& gw = grads.layers[l].weights;
        const Vector& gb = grads.layers[l].bias;
        if (gw.rows() != layer.weights.rows() || gw.cols() != layer.weights.cols())
            throw config_error("adam_step: gradient shape mismatch at layer " + std::to_string(l));

        if (c.weight_decay > 0.0) layer.weights *= (1.0 - c.lr * c.weight_decay);

        state.m[l].weights = c.beta1 * state.m[l].weights + (1.0 - c.beta1) * gw;
        state.v[l].weights = c.beta2 * state.v[l].weights + (1.0 - c.beta2) * gw.cwiseProduct(gw);
        state.m[l].bias = c.beta1 * state.m[l].bias + (1.0 - c.beta1) * gb;
        state.v[l].bias = c.beta2 * state.v[l].bias + (1.0 - c.beta2) * gb.cwiseProduct(gb);

        layer.weights -= c.lr * (state.m[l].weights / bc1).cwiseQuotient(
                             (state.v[l].weights / bc2).cwiseSqrt().array().matrix() +
                             Matrix::Constant(layer.weights.rows(), layer.weights.cols(), c.eps));
        layer.bias -= c.lr * (state.m[l].bias / bc1).cwiseQuotient(
                          (state.v[l].bias / bc2).cwiseSqrt() +
                          Vector::Constant(layer.bias.size(), c.eps));
        layer.apply_mask();
    }
}

// ---------------------------------------------------------------------------
// flat parameter access (finite-difference checks, diagnostics)
// ---------------------------------------------------------------------------

inline long parameter_count(const Network& net) {
    long n = 0;
    for (const auto& layer : net.layers) n += layer.weights.size() + layer.bias.size();
    return n;
}

inline Vector get_parameters(const Network& net) {
    Vector p(parameter_count(net));
    long at = 0;
    for (const auto& layer : net.layers) {
        for (int i = 0; i < layer.weights.rows(); ++i)
            for (int j = 0; j < layer.weights.cols(); ++j) p[at++] = layer.weights(i, j);
        for (int i = 0; i < layer.bias.size(); ++i) p[at++] = layer.bias[i];
    }
    return p;
}

inline void set_parameters(Network& net, const Vector& p) {
    if (p.size() != parameter_count(net)) throw config_error("set_parameters: size mismatch");
    long at = 0;
    for (auto& layer : net.layers) {
        for (int i = 0; i < layer.weights.rows(); ++i)
            for (int j = 0; j < layer.weights.cols(); ++j) layer.weights(i, j) = p[at++];
        for (int i = 0; i < layer.bias.size(); ++i) layer.bias[i] = p[at++];
        layer.apply_mask();
    }
}

inline Vector flatten_grads(const NetworkGrads& grads) {
    long n = 0;
    for (const auto& g : grads.layers) n += g.weights.size() + g.bias.size();
    Vector out(n);
    long at = 0;
    for (const auto& g : grads.layers) {
        for (int i = 0; i < g.weights.rows(); ++i)
            for (int j = 0; j < g.weights.cols(); ++j) out[at++] = g.weights(i, j);
        for (int i = 0; i < g.bias.size(); ++i) out[at++] = g.bias[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// checkpoints: magic "LDLM", version u32, layer count u32, then per layer
// in u32, out u32, activation tag u32, activation alpha f64, mask flag u8,
// row-major f64 weights, f64 bias, and bit-packed mask rows (LSB first) when
// the flag is set. All fields little-endian.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw config_error("checkpoint: truncated file");
    return value;
}

}  // namespace detail

inline void save_network(const Network& net, std::ostream& os) {
    os.write("LDLM", 4);
    detail::write_pod<std::uint32_t>(os, 1u);
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(net.layers.size()));
    for (const auto& layer : net.layers) {
        detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(layer.in_width()));
        detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(layer.out_width()));
        detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(layer.activation.kind));
        detail::write_pod<double>(os, layer.activation.alpha);
        detail::write_pod<std::uint8_t>(os, layer.masked ? 1 : 0);
        for (int i = 0; i < layer.weights.rows(); ++i)
            for (int j = 0; j < layer.weights.cols(); ++j)
                detail::write_pod<double>(os, layer.weights(i, j));
        for (int i = 0; i < layer.bias.size(); ++i) detail::write_pod<double>(os, layer.bias[i]);
        if (layer.masked) {
            const int row_bytes = (layer.in_width() + 7) / 8;
            for (int i = 0; i < layer.out_width(); ++i) {
                std::vector<std::uint8_t> packed(static_cast<std::size_t>(row_bytes), 0);
                for (int j = 0; j < layer.in_width(); ++j)
                    if (layer.mask(i, j) != 0.0)
                        packed[static_cast<std::size_t>(j / 8)] |= static_cast<std::uint8_t>(1u << (j % 8));
                os.write(reinterpret_cast<const char*>(packed.data()), row_bytes);
            }
        }
    }
}

inline void save_network(const Network& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("save_network: cannot open " + path);
    save_network(net, os);
}

inline Network load_network(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "LDLM", 4) != 0)
        throw config_error("load_network: bad magic, not a checkpoint");
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1u) throw config_error("load_network: unsupported version");
    const auto count = detail::read_pod<std::uint32_t>(is);
    Network net;
    net.layers.resize(count);
    for (auto& layer : net.layers) {
        const auto in = detail::read_pod<std::uint32_t>(is);
        const auto out = detail::read_pod<std::uint32_t>(is);
        const auto tag = detail::read_pod<std::uint32_t>(is);
        const double alpha = detail::read_pod<double>(is);
        const auto masked = detail::read_pod<std::uint8_t>(is);
        if (tag > 3) throw config_error("load_network: unknown activation tag");
        layer.activation.kind = static_cast<ActKind>(tag);
        layer.activation.alpha = alpha;
        layer.weights.resize(static_cast<int>(out), static_cast<int>(in));
        layer.bias.resize(static_cast<int>(out));
        for (std::uint32_t i = 0; i < out; ++i)
            for (std::uint32_t j = 0; j < in; ++j)
                layer.weights(static_cast<int>(i), static_cast<int>(j)) = detail::read_pod<double>(is);
        for (std::uint32_t i = 0; i < out; ++i) layer.bias[static_cast<int>(i)] = detail::read_pod<double>(is);
        if (masked) {
            layer.masked = true;
            layer.mask.resize(static_cast<int>(out), static_cast<int>(in));
            const int row_bytes = (static_cast<int>(in) + 7) / 8;
            std::vector<std::uint8_t> packed(static_cast<std::size_t>(row_bytes));
            for (std::uint32_t i = 0; i < out; ++i) {
                is.read(reinterpret_cast<char*>(packed.data()), row_bytes);
                if (!is) throw config_error("load_network: truncated mask");
                for (std::uint32_t j = 0; j < in; ++j)
                    layer.mask(static_cast<int>(i), static_cast<int>(j)) =
                        (packed[j / 8] >> (j % 8)) & 1u ? 1.0 : 0.0;
            }
            layer.apply_mask();
        }
    }
    net.validate();
    return net;
}

inline Network load_network(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("load_network: cannot open " + path);
    return load_network(is);
}

}  // namespace romlab
