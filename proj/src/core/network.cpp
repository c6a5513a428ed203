#include "eenet/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "eenet/errors.hpp"
#include "eenet/mathutil.hpp"
#include "eenet/rng.hpp"

namespace eenet {

Layer make_dense(size_t in_dim, size_t out_dim, bool has_bias, Tensor weight, Tensor bias) {
    if (in_dim == 0 || out_dim == 0) {
        throw InputError("dense layer dimensions must be positive");
    }
    if (!weight.is_matrix() || weight.shape[0] != out_dim || weight.shape[1] != in_dim) {
        throw DimensionError("dense weight must have shape (out=" + std::to_string(out_dim) +
                             ", in=" + std::to_string(in_dim) + ")");
    }
    if (has_bias && (!bias.is_vector() || bias.shape[0] != out_dim)) {
        throw DimensionError("dense bias must have length " + std::to_string(out_dim));
    }
    Layer layer;
    layer.kind = LayerKind::Dense;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.has_bias = has_bias;
    layer.weight = std::move(weight);
    if (has_bias) {
        layer.bias = std::move(bias);
    }
    return layer;
}

Layer make_relu(size_t n) {
    if (n == 0) {
        throw InputError("relu width must be positive");
    }
    Layer layer;
    layer.kind = LayerKind::ReLU;
    layer.in_dim = n;
    layer.out_dim = n;
    return layer;
}

Layer make_avgpool(size_t n, size_t factor) {
    if (n == 0 || factor == 0) {
        throw InputError("avgpool width and factor must be positive");
    }
    if (n % factor != 0) {
        throw DimensionError("avgpool factor " + std::to_string(factor) +
                             " does not divide input length " + std::to_string(n));
    }
    Layer layer;
    layer.kind = LayerKind::AvgPool;
    layer.in_dim = n;
    layer.out_dim = n / factor;
    layer.pool_factor = factor;
    return layer;
}

int64_t layer_flops(const Layer& layer) {
    switch (layer.kind) {
    case LayerKind::Dense: {
        int64_t flops = 2 * static_cast<int64_t>(layer.in_dim) * static_cast<int64_t>(layer.out_dim);
        if (layer.has_bias) {
            flops += static_cast<int64_t>(layer.out_dim);
        }
        return flops;
    }
    case LayerKind::ReLU:
    case LayerKind::AvgPool:
        return static_cast<int64_t>(layer.in_dim);
    }
    throw Error(ErrorCode::Internal, "unknown layer kind");
}

int64_t Network::total_flops() const {
    int64_t total = 0;
    for (int64_t f : flops_per_layer) {
        total += f;
    }
    return total;
}

int64_t Network::prefix_flops(size_t j) const {
    int64_t total = 0;
    for (size_t i = 0; i < j && i < flops_per_layer.size(); ++i) {
        total += flops_per_layer[i];
    }
    return total;
}

void finalize_network(Network& net) {
    if (net.layers.empty()) {
        throw ValidationError("network has no layers");
    }
    if (net.num_classes == 0) {
        throw ValidationError("num_classes must be positive");
    }
    for (size_t i = 1; i < net.layers.size(); ++i) {
        if (net.layers[i].in_dim != net.layers[i - 1].out_dim) {
            throw DimensionError("layer " + std::to_string(i + 1) + " expects input length " +
                                 std::to_string(net.layers[i].in_dim) + " but layer " +
                                 std::to_string(i) + " outputs " +
                                 std::to_string(net.layers[i - 1].out_dim));
        }
    }
    if (net.layers.back().out_dim != net.num_classes) {
        throw ValidationError("final layer output length " +
                              std::to_string(net.layers.back().out_dim) +
                              " must equal num_classes " + std::to_string(net.num_classes));
    }
    net.flops_per_layer.clear();
    net.flops_per_layer.reserve(net.layers.size());
    for (const Layer& layer : net.layers) {
        net.flops_per_layer.push_back(layer_flops(layer));
    }
}

Tensor apply_layer(const Network& net, size_t j, const Tensor& input) {
    const Layer& layer = net.layers.at(j - 1);
    if (!input.is_vector() || input.shape[0] != layer.in_dim) {
        throw DimensionError("layer " + std::to_string(j) + ": expected input length " +
                             std::to_string(layer.in_dim) + ", got " +
                             std::to_string(input.numel()));
    }
    switch (layer.kind) {
    case LayerKind::Dense: {
        Tensor out = Tensor::zeros(layer.out_dim);
        for (size_t r = 0; r < layer.out_dim; ++r) {
            double acc = layer.has_bias ? layer.bias.data[r] : 0.0;
            const double* w = &layer.weight.data[r * layer.in_dim];
            for (size_t c = 0; c < layer.in_dim; ++c) {
                acc += w[c] * input.data[c];
            }
            out.data[r] = acc;
        }
        return out;
    }
    case LayerKind::ReLU: {
        Tensor out = input;
        for (double& v : out.data) {
            v = v > 0.0 ? v : 0.0;
        }
        return out;
    }
    case LayerKind::AvgPool: {
        Tensor out = Tensor::zeros(layer.out_dim);
        const double inv = 1.0 / static_cast<double>(layer.pool_factor);
        for (size_t i = 0; i < layer.out_dim; ++i) {
            double acc = 0.0;
            for (size_t t = 0; t < layer.pool_factor; ++t) {
                acc += input.data[i * layer.pool_factor + t];
            }
            out.data[i] = acc * inv;
        }
        return out;
    }
    }
    throw Error(ErrorCode::Internal, "unknown layer kind");
}

std::vector<Tensor> forward_collect(const Network& net, const Tensor& input) {
    std::vector<Tensor> outputs;
    outputs.reserve(net.layers.size());
    const Tensor* current = &input;
    for (size_t j = 1; j <= net.layers.size(); ++j) {
        outputs.push_back(apply_layer(net, j, *current));
        current = &outputs.back();
    }
    return outputs;
}

Tensor forward_final(const Network& net, const Tensor& input) {
    Tensor current = input;
    for (size_t j = 1; j <= net.layers.size(); ++j) {
        current = apply_layer(net, j, current);
    }
    return current;
}

int backbone_predict(const Network& net, const Tensor& input) {
    const Tensor out = forward_final(net, input);
    return static_cast<int>(argmax(out.data)) + 1;
}

Network make_mlp(size_t input_dim, size_t num_classes, size_t dense_layers,
                 size_t hidden_width, uint64_t seed) {
    if (input_dim == 0 || num_classes == 0 || dense_layers == 0 || hidden_width == 0) {
        throw InputError("mlp dimensions must be positive");
    }
    Network net;
    net.num_classes = num_classes;
    size_t in_dim = input_dim;
    for (size_t d = 0; d < dense_layers; ++d) {
        const bool last = d + 1 == dense_layers;
        const size_t out_dim = last ? num_classes : hidden_width;
        Xoshiro256ss rng(derive_seed(seed, SeedDomain::LayerInit, d));
        const double bound = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
        Tensor weight = Tensor::zeros(out_dim, in_dim);
        for (double& w : weight.data) {
            w = rng.uniform(-bound, bound);
        }
        net.layers.push_back(make_dense(in_dim, out_dim, true, std::move(weight), Tensor::zeros(out_dim)));
        if (!last) {
            net.layers.push_back(make_relu(out_dim));
        }
        in_dim = out_dim;
    }
    finalize_network(net);
    return net;
}

uint64_t parameter_checksum(const Network& net) {
    uint64_t hash = 0xCBF29CE484222325ULL; // FNV-1a offset basis
    auto absorb = [&hash](const Tensor& t) {
        for (double v : t.data) {
            uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            for (int b = 0; b < 8; ++b) {
                hash ^= (bits >> (8 * b)) & 0xFF;
                hash *= 0x100000001B3ULL;
            }
        }
    };
    for (const Layer& layer : net.layers) {
        if (layer.kind == LayerKind::Dense) {
            absorb(layer.weight);
            if (layer.has_bias) {
                absorb(layer.bias);
            }
        }
    }
    return hash;
}

} // namespace eenet
