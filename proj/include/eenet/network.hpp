#ifndef EENET_NETWORK_HPP
#define EENET_NETWORK_HPP

#include <cstdint>
#include <vector>

#include "eenet/tensor.hpp"

namespace eenet {

enum class LayerKind { Dense, ReLU, AvgPool };

struct Layer {
    LayerKind kind = LayerKind::Dense;
    size_t in_dim = 0;
    size_t out_dim = 0;
    size_t pool_factor = 1; // AvgPool only
    bool has_bias = false;  // Dense only
    Tensor weight;          // Dense: (out_dim x in_dim)
    Tensor bias;            // Dense with bias: (out_dim)
};

Layer make_dense(size_t in_dim, size_t out_dim, bool has_bias, Tensor weight, Tensor bias);
Layer make_relu(size_t n);
Layer make_avgpool(size_t n, size_t factor);

// Counted additions + multiplications; a multiply-add is 2.
//   Dense: 2*in*out + out if biased
//   ReLU / AvgPool: n (input length)
int64_t layer_flops(const Layer& layer);

// Ordered layer stack. flops_per_layer is maintained alongside layers and
// revalidated against the closed-form counts on load.
struct Network {
    std::vector<Layer> layers;
    size_t num_classes = 0;
    std::vector<int64_t> flops_per_layer;

    size_t layer_count() const { return layers.size(); }
    size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    int64_t total_flops() const;
    // Backbone FLOPs through layer j inclusive, 1-based. prefix_flops(0) == 0.
    int64_t prefix_flops(size_t j) const;
    size_t layer_output_dim(size_t j) const { return layers.at(j - 1).out_dim; }
};

// Recomputes flops_per_layer and checks the structural invariants
// (dimension chaining, final width == num_classes, pool divisibility).
void finalize_network(Network& net);

// Applies layer j (1-based) to `input`; dimension errors name the layer.
Tensor apply_layer(const Network& net, size_t j, const Tensor& input);

// All M intermediate outputs x_1..x_M for one input.
std::vector<Tensor> forward_collect(const Network& net, const Tensor& input);

// Final-layer output only.
Tensor forward_final(const Network& net, const Tensor& input);

// Backbone prediction: 1-based argmax class of the final output.
int backbone_predict(const Network& net, const Tensor& input);

// Default backbone: `dense_layers` weight layers of width `hidden_width`
// with ReLU after every hidden layer, Xavier-uniform init.
Network make_mlp(size_t input_dim, size_t num_classes, size_t dense_layers,
                 size_t hidden_width, uint64_t seed);

// FNV-1a over the raw bytes of every parameter tensor; used to verify that
// backbone weights stay bit-identical while ICs train.
uint64_t parameter_checksum(const Network& net);

} // namespace eenet

#endif
