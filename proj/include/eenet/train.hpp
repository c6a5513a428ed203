#ifndef EENET_TRAIN_HPP
#define EENET_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "eenet/dataset.hpp"
#include "eenet/network.hpp"

namespace eenet {

struct TrainConfig {
    double learning_rate = 0.05;
    double momentum = 0.9;
    size_t epochs = 20;
    size_t batch_size = 32;
    uint64_t seed = 0;

    void validate() const;
};

// One gradient tensor per parameter tensor, indexed like Network::layers;
// entries for parameter-free layers stay empty.
struct Gradients {
    std::vector<Tensor> weight;
    std::vector<Tensor> bias;

    static Gradients zeros_like(const Network& net);
    void accumulate(const Gradients& other);
    void scale(double factor);
};

// Softmax cross-entropy of the final layer output against a 1-based label.
double cross_entropy_loss(const Network& net, const Tensor& input, int label);

// Analytic gradients of cross_entropy_loss for every parameter; also
// reports the loss value.
Gradients backward(const Network& net, const Tensor& input, int label, double* loss_out = nullptr);

struct TrainLog {
    std::vector<double> epoch_mean_loss;
};

// In-place mini-batch SGD with momentum. Identical seeds give bit-identical
// parameters and logs.
TrainLog sgd_train(Network& net, const Dataset& dataset, const TrainConfig& config);

} // namespace eenet

#endif
