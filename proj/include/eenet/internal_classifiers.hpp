#ifndef EENET_INTERNAL_CLASSIFIERS_HPP
#define EENET_INTERNAL_CLASSIFIERS_HPP

#include <vector>

#include "eenet/dataset.hpp"
#include "eenet/network.hpp"
#include "eenet/train.hpp"

namespace eenet {

// Shallow-Deep-style head: average-pool feature reduction followed by one
// linear layer into K classes.
struct InternalClassifier {
    size_t attach_after_layer = 0; // backbone layer index j, 1-based
    size_t pool_factor = 1;
    Layer linear; // Dense(pooled_dim -> K) with bias
};

struct ICBundle {
    std::vector<InternalClassifier> classifiers; // strictly increasing attach points
    std::vector<double> placement_fractions;

    size_t size() const { return classifiers.size(); }
    bool empty() const { return classifiers.empty(); }
};

enum class DecisionRule { MaxProb, Entropy };

// Smallest power of two dividing `width` with pooled dim <= 64; falls back
// to the largest power-of-two divisor when no such factor exists.
size_t default_pool_factor(size_t width);

// For each fraction, the smallest layer index whose cumulative-FLOPs
// fraction reaches it; duplicates collapse to one attach point.
std::vector<size_t> place_ics(const Network& net, const std::vector<double>& fractions);

// Places ICs and zero-initializes their linear heads.
ICBundle make_ic_bundle(const Network& net, const std::vector<double>& fractions);

// Trains every IC against the frozen backbone (features cached per attach
// point); backbone parameters are untouched, bit for bit.
TrainLog train_ics(const Network& net, ICBundle& bundle, const Dataset& train,
                   const TrainConfig& config);

// softmax(linear(avgpool(layer_output))).
std::vector<double> ic_predict(const InternalClassifier& ic, const Tensor& layer_output);

// MaxProb: exit iff max(probs) > threshold. Entropy: exit iff
// entropy(probs) < threshold. Both strict.
bool ic_exit_decision(const std::vector<double>& probs, DecisionRule rule, double threshold);

} // namespace eenet

#endif
