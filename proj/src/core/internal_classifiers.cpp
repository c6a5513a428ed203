#include "eenet/internal_classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eenet/errors.hpp"
#include "eenet/mathutil.hpp"
#include "eenet/rng.hpp"

namespace eenet {

size_t default_pool_factor(size_t width) {
    size_t factor = 1;
    while (width % (factor * 2) == 0 && width / factor > 64) {
        factor *= 2;
    }
    return factor;
}

std::vector<size_t> place_ics(const Network& net, const std::vector<double>& fractions) {
    if (net.layer_count() < 2) {
        throw InputError("cannot place internal classifiers on a network with fewer than 2 layers");
    }
    for (size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] > 0.0 && fractions[i] < 1.0)) {
            throw InputError("placement fractions must lie in (0, 1)");
        }
        if (i > 0 && fractions[i] <= fractions[i - 1]) {
            throw InputError("placement fractions must be strictly increasing");
        }
    }
    const double total = static_cast<double>(net.total_flops());
    std::vector<size_t> indices;
    for (double f : fractions) {
        size_t j = 1;
        while (static_cast<double>(net.prefix_flops(j)) / total < f) {
            ++j;
        }
        if (indices.empty() || indices.back() != j) {
            indices.push_back(j);
        }
    }
    return indices;
}

namespace {

Tensor avgpool_vector(const Tensor& input, size_t factor) {
    const size_t pooled = input.numel() / factor;
    Tensor out = Tensor::zeros(pooled);
    const double inv = 1.0 / static_cast<double>(factor);
    for (size_t i = 0; i < pooled; ++i) {
        double acc = 0.0;
        for (size_t t = 0; t < factor; ++t) {
            acc += input.data[i * factor + t];
        }
        out.data[i] = acc * inv;
    }
    return out;
}

} // namespace

ICBundle make_ic_bundle(const Network& net, const std::vector<double>& fractions) {
    ICBundle bundle;
    bundle.placement_fractions = fractions;
    for (size_t attach : place_ics(net, fractions)) {
        const size_t width = net.layer_output_dim(attach);
        const size_t factor = default_pool_factor(width);
        const size_t pooled = width / factor;
        InternalClassifier ic;
        ic.attach_after_layer = attach;
        ic.pool_factor = factor;
        ic.linear = make_dense(pooled, net.num_classes, true,
                               Tensor::zeros(net.num_classes, pooled),
                               Tensor::zeros(net.num_classes));
        bundle.classifiers.push_back(std::move(ic));
    }
    return bundle;
}

std::vector<double> ic_predict(const InternalClassifier& ic, const Tensor& layer_output) {
    if (!layer_output.is_vector() ||
        layer_output.numel() != ic.linear.in_dim * ic.pool_factor) {
        throw DimensionError("internal classifier expects layer output length " +
                             std::to_string(ic.linear.in_dim * ic.pool_factor) + ", got " +
                             std::to_string(layer_output.numel()));
    }
    const Tensor pooled = avgpool_vector(layer_output, ic.pool_factor);
    std::vector<double> logits(ic.linear.out_dim);
    for (size_t r = 0; r < ic.linear.out_dim; ++r) {
        double acc = ic.linear.bias.data[r];
        const double* w = &ic.linear.weight.data[r * ic.linear.in_dim];
        for (size_t c = 0; c < ic.linear.in_dim; ++c) {
            acc += w[c] * pooled.data[c];
        }
        logits[r] = acc;
    }
    return softmax(logits);
}

bool ic_exit_decision(const std::vector<double>& probs, DecisionRule rule, double threshold) {
    if (rule == DecisionRule::MaxProb) {
        if (!(threshold >= 0.0 && threshold <= 1.0)) {
            throw InputError("max-prob threshold must lie in [0, 1]");
        }
        return probs[argmax(probs)] > threshold;
    }
    const double bound = std::log(static_cast<double>(probs.size()));
    if (!(threshold >= 0.0 && threshold <= bound)) {
        throw InputError("entropy threshold must lie in [0, ln K]");
    }
    return entropy(probs) < threshold;
}

TrainLog train_ics(const Network& net, ICBundle& bundle, const Dataset& train,
                   const TrainConfig& config) {
    config.validate();
    train.validate();
    if (train.num_classes != net.num_classes) {
        throw InputError("dataset class count does not match network");
    }

    const size_t k = net.num_classes;
    TrainLog log;
    log.epoch_mean_loss.assign(config.epochs, 0.0);

    // The backbone is frozen, so each IC sees fixed pooled features; cache
    // them once and train each head independently.
    for (size_t ic_idx = 0; ic_idx < bundle.classifiers.size(); ++ic_idx) {
        InternalClassifier& ic = bundle.classifiers[ic_idx];
        std::vector<Tensor> pooled;
        pooled.reserve(train.size());
        for (const Sample& s : train.samples) {
            Tensor x = s.features;
            for (size_t j = 1; j <= ic.attach_after_layer; ++j) {
                x = apply_layer(net, j, x);
            }
            pooled.push_back(avgpool_vector(x, ic.pool_factor));
        }

        const size_t in_dim = ic.linear.in_dim;
        Tensor vel_w = Tensor::zeros(k, in_dim);
        Tensor vel_b = Tensor::zeros(k);
        std::vector<size_t> order(train.size());
        for (size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }

        for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
            Xoshiro256ss rng(derive_seed(config.seed, SeedDomain::IcTrainShuffle,
                                         ic_idx * config.epochs + epoch));
            for (size_t i = order.size(); i > 1; --i) {
                std::swap(order[i - 1], order[rng.next_below(i)]);
            }

            double loss_sum = 0.0;
            size_t start = 0;
            while (start < order.size()) {
                const size_t end = std::min(start + config.batch_size, order.size());
                Tensor grad_w = Tensor::zeros(k, in_dim);
                Tensor grad_b = Tensor::zeros(k);
                for (size_t i = start; i < end; ++i) {
                    const Tensor& x = pooled[order[i]];
                    const int label = train.samples[order[i]].label;
                    std::vector<double> logits(k);
                    for (size_t r = 0; r < k; ++r) {
                        double acc = ic.linear.bias.data[r];
                        const double* w = &ic.linear.weight.data[r * in_dim];
                        for (size_t c = 0; c < in_dim; ++c) {
                            acc += w[c] * x.data[c];
                        }
                        logits[r] = acc;
                    }
                    const std::vector<double> probs = softmax(logits);
                    const double p = probs[static_cast<size_t>(label) - 1];
                    loss_sum += -std::log(p > 0.0 ? p : 1e-300);
                    for (size_t r = 0; r < k; ++r) {
                        const double g = probs[r] - (static_cast<size_t>(label) - 1 == r ? 1.0 : 0.0);
                        grad_b.data[r] += g;
                        for (size_t c = 0; c < in_dim; ++c) {
                            grad_w.data[r * in_dim + c] += g * x.data[c];
                        }
                    }
                }
                const double inv = 1.0 / static_cast<double>(end - start);
                for (size_t t = 0; t < grad_w.data.size(); ++t) {
                    double& v = vel_w.data[t];
                    v = config.momentum * v + grad_w.data[t] * inv;
                    ic.linear.weight.data[t] -= config.learning_rate * v;
                }
                for (size_t t = 0; t < grad_b.data.size(); ++t) {
                    double& v = vel_b.data[t];
                    v = config.momentum * v + grad_b.data[t] * inv;
                    ic.linear.bias.data[t] -= config.learning_rate * v;
                }
                start = end;
            }
            // Mean loss across ICs, accumulated per epoch.
            log.epoch_mean_loss[epoch] += loss_sum / static_cast<double>(train.size());
        }
    }
    if (!bundle.classifiers.empty()) {
        for (double& v : log.epoch_mean_loss) {
            v /= static_cast<double>(bundle.classifiers.size());
        }
    }
    return log;
}

} // namespace eenet
