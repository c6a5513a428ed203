#include "eenet/train.hpp"

#include <cmath>
#include <string>

#include "eenet/errors.hpp"
#include "eenet/mathutil.hpp"
#include "eenet/rng.hpp"

namespace eenet {

void TrainConfig::validate() const {
    // Zero is allowed and means "no step"; the zero-step contract is tested.
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw InputError("learning_rate must be non-negative");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw InputError("momentum must lie in [0, 1)");
    }
    if (epochs == 0) {
        throw InputError("epochs must be positive");
    }
    if (batch_size == 0) {
        throw InputError("batch_size must be positive");
    }
}

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    g.weight.resize(net.layers.size());
    g.bias.resize(net.layers.size());
    for (size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& layer = net.layers[i];
        if (layer.kind == LayerKind::Dense) {
            g.weight[i] = Tensor::zeros(layer.out_dim, layer.in_dim);
            if (layer.has_bias) {
                g.bias[i] = Tensor::zeros(layer.out_dim);
            }
        }
    }
    return g;
}

void Gradients::accumulate(const Gradients& other) {
    for (size_t i = 0; i < weight.size(); ++i) {
        for (size_t t = 0; t < weight[i].data.size(); ++t) {
            weight[i].data[t] += other.weight[i].data[t];
        }
        for (size_t t = 0; t < bias[i].data.size(); ++t) {
            bias[i].data[t] += other.bias[i].data[t];
        }
    }
}

void Gradients::scale(double factor) {
    for (auto& t : weight) {
        for (double& v : t.data) {
            v *= factor;
        }
    }
    for (auto& t : bias) {
        for (double& v : t.data) {
            v *= factor;
        }
    }
}

namespace {

void check_label(const Network& net, int label) {
    if (label < 1 || static_cast<size_t>(label) > net.num_classes) {
        throw InputError("label " + std::to_string(label) + " out of range [1.." +
                         std::to_string(net.num_classes) + "]");
    }
}

} // namespace

double cross_entropy_loss(const Network& net, const Tensor& input, int label) {
    check_label(net, label);
    const Tensor logits = forward_final(net, input);
    const std::vector<double> probs = softmax(logits.data);
    // -log softmax, computed from the stabilized probabilities.
    const double p = probs[static_cast<size_t>(label) - 1];
    return -std::log(p > 0.0 ? p : 1e-300);
}

Gradients backward(const Network& net, const Tensor& input, int label, double* loss_out) {
    check_label(net, label);
    const std::vector<Tensor> outputs = forward_collect(net, input);
    const size_t m = net.layers.size();

    const std::vector<double> probs = softmax(outputs[m - 1].data);
    if (loss_out != nullptr) {
        const double p = probs[static_cast<size_t>(label) - 1];
        *loss_out = -std::log(p > 0.0 ? p : 1e-300);
    }

    // dL/dlogits for softmax cross-entropy.
    std::vector<double> grad(probs);
    grad[static_cast<size_t>(label) - 1] -= 1.0;

    Gradients g = Gradients::zeros_like(net);
    for (size_t idx = m; idx-- > 0;) {
        const Layer& layer = net.layers[idx];
        const Tensor& layer_in = idx == 0 ? input : outputs[idx - 1];
        switch (layer.kind) {
        case LayerKind::Dense: {
            Tensor& dw = g.weight[idx];
            for (size_t r = 0; r < layer.out_dim; ++r) {
                const double gr = grad[r];
                for (size_t c = 0; c < layer.in_dim; ++c) {
                    dw.data[r * layer.in_dim + c] = gr * layer_in.data[c];
                }
            }
            if (layer.has_bias) {
                for (size_t r = 0; r < layer.out_dim; ++r) {
                    g.bias[idx].data[r] = grad[r];
                }
            }
            std::vector<double> prev(layer.in_dim, 0.0);
            for (size_t r = 0; r < layer.out_dim; ++r) {
                const double gr = grad[r];
                const double* w = &layer.weight.data[r * layer.in_dim];
                for (size_t c = 0; c < layer.in_dim; ++c) {
                    prev[c] += w[c] * gr;
                }
            }
            grad = std::move(prev);
            break;
        }
        case LayerKind::ReLU: {
            for (size_t i = 0; i < layer.in_dim; ++i) {
                if (layer_in.data[i] <= 0.0) {
                    grad[i] = 0.0;
                }
            }
            break;
        }
        case LayerKind::AvgPool: {
            std::vector<double> prev(layer.in_dim, 0.0);
            const double inv = 1.0 / static_cast<double>(layer.pool_factor);
            for (size_t i = 0; i < layer.out_dim; ++i) {
                const double gi = grad[i] * inv;
                for (size_t t = 0; t < layer.pool_factor; ++t) {
                    prev[i * layer.pool_factor + t] = gi;
                }
            }
            grad = std::move(prev);
            break;
        }
        }
    }
    return g;
}

TrainLog sgd_train(Network& net, const Dataset& dataset, const TrainConfig& config) {
    config.validate();
    dataset.validate();
    if (dataset.num_classes != net.num_classes) {
        throw InputError("dataset has " + std::to_string(dataset.num_classes) +
                         " classes but network expects " + std::to_string(net.num_classes));
    }

    Gradients velocity = Gradients::zeros_like(net);
    std::vector<size_t> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }

    TrainLog log;
    log.epoch_mean_loss.reserve(config.epochs);
    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Xoshiro256ss rng(derive_seed(config.seed, SeedDomain::TrainShuffle, epoch));
        for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.next_below(i)]);
        }

        double loss_sum = 0.0;
        size_t start = 0;
        while (start < order.size()) {
            const size_t end = std::min(start + config.batch_size, order.size());
            Gradients batch = Gradients::zeros_like(net);
            for (size_t i = start; i < end; ++i) {
                const Sample& s = dataset.samples[order[i]];
                double loss = 0.0;
                const Gradients g = backward(net, s.features, s.label, &loss);
                batch.accumulate(g);
                loss_sum += loss;
            }
            batch.scale(1.0 / static_cast<double>(end - start));

            for (size_t idx = 0; idx < net.layers.size(); ++idx) {
                Layer& layer = net.layers[idx];
                if (layer.kind != LayerKind::Dense) {
                    continue;
                }
                for (size_t t = 0; t < layer.weight.data.size(); ++t) {
                    double& v = velocity.weight[idx].data[t];
                    v = config.momentum * v + batch.weight[idx].data[t];
                    layer.weight.data[t] -= config.learning_rate * v;
                }
                if (layer.has_bias) {
                    for (size_t t = 0; t < layer.bias.data.size(); ++t) {
                        double& v = velocity.bias[idx].data[t];
                        v = config.momentum * v + batch.bias[idx].data[t];
                        layer.bias.data[t] -= config.learning_rate * v;
                    }
                }
            }
            start = end;
        }
        log.epoch_mean_loss.push_back(loss_sum / static_cast<double>(dataset.size()));
    }
    return log;
}

} // namespace eenet
