#include "eenet/class_means.hpp"

#include <cmath>
#include <string>

#include "eenet/errors.hpp"
#include "eenet/mathutil.hpp"

namespace eenet {

std::vector<std::vector<Tensor>> compute_class_means(const Network& net, const Dataset& train) {
    train.validate();
    if (train.num_classes != net.num_classes) {
        throw InputError("dataset class count " + std::to_string(train.num_classes) +
                         " does not match network num_classes " +
                         std::to_string(net.num_classes));
    }
    const size_t m = net.layer_count();
    const size_t k = net.num_classes;

    std::vector<size_t> class_counts(k, 0);
    for (const Sample& s : train.samples) {
        ++class_counts[s.label - 1];
    }
    for (size_t c = 0; c < k; ++c) {
        if (class_counts[c] == 0) {
            throw InputError("class " + std::to_string(c + 1) + " has no samples");
        }
    }

    std::vector<std::vector<Tensor>> sums(m);
    for (size_t j = 0; j < m; ++j) {
        sums[j].reserve(k);
        for (size_t c = 0; c < k; ++c) {
            sums[j].push_back(Tensor::zeros(net.layer_output_dim(j + 1)));
        }
    }
    for (const Sample& s : train.samples) {
        const std::vector<Tensor> outputs = forward_collect(net, s.features);
        const size_t c = static_cast<size_t>(s.label) - 1;
        for (size_t j = 0; j < m; ++j) {
            Tensor& acc = sums[j][c];
            for (size_t t = 0; t < acc.data.size(); ++t) {
                acc.data[t] += outputs[j].data[t];
            }
        }
    }
    for (size_t j = 0; j < m; ++j) {
        for (size_t c = 0; c < k; ++c) {
            const double inv = 1.0 / static_cast<double>(class_counts[c]);
            for (double& v : sums[j][c].data) {
                v *= inv;
            }
        }
    }
    return sums;
}

std::vector<std::vector<double>> compute_normalizers(const Network& net, const Dataset& train,
                                                     const std::vector<std::vector<Tensor>>& means,
                                                     std::vector<std::string>* warnings) {
    train.validate();
    const size_t m = net.layer_count();
    const size_t k = net.num_classes;
    if (means.size() != m) {
        throw DimensionError("means cover " + std::to_string(means.size()) + " layers, network has " +
                             std::to_string(m));
    }

    std::vector<std::vector<double>> sums(m, std::vector<double>(k, 0.0));
    for (const Sample& s : train.samples) {
        const std::vector<Tensor> outputs = forward_collect(net, s.features);
        for (size_t j = 0; j < m; ++j) {
            const std::vector<double> d = distances(outputs[j], means[j]);
            for (size_t c = 0; c < k; ++c) {
                sums[j][c] += d[c];
            }
        }
    }
    const double inv_n = 1.0 / static_cast<double>(train.size());
    for (size_t j = 0; j < m; ++j) {
        for (size_t c = 0; c < k; ++c) {
            double avg = sums[j][c] * inv_n;
            if (avg <= 0.0) {
                avg = kNormalizerFloor;
                if (warnings != nullptr) {
                    warnings->push_back("normalizer for layer " + std::to_string(j + 1) +
                                        ", class " + std::to_string(c + 1) +
                                        " is zero; floored to 1e-12");
                }
            }
            sums[j][c] = avg;
        }
    }
    return sums;
}

ClassMeansModel build_class_means(const Network& net, const Dataset& train) {
    ClassMeansModel model;
    model.layer_count = net.layer_count();
    model.class_count = net.num_classes;
    model.means = compute_class_means(net, train);
    model.normalizers = compute_normalizers(net, train, model.means, &model.warnings);
    return model;
}

std::vector<double> distances(const Tensor& layer_output, const std::vector<Tensor>& means_at_layer) {
    std::vector<double> out;
    out.reserve(means_at_layer.size());
    for (const Tensor& mean : means_at_layer) {
        if (!same_shape(layer_output, mean)) {
            throw DimensionError("layer output length " + std::to_string(layer_output.numel()) +
                                 " does not match mean length " + std::to_string(mean.numel()));
        }
        double acc = 0.0;
        for (size_t t = 0; t < mean.data.size(); ++t) {
            const double diff = layer_output.data[t] - mean.data[t];
            acc += diff * diff;
        }
        out.push_back(std::sqrt(acc));
    }
    return out;
}

std::vector<double> normalize_distances(const std::vector<double>& raw,
                                        const std::vector<double>& normalizer_at_layer) {
    if (raw.size() != normalizer_at_layer.size()) {
        throw DimensionError("distance count " + std::to_string(raw.size()) +
                             " does not match normalizer count " +
                             std::to_string(normalizer_at_layer.size()));
    }
    std::vector<double> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        if (!(normalizer_at_layer[i] > 0.0)) {
            throw InputError("normalizers must be positive");
        }
        out[i] = raw[i] / normalizer_at_layer[i];
    }
    return out;
}

std::vector<double> class_probabilities(const std::vector<double>& normalized,
                                        DistanceTransform transform) {
    std::vector<double> logits(normalized.size());
    for (size_t i = 0; i < normalized.size(); ++i) {
        const double d = std::max(normalized[i], kDistanceEpsilon);
        logits[i] = transform == DistanceTransform::Reciprocal ? 1.0 / d : -1.0 / d;
    }
    return softmax(logits);
}

std::vector<int64_t> nearest_mean_confusion(const Network& net, const Dataset& dataset,
                                            const std::vector<std::vector<Tensor>>& means,
                                            size_t layer) {
    dataset.validate();
    if (layer < 1 || layer > net.layer_count()) {
        throw InputError("layer index " + std::to_string(layer) + " out of range [1.." +
                         std::to_string(net.layer_count()) + "]");
    }
    const size_t k = net.num_classes;
    std::vector<int64_t> matrix(k * k, 0);
    for (const Sample& s : dataset.samples) {
        Tensor x = s.features;
        for (size_t j = 1; j <= layer; ++j) {
            x = apply_layer(net, j, x);
        }
        const std::vector<double> d = distances(x, means[layer - 1]);
        const size_t predicted = argmin(d);
        matrix[(static_cast<size_t>(s.label) - 1) * k + predicted] += 1;
    }
    return matrix;
}

} // namespace eenet
