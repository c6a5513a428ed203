#ifndef EENET_CLASS_MEANS_HPP
#define EENET_CLASS_MEANS_HPP

#include <string>
#include <vector>

#include "eenet/dataset.hpp"
#include "eenet/network.hpp"

namespace eenet {

// How a normalized distance becomes a softmax logit. Reciprocal keeps the
// nearest class most probable; Negated is the printed softmax(-1/d)
// variant, which inverts that ordering.
enum class DistanceTransform { Reciprocal, Negated };

constexpr double kDistanceEpsilon = 1e-9;   // logit = 1/max(d, eps)
constexpr double kNormalizerFloor = 1e-12;  // degenerate normalizers are floored, not zero

// Per-layer, per-class mean vectors and the training-set distance
// normalizers. Immutable once built; safe to share across threads.
struct ClassMeansModel {
    size_t layer_count = 0;
    size_t class_count = 0;
    // means[j-1][k-1]: mean of layer-j outputs over class-k training samples.
    std::vector<std::vector<Tensor>> means;
    // normalizers[j-1][k-1]: training-set average distance to that mean, > 0.
    std::vector<std::vector<double>> normalizers;
    std::vector<std::string> warnings;
};

// Mean of layer outputs per (layer, class); one forward pass per sample,
// no parameter updates. Errors if any class has no samples.
std::vector<std::vector<Tensor>> compute_class_means(const Network& net, const Dataset& train);

// normalizer[j][k] = average over ALL N training samples of the Euclidean
// distance between the layer-j output and mean (j,k). Zero averages are
// floored to kNormalizerFloor and reported through `warnings`.
std::vector<std::vector<double>> compute_normalizers(const Network& net, const Dataset& train,
                                                     const std::vector<std::vector<Tensor>>& means,
                                                     std::vector<std::string>* warnings = nullptr);

// compute_class_means + compute_normalizers.
ClassMeansModel build_class_means(const Network& net, const Dataset& train);

// Euclidean distances from one layer output to each class mean.
std::vector<double> distances(const Tensor& layer_output, const std::vector<Tensor>& means_at_layer);

std::vector<double> normalize_distances(const std::vector<double>& raw,
                                        const std::vector<double>& normalizer_at_layer);

// Softmax over transformed normalized distances. With Reciprocal the class
// with the smallest distance gets the largest probability; ties are exact.
std::vector<double> class_probabilities(const std::vector<double>& normalized,
                                        DistanceTransform transform = DistanceTransform::Reciprocal);

// K x K counts: entry (true k, predicted k') counts class-k samples whose
// nearest mean (raw Euclidean distance) at layer j is class k'. Row-major.
std::vector<int64_t> nearest_mean_confusion(const Network& net, const Dataset& dataset,
                                            const std::vector<std::vector<Tensor>>& means,
                                            size_t layer);

} // namespace eenet

#endif
