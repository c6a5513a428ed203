#ifndef EENET_DATASET_HPP
#define EENET_DATASET_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eenet/tensor.hpp"

namespace eenet {

struct Sample {
    Tensor features; // flat vector
    int label = 0;   // 1..K
};

struct Dataset {
    std::vector<Sample> samples;
    size_t num_classes = 0;
    size_t feature_dim = 0;

    size_t size() const { return samples.size(); }
    // Throws if a sample is malformed; call after hand-building datasets.
    void validate() const;
};

// K isotropic Gaussian clusters. Center k (0-based) sits on coordinate axis
// (k mod dim) at radius separation * (1 + k div dim), so pairwise center
// distance is always >= separation. Labels are 1-based; samples are emitted
// class by class.
Dataset generate_clusters(size_t num_classes, size_t dim, size_t per_class,
                          double separation, double noise_sigma, uint64_t seed);

// Cluster center used by generate_clusters for 0-based class index k.
std::vector<double> cluster_center(size_t k, size_t dim, double separation);

// Stratified split: per class, round(test_fraction * n_k) samples go to the
// test part after a seeded per-class shuffle. The parts are disjoint and
// their union is a permutation of the input.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction, uint64_t seed);

// Text format: header "K dim N", then one "label f_1 ... f_dim" line per
// sample, doubles printed with 17 significant digits.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace eenet

#endif
