#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "eenet/class_means.hpp"
#include "eenet/errors.hpp"
#include "eenet/mathutil.hpp"
#include "eenet/rng.hpp"
#include "eenet/train.hpp"

using namespace eenet;

namespace {

Network identity_net(size_t dim, size_t num_classes) {
    Network net;
    net.num_classes = num_classes;
    Tensor eye = Tensor::zeros(dim, dim);
    for (size_t i = 0; i < dim; ++i) {
        eye.at(i, i) = 1.0;
    }
    net.layers.push_back(make_dense(dim, dim, false, std::move(eye), Tensor{}));
    finalize_network(net);
    return net;
}

Network small_random_net(uint64_t seed) {
    Network net;
    net.num_classes = 3;
    Xoshiro256ss rng(seed);
    auto rand_dense = [&rng](size_t in, size_t out) {
        Tensor w = Tensor::zeros(out, in);
        for (double& v : w.data) {
            v = rng.uniform(-1, 1);
        }
        Tensor b = Tensor::zeros(out);
        for (double& v : b.data) {
            v = rng.uniform(-0.3, 0.3);
        }
        return make_dense(in, out, true, std::move(w), std::move(b));
    };
    net.layers.push_back(rand_dense(4, 8));
    net.layers.push_back(make_relu(8));
    net.layers.push_back(rand_dense(8, 6));
    net.layers.push_back(make_avgpool(6, 2));
    net.layers.push_back(rand_dense(3, 3));
    finalize_network(net);
    return net;
}

Dataset random_dataset(size_t n_per_class, size_t num_classes, size_t dim, uint64_t seed) {
    Dataset ds;
    ds.num_classes = num_classes;
    ds.feature_dim = dim;
    Xoshiro256ss rng(seed);
    for (size_t c = 0; c < num_classes; ++c) {
        for (size_t i = 0; i < n_per_class; ++i) {
            std::vector<double> v(dim);
            for (double& x : v) {
                x = rng.uniform(-3, 3);
            }
            ds.samples.push_back({Tensor::vector(std::move(v)), static_cast<int>(c) + 1});
        }
    }
    return ds;
}

// Brute-force oracle: collect every layer output per class, then divide.
std::vector<std::vector<std::vector<double>>> oracle_means(const Network& net, const Dataset& ds) {
    const size_t m = net.layer_count();
    const size_t k = net.num_classes;
    std::vector<std::vector<std::vector<std::vector<double>>>> buckets(
        m, std::vector<std::vector<std::vector<double>>>(k));
    for (const Sample& s : ds.samples) {
        const auto outs = forward_collect(net, s.features);
        for (size_t j = 0; j < m; ++j) {
            buckets[j][s.label - 1].push_back(outs[j].data);
        }
    }
    std::vector<std::vector<std::vector<double>>> result(m, std::vector<std::vector<double>>(k));
    for (size_t j = 0; j < m; ++j) {
        for (size_t c = 0; c < k; ++c) {
            const auto& rows = buckets[j][c];
            std::vector<double> mean(rows.front().size(), 0.0);
            for (const auto& row : rows) {
                for (size_t t = 0; t < row.size(); ++t) {
                    mean[t] += row[t];
                }
            }
            for (double& v : mean) {
                v /= static_cast<double>(rows.size());
            }
            result[j][c] = std::move(mean);
        }
    }
    return result;
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(acc);
}

} // namespace

TEST_CASE("means of an identity network average the inputs") {
    const Network net = identity_net(2, 2);
    Dataset ds;
    ds.num_classes = 2;
    ds.feature_dim = 2;
    ds.samples.push_back({Tensor::vector({1, 3}), 1});
    ds.samples.push_back({Tensor::vector({3, 5}), 1});
    ds.samples.push_back({Tensor::vector({0, 0}), 2});
    const auto means = compute_class_means(net, ds);
    CHECK(means[0][0].data == std::vector<double>{2, 4});
    CHECK(means[0][1].data == std::vector<double>{0, 0});
}

TEST_CASE("constant-per-class dataset gives means equal to the forward pass") {
    const Network net = small_random_net(5);
    Dataset ds;
    ds.num_classes = 3;
    ds.feature_dim = 4;
    const std::vector<std::vector<double>> class_vectors = {
        {1, 2, 3, 4}, {-1, 0.5, 2, -2}, {0, 0, 1, 0}};
    for (size_t c = 0; c < 3; ++c) {
        for (int rep = 0; rep < 4; ++rep) {
            ds.samples.push_back({Tensor::vector(class_vectors[c]), static_cast<int>(c) + 1});
        }
    }
    const auto means = compute_class_means(net, ds);
    for (size_t c = 0; c < 3; ++c) {
        const auto outs = forward_collect(net, Tensor::vector(class_vectors[c]));
        for (size_t j = 0; j < net.layer_count(); ++j) {
            for (size_t t = 0; t < outs[j].data.size(); ++t) {
                CHECK(std::fabs(means[j][c].data[t] - outs[j].data[t]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("means match the brute-force two-pass oracle") {
    const Network net = small_random_net(11);
    const Dataset ds = random_dataset(15, 3, 4, 77);
    const auto means = compute_class_means(net, ds);
    const auto expected = oracle_means(net, ds);
    for (size_t j = 0; j < net.layer_count(); ++j) {
        for (size_t c = 0; c < 3; ++c) {
            for (size_t t = 0; t < expected[j][c].size(); ++t) {
                const double rel = std::fabs(means[j][c].data[t] - expected[j][c][t]) /
                                   std::max(std::fabs(expected[j][c][t]), 1e-9);
                CHECK(rel <= 1e-9);
            }
        }
    }
}

TEST_CASE("a class without samples is an input error naming the class") {
    const Network net = identity_net(3, 3);
    Dataset ds;
    ds.num_classes = 3;
    ds.feature_dim = 3;
    ds.samples.push_back({Tensor::vector({1, 1, 0}), 1});
    ds.samples.push_back({Tensor::vector({2, 2, 0}), 3});
    CHECK_THROWS_WITH_AS(compute_class_means(net, ds), doctest::Contains("class 2"), InputError);
}

TEST_CASE("normalizer is the average distance over all samples") {
    const Network net = identity_net(2, 2);
    Dataset ds;
    ds.num_classes = 2;
    ds.feature_dim = 2;
    ds.samples.push_back({Tensor::vector({1, 0}), 1});
    ds.samples.push_back({Tensor::vector({3, 0}), 2});
    // Synthetic means: distances from the two samples to [0,0] are 1 and 3.
    std::vector<std::vector<Tensor>> means(1);
    means[0].push_back(Tensor::vector({0, 0}));
    means[0].push_back(Tensor::vector({1, 0}));
    const auto norms = compute_normalizers(net, ds, means);
    CHECK(norms[0][0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(norms[0][1] == doctest::Approx(1.0).epsilon(1e-12)); // (0 + 2) / 2
}

TEST_CASE("normalizers match a direct-summation oracle and the eq-4 self-consistency") {
    const Network net = small_random_net(13);
    const Dataset ds = random_dataset(12, 3, 4, 99);
    const auto means = compute_class_means(net, ds);
    const auto norms = compute_normalizers(net, ds, means);

    for (size_t j = 0; j < net.layer_count(); ++j) {
        for (size_t c = 0; c < 3; ++c) {
            double sum = 0.0;
            for (const Sample& s : ds.samples) {
                const auto outs = forward_collect(net, s.features);
                sum += euclid(outs[j].data, means[j][c].data);
            }
            const double expected = sum / static_cast<double>(ds.size());
            CHECK(std::fabs(norms[j][c] - expected) / std::max(expected, 1e-9) <= 1e-9);

            // Eq-4 self-consistency: normalized distances average to 1.
            double normalized_sum = 0.0;
            for (const Sample& s : ds.samples) {
                const auto outs = forward_collect(net, s.features);
                normalized_sum += euclid(outs[j].data, means[j][c].data) / norms[j][c];
            }
            CHECK(std::fabs(normalized_sum / static_cast<double>(ds.size()) - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("degenerate normalizers are floored with a warning") {
    const Network net = identity_net(2, 2);
    Dataset ds;
    ds.num_classes = 2;
    ds.feature_dim = 2;
    // Every sample identical: distance to its own mean is exactly 0.
    ds.samples.push_back({Tensor::vector({1, 1}), 1});
    ds.samples.push_back({Tensor::vector({1, 1}), 2});
    const auto means = compute_class_means(net, ds);
    std::vector<std::string> warnings;
    const auto norms = compute_normalizers(net, ds, means, &warnings);
    CHECK(norms[0][0] == kNormalizerFloor);
    CHECK(norms[0][1] == kNormalizerFloor);
    CHECK(warnings.size() == 2);
}

TEST_CASE("duplicating every sample leaves means and normalizers unchanged") {
    const Network net = small_random_net(21);
    const Dataset ds = random_dataset(10, 3, 4, 5);
    Dataset doubled = ds;
    for (const Sample& s : ds.samples) {
        doubled.samples.push_back(s);
    }
    const auto means_a = compute_class_means(net, ds);
    const auto means_b = compute_class_means(net, doubled);
    const auto norms_a = compute_normalizers(net, ds, means_a);
    const auto norms_b = compute_normalizers(net, doubled, means_b);
    for (size_t j = 0; j < net.layer_count(); ++j) {
        for (size_t c = 0; c < 3; ++c) {
            for (size_t t = 0; t < means_a[j][c].data.size(); ++t) {
                CHECK(std::fabs(means_a[j][c].data[t] - means_b[j][c].data[t]) <= 1e-12);
            }
            CHECK(std::fabs(norms_a[j][c] - norms_b[j][c]) /
                      std::max(norms_a[j][c], 1e-12) <= 1e-12);
        }
    }
}

TEST_CASE("distance basics") {
    const std::vector<Tensor> means = {Tensor::vector({3, 4}), Tensor::vector({0, 0})};
    const auto d = distances(Tensor::vector({0, 0}), means);
    CHECK(d[0] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(d[1] == 0.0);
    CHECK_THROWS_AS(distances(Tensor::vector({1, 2, 3}), means), DimensionError);
}

TEST_CASE("distances match the elementwise oracle") {
    Xoshiro256ss rng(2025);
    for (int trial = 0; trial < 50; ++trial) {
        const size_t dim = 1 + rng.next_below(10);
        std::vector<double> x(dim), c(dim);
        for (size_t t = 0; t < dim; ++t) {
            x[t] = rng.uniform(-5, 5);
            c[t] = rng.uniform(-5, 5);
        }
        const auto d = distances(Tensor::vector(x), {Tensor::vector(c)});
        CHECK(std::fabs(d[0] - euclid(x, c)) <= 1e-12);
    }
}

TEST_CASE("normalize_distances divides elementwise") {
    const auto out = normalize_distances({1, 2}, {1, 2});
    CHECK(out == std::vector<double>{1, 1});
    const auto same = normalize_distances({0.3, 0.7, 1.1}, {1, 1, 1});
    CHECK(same == std::vector<double>{0.3, 0.7, 1.1});

    // Homogeneity: scaling raw distances scales outputs.
    const std::vector<double> raw = {0.5, 1.5, 2.5};
    const std::vector<double> norm = {2.0, 0.5, 1.0};
    const auto base = normalize_distances(raw, norm);
    std::vector<double> scaled_raw = raw;
    for (double& v : scaled_raw) {
        v *= 3.0;
    }
    const auto scaled = normalize_distances(scaled_raw, norm);
    for (size_t i = 0; i < base.size(); ++i) {
        CHECK(std::fabs(scaled[i] - 3.0 * base[i]) <= 1e-12);
    }
}

TEST_CASE("class probabilities follow the reciprocal transform") {
    const auto uniform = class_probabilities({1.7, 1.7, 1.7});
    for (double p : uniform) {
        CHECK(std::fabs(p - 1.0 / 3) <= 1e-12);
    }

    // d = [0.5, 2.0] -> logits [2, 0.5] -> softmax.
    const auto probs = class_probabilities({0.5, 2.0});
    CHECK(std::fabs(probs[0] - 0.81757) <= 1e-5);
    CHECK(std::fabs(probs[1] - 0.18243) <= 1e-5);
}

TEST_CASE("probability order is the reverse of distance order") {
    Xoshiro256ss rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> d(2 + rng.next_below(6));
        for (double& v : d) {
            v = rng.uniform(0.01, 5.0);
        }
        const auto probs = class_probabilities(d);
        CHECK(argmax(probs) == argmin(d));
        // Full ordering: sort by probability descending == distance ascending.
        for (size_t a = 0; a < d.size(); ++a) {
            for (size_t b = 0; b < d.size(); ++b) {
                if (d[a] < d[b]) {
                    CHECK(probs[a] > probs[b]);
                }
            }
        }
    }
}

TEST_CASE("negated transform inverts the ordering") {
    const auto probs = class_probabilities({0.5, 2.0}, DistanceTransform::Negated);
    CHECK(probs[1] > probs[0]); // printed softmax(-1/d): far class wins
}

TEST_CASE("zero distance is captured by the epsilon floor") {
    const auto probs = class_probabilities({0.0, 1.0});
    CHECK(probs[0] > 0.999999);
    CHECK(probs[0] + probs[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("confusion matrix counts nearest means") {
    const Network net = identity_net(2, 2);
    Dataset ds;
    ds.num_classes = 2;
    ds.feature_dim = 2;
    ds.samples.push_back({Tensor::vector({0, 0}), 1});
    ds.samples.push_back({Tensor::vector({0.4, 0}), 1});
    ds.samples.push_back({Tensor::vector({10, 0}), 2});
    ds.samples.push_back({Tensor::vector({9, 0}), 2});
    ds.samples.push_back({Tensor::vector({8, 0}), 1}); // mislabeled on purpose
    const auto means = compute_class_means(net, ds);
    const auto matrix = nearest_mean_confusion(net, ds, means, 1);

    // Rows sum to class counts.
    CHECK(matrix[0] + matrix[1] == 3);
    CHECK(matrix[2] + matrix[3] == 2);
    // The planted outlier is closer to the class-2 mean.
    CHECK(matrix[1] >= 1);

    Dataset single;
    single.num_classes = 2;
    single.feature_dim = 2;
    single.samples.push_back({Tensor::vector({0, 0}), 1});
    const auto one = nearest_mean_confusion(net, single, means, 1);
    int64_t nonzero = 0, total = 0;
    for (int64_t v : one) {
        nonzero += v != 0 ? 1 : 0;
        total += v;
    }
    CHECK(nonzero == 1);
    CHECK(total == 1);
}

TEST_CASE("confusion total is N at every layer") {
    const Network net = small_random_net(31);
    const Dataset ds = random_dataset(7, 3, 4, 3);
    const auto means = compute_class_means(net, ds);
    for (size_t j = 1; j <= net.layer_count(); ++j) {
        const auto matrix = nearest_mean_confusion(net, ds, means, j);
        int64_t total = 0;
        for (int64_t v : matrix) {
            total += v;
        }
        CHECK(total == static_cast<int64_t>(ds.size()));
    }
    CHECK_THROWS_AS(nearest_mean_confusion(net, ds, means, 0), InputError);
    CHECK_THROWS_AS(nearest_mean_confusion(net, ds, means, net.layer_count() + 1), InputError);
}

TEST_CASE("trained separable data is near-diagonal at the final layer") {
    const Dataset ds = generate_clusters(3, 8, 40, 9.0, 1.0, 314);
    Network net = make_mlp(8, 3, 3, 16, 4);
    TrainConfig config;
    config.epochs = 15;
    config.seed = 10;
    sgd_train(net, ds, config);
    const auto means = compute_class_means(net, ds);
    const auto matrix = nearest_mean_confusion(net, ds, means, net.layer_count());
    int64_t diagonal = 0, total = 0;
    for (size_t r = 0; r < 3; ++r) {
        for (size_t c = 0; c < 3; ++c) {
            total += matrix[r * 3 + c];
            if (r == c) {
                diagonal += matrix[r * 3 + c];
            }
        }
    }
    CHECK(static_cast<double>(diagonal) / static_cast<double>(total) >= 0.95);
}
