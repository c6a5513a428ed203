#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "eenet/errors.hpp"
#include "eenet/internal_classifiers.hpp"
#include "eenet/mathutil.hpp"
#include "eenet/rng.hpp"
#include "eenet/train.hpp"

using namespace eenet;

namespace {

const std::vector<double> kPaperFractions = {0.15, 0.30, 0.45, 0.60, 0.75, 0.90};

} // namespace

TEST_CASE("default pool factor halves down to 64") {
    CHECK(default_pool_factor(32) == 1);
    CHECK(default_pool_factor(64) == 1);
    CHECK(default_pool_factor(128) == 2);
    CHECK(default_pool_factor(256) == 4);
    CHECK(default_pool_factor(96) == 2);  // 96/2 = 48 <= 64
    CHECK(default_pool_factor(65) == 1);  // odd: no power-of-two divisor
}

TEST_CASE("paper fractions place six strictly increasing ics on the default mlp") {
    const Network net = make_mlp(16, 4, 8, 32, 7);
    const auto indices = place_ics(net, kPaperFractions);
    REQUIRE(indices.size() == 6);
    for (size_t i = 1; i < indices.size(); ++i) {
        CHECK(indices[i] > indices[i - 1]);
    }
    CHECK(indices.back() < net.layer_count()); // never after the final layer here
}

TEST_CASE("tiny fraction selects the first layer") {
    const Network net = make_mlp(16, 4, 8, 32, 7);
    const auto indices = place_ics(net, {0.0001});
    REQUIRE(indices.size() == 1);
    CHECK(indices[0] == 1);
}

TEST_CASE("placement brackets the cumulative-flops fraction") {
    const Network net = make_mlp(10, 3, 5, 24, 3);
    const double total = static_cast<double>(net.total_flops());
    for (double f : {0.1, 0.25, 0.5, 0.66, 0.8, 0.95}) {
        const auto indices = place_ics(net, {f});
        REQUIRE(indices.size() == 1);
        const size_t j = indices[0];
        CHECK(static_cast<double>(net.prefix_flops(j)) / total >= f);
        CHECK(static_cast<double>(net.prefix_flops(j - 1)) / total < f);
    }
}

TEST_CASE("duplicate attach points collapse") {
    // One huge first layer: every fraction lands on layer 1.
    Network net;
    net.num_classes = 2;
    net.layers.push_back(make_dense(64, 64, true, Tensor::zeros(64, 64), Tensor::zeros(64)));
    net.layers.push_back(make_dense(64, 2, false, Tensor::zeros(2, 64), Tensor{}));
    finalize_network(net);
    const auto indices = place_ics(net, {0.1, 0.2, 0.3});
    CHECK(indices == std::vector<size_t>{1});
}

TEST_CASE("single-layer networks cannot host ics") {
    Network net;
    net.num_classes = 2;
    net.layers.push_back(make_dense(4, 2, false, Tensor::zeros(2, 4), Tensor{}));
    finalize_network(net);
    CHECK_THROWS_AS(place_ics(net, {0.5}), InputError);
}

TEST_CASE("fractions must be strictly increasing inside (0,1)") {
    const Network net = make_mlp(8, 2, 4, 16, 1);
    CHECK_THROWS_AS(place_ics(net, {0.5, 0.5}), InputError);
    CHECK_THROWS_AS(place_ics(net, {0.9, 0.1}), InputError);
    CHECK_THROWS_AS(place_ics(net, {0.0}), InputError);
    CHECK_THROWS_AS(place_ics(net, {1.0}), InputError);
}

TEST_CASE("ic_predict with zero parameters is uniform") {
    const Network net = make_mlp(16, 4, 8, 32, 7);
    const ICBundle bundle = make_ic_bundle(net, kPaperFractions);
    const InternalClassifier& ic = bundle.classifiers[0];
    const Tensor x = Tensor::zeros(net.layer_output_dim(ic.attach_after_layer));
    const auto probs = ic_predict(ic, x);
    for (double p : probs) {
        CHECK(std::fabs(p - 0.25) <= 1e-15);
    }
}

TEST_CASE("pool factor one is a pure linear head") {
    InternalClassifier ic;
    ic.attach_after_layer = 1;
    ic.pool_factor = 1;
    ic.linear = make_dense(3, 2, true, Tensor({2, 3}, {1, 0, 0, 0, 1, 0}), Tensor({2}, {0, 0}));
    const auto probs = ic_predict(ic, Tensor::vector({2.0, -1.0, 0.5}));
    const auto expected = softmax(std::vector<double>{2.0, -1.0});
    CHECK(std::fabs(probs[0] - expected[0]) <= 1e-15);
    CHECK(std::fabs(probs[1] - expected[1]) <= 1e-15);
}

TEST_CASE("ic_predict matches a hand-rolled pool->matmul->softmax oracle") {
    Xoshiro256ss rng(55);
    InternalClassifier ic;
    ic.attach_after_layer = 1;
    ic.pool_factor = 2;
    Tensor w = Tensor::zeros(3, 4);
    for (double& v : w.data) {
        v = rng.uniform(-1, 1);
    }
    Tensor b = Tensor::zeros(3);
    for (double& v : b.data) {
        v = rng.uniform(-1, 1);
    }
    ic.linear = make_dense(4, 3, true, w, b);

    std::vector<double> x(8);
    for (double& v : x) {
        v = rng.uniform(-2, 2);
    }
    const auto probs = ic_predict(ic, Tensor::vector(x));

    std::vector<double> pooled(4);
    for (size_t i = 0; i < 4; ++i) {
        pooled[i] = (x[2 * i] + x[2 * i + 1]) / 2.0;
    }
    std::vector<double> logits(3);
    for (size_t r = 0; r < 3; ++r) {
        logits[r] = b.data[r];
        for (size_t c = 0; c < 4; ++c) {
            logits[r] += w.data[r * 4 + c] * pooled[c];
        }
    }
    const auto expected = softmax(logits);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(std::fabs(probs[i] - expected[i]) <= 1e-12);
    }
}

TEST_CASE("ic_predict rejects mismatched shapes") {
    const Network net = make_mlp(16, 4, 8, 32, 7);
    const ICBundle bundle = make_ic_bundle(net, kPaperFractions);
    CHECK_THROWS_AS(ic_predict(bundle.classifiers[0], Tensor::zeros(5)), DimensionError);
}

TEST_CASE("exit decision rules and their boundaries") {
    CHECK(ic_exit_decision({0, 1, 0}, DecisionRule::MaxProb, 0.99));
    CHECK_FALSE(ic_exit_decision({0.6, 0.4}, DecisionRule::MaxProb, 0.6)); // strict
    // Uniform probabilities sit exactly at the entropy bound; the strict
    // comparison keeps the sample in the network. K=2 so every quantity is
    // an exact double.
    CHECK_FALSE(ic_exit_decision({0.5, 0.5}, DecisionRule::Entropy, std::log(2.0)));
    CHECK(ic_exit_decision({0.9, 0.1}, DecisionRule::Entropy, std::log(2.0)));
    const double ln3 = std::log(3.0);
    CHECK(ic_exit_decision({0.8, 0.1, 0.1}, DecisionRule::Entropy, ln3));
    CHECK_THROWS_AS(ic_exit_decision({0.5, 0.5}, DecisionRule::MaxProb, 1.5), InputError);
    CHECK_THROWS_AS(ic_exit_decision({0.5, 0.5}, DecisionRule::Entropy, 2.0), InputError);
    CHECK_THROWS_AS(ic_exit_decision({0.5, 0.5}, DecisionRule::MaxProb, -0.1), InputError);
}

TEST_CASE("max-prob decision is monotone in the threshold") {
    Xoshiro256ss rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> logits(4);
        for (double& v : logits) {
            v = rng.uniform(-3, 3);
        }
        const auto probs = softmax(logits);
        const double t_high = rng.uniform(0.0, 1.0);
        const double t_low = t_high * rng.uniform(0.0, 1.0);
        if (ic_exit_decision(probs, DecisionRule::MaxProb, t_high)) {
            CHECK(ic_exit_decision(probs, DecisionRule::MaxProb, t_low));
        }
    }
}

TEST_CASE("ic training freezes the backbone and learns separable data") {
    const Dataset ds = generate_clusters(4, 16, 60, 10.0, 1.0, 60);
    Network net = make_mlp(16, 4, 8, 32, 15);
    TrainConfig backbone_config;
    backbone_config.epochs = 20;
    backbone_config.seed = 2;
    sgd_train(net, ds, backbone_config);
    const uint64_t frozen = parameter_checksum(net);

    ICBundle bundle = make_ic_bundle(net, kPaperFractions);
    TrainConfig ic_config;
    ic_config.epochs = 20;
    ic_config.seed = 3;
    train_ics(net, bundle, ds, ic_config);
    CHECK(parameter_checksum(net) == frozen);

    // Backbone accuracy.
    size_t backbone_correct = 0;
    for (const Sample& s : ds.samples) {
        if (backbone_predict(net, s.features) == s.label) {
            ++backbone_correct;
        }
    }
    // Final (deepest) IC accuracy.
    const InternalClassifier& last = bundle.classifiers.back();
    size_t ic_correct = 0;
    for (const Sample& s : ds.samples) {
        Tensor x = s.features;
        for (size_t j = 1; j <= last.attach_after_layer; ++j) {
            x = apply_layer(net, j, x);
        }
        const auto probs = ic_predict(last, x);
        if (static_cast<int>(argmax(probs)) + 1 == s.label) {
            ++ic_correct;
        }
    }
    const double backbone_acc =
        static_cast<double>(backbone_correct) / static_cast<double>(ds.size());
    const double ic_acc = static_cast<double>(ic_correct) / static_cast<double>(ds.size());
    CHECK(ic_acc >= backbone_acc - 0.05);
}

TEST_CASE("zero learning rate leaves ic parameters at init") {
    const Dataset ds = generate_clusters(3, 8, 10, 6.0, 1.0, 1);
    Network net = make_mlp(8, 3, 4, 16, 9);
    ICBundle bundle = make_ic_bundle(net, {0.4, 0.8});
    TrainConfig config;
    config.learning_rate = 0.0;
    config.epochs = 3;
    train_ics(net, bundle, ds, config);
    for (const InternalClassifier& ic : bundle.classifiers) {
        for (double v : ic.linear.weight.data) {
            CHECK(v == 0.0);
        }
        for (double v : ic.linear.bias.data) {
            CHECK(v == 0.0);
        }
    }
}

TEST_CASE("ic training is seed-deterministic") {
    const Dataset ds = generate_clusters(3, 8, 15, 6.0, 1.0, 4);
    Network net = make_mlp(8, 3, 4, 16, 9);
    ICBundle a = make_ic_bundle(net, {0.4, 0.8});
    ICBundle b = make_ic_bundle(net, {0.4, 0.8});
    TrainConfig config;
    config.epochs = 5;
    config.seed = 31;
    const TrainLog la = train_ics(net, a, ds, config);
    const TrainLog lb = train_ics(net, b, ds, config);
    CHECK(la.epoch_mean_loss == lb.epoch_mean_loss);
    for (size_t i = 0; i < a.classifiers.size(); ++i) {
        CHECK(a.classifiers[i].linear.weight.data == b.classifiers[i].linear.weight.data);
        CHECK(a.classifiers[i].linear.bias.data == b.classifiers[i].linear.bias.data);
    }
}
