#include "eenet/threshold_search.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "eenet/errors.hpp"
#include "eenet/format.hpp"
#include "eenet/rng.hpp"

namespace eenet {

std::vector<std::vector<double>> sample_threshold_vectors(size_t count, size_t length,
                                                          double low, double high,
                                                          uint64_t seed) {
    if (count == 0 || length == 0) {
        throw InputError("threshold sample count and length must be positive");
    }
    if (!(low < high)) {
        throw InputError("threshold range requires low < high");
    }
    std::vector<std::vector<double>> vectors(count);
    for (size_t i = 0; i < count; ++i) {
        Xoshiro256ss rng(derive_seed(seed, SeedDomain::ThresholdSample, i));
        vectors[i].resize(length);
        for (double& v : vectors[i]) {
            v = rng.uniform(low, high);
        }
    }
    return vectors;
}

std::vector<TradeoffPoint> evaluate_candidates(const Network& net, const ClassMeansModel* means,
                                               const ICBundle* ics, PolicyKind kind,
                                               DecisionRule rule, const EngineOptions& options,
                                               const std::vector<std::vector<double>>& candidates,
                                               const Dataset& dataset, size_t threads) {
    if (candidates.empty()) {
        throw InputError("no candidate threshold vectors given");
    }
    dataset.validate();
    const size_t expected =
        candidate_length(net, ics != nullptr ? *ics : ICBundle{}, kind);
    for (const auto& candidate : candidates) {
        if (candidate.size() != expected) {
            throw InputError("candidate length " + std::to_string(candidate.size()) +
                             " does not match policy (expected " + std::to_string(expected) + ")");
        }
    }
    const size_t gate_len = kind == PolicyKind::Combined ? expected / 2 : expected;

    // The layer outputs do not depend on thresholds, so profile every sample
    // once and replay the profiles per candidate.
    std::vector<DecisionProfile> profiles;
    profiles.reserve(dataset.size());
    for (const Sample& s : dataset.samples) {
        profiles.push_back(profile_sample(net, means, ics, kind, rule, options, s.features));
    }

    std::vector<TradeoffPoint> points(candidates.size());
    auto run_range = [&](size_t begin, size_t end) {
        std::vector<double> gate, consult;
        for (size_t c = begin; c < end; ++c) {
            gate.assign(candidates[c].begin(), candidates[c].begin() + gate_len);
            consult.assign(candidates[c].begin() + gate_len, candidates[c].end());
            int64_t correct = 0;
            int64_t flops_sum = 0;
            for (size_t i = 0; i < profiles.size(); ++i) {
                const InferenceResult r = replay_profile(profiles[i], gate, consult, options);
                flops_sum += r.flops_used;
                if (r.prediction == dataset.samples[i].label) {
                    ++correct;
                }
            }
            points[c].mean_flops =
                static_cast<double>(flops_sum) / static_cast<double>(profiles.size());
            points[c].accuracy =
                static_cast<double>(correct) / static_cast<double>(profiles.size());
            points[c].threshold_id = static_cast<int64_t>(c);
        }
    };

    const size_t workers = std::min(threads == 0 ? size_t{1} : threads, candidates.size());
    if (workers <= 1) {
        run_range(0, candidates.size());
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (candidates.size() + workers - 1) / workers;
        for (size_t w = 0; w < workers; ++w) {
            const size_t begin = w * chunk;
            const size_t end = std::min(begin + chunk, candidates.size());
            if (begin < end) {
                pool.emplace_back(run_range, begin, end);
            }
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return points;
}

namespace {

double cross(const TradeoffPoint& origin, const TradeoffPoint& a, const TradeoffPoint& b) {
    return (a.mean_flops - origin.mean_flops) * (b.accuracy - origin.accuracy) -
           (a.accuracy - origin.accuracy) * (b.mean_flops - origin.mean_flops);
}

} // namespace

Frontier upper_frontier(const std::vector<TradeoffPoint>& points) {
    if (points.empty()) {
        throw InputError("frontier of an empty point set");
    }
    for (const TradeoffPoint& p : points) {
        if (!std::isfinite(p.mean_flops) || !std::isfinite(p.accuracy)) {
            throw InputError("trade-off points must be finite");
        }
    }

    // Per FLOPs value keep only the best accuracy (lowest id on full ties).
    std::vector<TradeoffPoint> sorted(points);
    std::sort(sorted.begin(), sorted.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
        if (a.mean_flops != b.mean_flops) {
            return a.mean_flops < b.mean_flops;
        }
        if (a.accuracy != b.accuracy) {
            return a.accuracy > b.accuracy;
        }
        return a.threshold_id < b.threshold_id;
    });
    std::vector<TradeoffPoint> unique;
    for (const TradeoffPoint& p : sorted) {
        if (unique.empty() || unique.back().mean_flops != p.mean_flops) {
            unique.push_back(p);
        }
    }

    // Monotone-chain upper hull; popping on cross >= 0 drops collinear
    // interior points.
    std::vector<TradeoffPoint> hull;
    for (const TradeoffPoint& p : unique) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) {
            hull.pop_back();
        }
        hull.push_back(p);
    }

    // Trim to the ascending segment: from the minimum-FLOPs vertex through
    // the leftmost maximum-accuracy vertex.
    size_t peak = 0;
    for (size_t i = 1; i < hull.size(); ++i) {
        if (hull[i].accuracy > hull[peak].accuracy) {
            peak = i;
        }
    }
    Frontier frontier;
    frontier.points.assign(hull.begin(), hull.begin() + peak + 1);
    return frontier;
}

TimeSharePoint time_sharing_accuracy(const Frontier& frontier, double flops_budget) {
    if (frontier.points.empty()) {
        throw InputError("time sharing over an empty frontier");
    }
    const double lo = frontier.points.front().mean_flops;
    const double hi = frontier.points.back().mean_flops;
    if (!(flops_budget >= lo && flops_budget <= hi)) {
        throw RangeError("budget " + format_double(flops_budget) + " outside frontier range [" +
                         format_double(lo) + ", " + format_double(hi) + "]");
    }

    TimeSharePoint result;
    for (size_t i = 0; i < frontier.points.size(); ++i) {
        if (frontier.points[i].mean_flops == flops_budget) {
            result.accuracy = frontier.points[i].accuracy;
            result.id_low = result.id_high = frontier.points[i].threshold_id;
            result.weight = 1.0;
            return result;
        }
    }
    size_t upper = 1;
    while (frontier.points[upper].mean_flops < flops_budget) {
        ++upper;
    }
    const TradeoffPoint& a = frontier.points[upper - 1];
    const TradeoffPoint& b = frontier.points[upper];
    const double w = (b.mean_flops - flops_budget) / (b.mean_flops - a.mean_flops);
    result.accuracy = w * a.accuracy + (1.0 - w) * b.accuracy;
    result.id_low = a.threshold_id;
    result.id_high = b.threshold_id;
    result.weight = w;
    return result;
}

} // namespace eenet
