#ifndef EENET_THRESHOLD_SEARCH_HPP
#define EENET_THRESHOLD_SEARCH_HPP

#include <cstdint>
#include <vector>

#include "eenet/exit_engine.hpp"

namespace eenet {

struct TradeoffPoint {
    double mean_flops = 0.0;
    double accuracy = 0.0;
    int64_t threshold_id = -1;
};

// Points sorted by strictly increasing mean_flops and strictly increasing
// accuracy; the ascending segment of the upper convex hull.
struct Frontier {
    std::vector<TradeoffPoint> points;
};

struct TimeSharePoint {
    double accuracy = 0.0;
    int64_t id_low = -1;  // frontier point at or below the budget
    int64_t id_high = -1; // frontier point at or above the budget
    double weight = 1.0;  // share of id_low; accuracy = w*a_low + (1-w)*a_high
};

// `count` vectors of `length` i.i.d. uniform entries on [low, high).
// Vector i is drawn from sub-seed (seed, i), so the list is a prefix-stable
// function of the seed regardless of scheduling.
std::vector<std::vector<double>> sample_threshold_vectors(size_t count, size_t length,
                                                          double low, double high,
                                                          uint64_t seed);

// One trade-off point per candidate threshold vector, in input order.
// Combined candidates pack the IC gate followed by the class-means gate.
// `threads` caps the worker count (0 or 1 = sequential); results do not
// depend on it.
std::vector<TradeoffPoint> evaluate_candidates(const Network& net, const ClassMeansModel* means,
                                               const ICBundle* ics, PolicyKind kind,
                                               DecisionRule rule, const EngineOptions& options,
                                               const std::vector<std::vector<double>>& candidates,
                                               const Dataset& dataset, size_t threads = 1);

// Upper convex hull of the cloud (monotone chain), trimmed to the ascending
// segment from the minimum-FLOPs vertex to the leftmost maximum-accuracy
// vertex. FLOPs ties keep the best accuracy; full ties keep the lowest id.
Frontier upper_frontier(const std::vector<TradeoffPoint>& points);

// Linear interpolation between the two frontier points bracketing the
// budget (the time-sharing mixture). Errors outside [min, max] FLOPs.
TimeSharePoint time_sharing_accuracy(const Frontier& frontier, double flops_budget);

} // namespace eenet

#endif
