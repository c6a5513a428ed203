#ifndef EENET_EXIT_ENGINE_HPP
#define EENET_EXIT_ENGINE_HPP

#include <cstdint>
#include <vector>

#include "eenet/class_means.hpp"
#include "eenet/dataset.hpp"
#include "eenet/internal_classifiers.hpp"
#include "eenet/network.hpp"

namespace eenet {

constexpr int kExitFinal = -1;

enum class PolicyKind { ClassMeans, InternalOnly, Combined };

struct EngineOptions {
    DistanceTransform transform = DistanceTransform::Reciprocal;
    // When set, flops_used includes the decision costs: class-means check
    // 3*dim*K + K + 4K, IC check n + (2*pooled*K + K) + 4K.
    bool count_decision_overhead = true;
};

struct ExitPolicy {
    PolicyKind kind = PolicyKind::ClassMeans;
    DecisionRule rule = DecisionRule::MaxProb; // InternalOnly gate
    std::vector<double> thresholds;            // ClassMeans: M; IC policies: |ICs| (IC gate)
    std::vector<double> consult_thresholds;    // Combined only: class-means gate, |ICs|
    EngineOptions options;
};

struct DecisionRecord {
    size_t layer = 0;          // backbone layer of this decision point
    double confidence = 0.0;   // gate value (max prob, or entropy for the entropy rule)
    double threshold = 0.0;
    bool exited = false;
    bool consulted = false;    // combined: class means were checked here
    double consult_confidence = 0.0;
    double consult_threshold = 0.0;
};

struct InferenceResult {
    int prediction = 0;        // 1..K
    int exit_layer = kExitFinal; // 1..M, or kExitFinal
    int64_t flops_used = 0;
    std::vector<DecisionRecord> trace;
};

struct EvalSummary {
    double accuracy = 0.0;
    double mean_flops = 0.0;
    int64_t correct = 0;
    int64_t total = 0;
    // One slot per decision point plus a final slot; sums to `total`.
    std::vector<int64_t> exit_histogram;
};

// Threshold-independent per-sample quantities: everything inference needs
// except the thresholds themselves. Replaying a profile against a
// threshold vector is exactly equivalent to running the engine and is what
// makes large candidate sweeps affordable.
struct DecisionProfile {
    struct Point {
        size_t layer = 0;
        double confidence = 0.0;        // primary gate value
        int prediction = 0;             // label if exiting here
        double consult_confidence = 0.0; // combined: class-means max prob
        int64_t backbone_flops = 0;     // prefix through `layer`
        int64_t gate_overhead = 0;      // IC or class-means check cost
        int64_t consult_overhead = 0;   // combined: class-means check cost
    };
    PolicyKind kind = PolicyKind::ClassMeans;
    DecisionRule rule = DecisionRule::MaxProb;
    size_t num_classes = 0;
    std::vector<Point> points;
    int final_prediction = 0;
    int64_t total_backbone_flops = 0;
};

// Decision-point count for a policy kind: M for class means, |ICs| otherwise.
size_t decision_point_count(const Network& net, const ICBundle& ics, PolicyKind kind);

// Expected thresholds length for a candidate vector of this policy kind
// (Combined packs the IC gate then the class-means gate, so 2*|ICs|).
size_t candidate_length(const Network& net, const ICBundle& ics, PolicyKind kind);

int64_t class_means_check_flops(size_t dim, size_t num_classes);
int64_t ic_check_flops(size_t width, size_t pooled, size_t num_classes);

DecisionProfile profile_sample(const Network& net, const ClassMeansModel* means,
                               const ICBundle* ics, PolicyKind kind, DecisionRule rule,
                               const EngineOptions& options, const Tensor& input);

// Scans a profile with concrete thresholds; produces the same result the
// layer-by-layer engine would.
InferenceResult replay_profile(const DecisionProfile& profile,
                               const std::vector<double>& thresholds,
                               const std::vector<double>& consult_thresholds,
                               const EngineOptions& options);

// Algorithm-1 inference: class-means gate after every layer.
InferenceResult infer_class_means(const Network& net, const ClassMeansModel& means,
                                  const std::vector<double>& thresholds, const Tensor& input,
                                  const EngineOptions& options = {});

// IC gate (max-prob or entropy) at each attach point.
InferenceResult infer_internal(const Network& net, const ICBundle& ics, DecisionRule rule,
                               const std::vector<double>& thresholds, const Tensor& input,
                               const EngineOptions& options = {});

// IC gate first; when it declines, class means are consulted and may force
// an exit with the IC's prediction.
InferenceResult infer_combined(const Network& net, const ICBundle& ics,
                               const ClassMeansModel& means,
                               const std::vector<double>& ic_thresholds,
                               const std::vector<double>& cm_thresholds, const Tensor& input,
                               const EngineOptions& options = {});

InferenceResult infer(const Network& net, const ClassMeansModel* means, const ICBundle* ics,
                      const ExitPolicy& policy, const Tensor& input);

EvalSummary evaluate(const Network& net, const ClassMeansModel* means, const ICBundle* ics,
                     const ExitPolicy& policy, const Dataset& dataset);

} // namespace eenet

#endif
