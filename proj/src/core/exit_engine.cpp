#include "eenet/exit_engine.hpp"

#include <cmath>
#include <string>

#include "eenet/errors.hpp"
#include "eenet/mathutil.hpp"

namespace eenet {

size_t decision_point_count(const Network& net, const ICBundle& ics, PolicyKind kind) {
    return kind == PolicyKind::ClassMeans ? net.layer_count() : ics.size();
}

size_t candidate_length(const Network& net, const ICBundle& ics, PolicyKind kind) {
    switch (kind) {
    case PolicyKind::ClassMeans:
        return net.layer_count();
    case PolicyKind::InternalOnly:
        return ics.size();
    case PolicyKind::Combined:
        return 2 * ics.size();
    }
    throw Error(ErrorCode::Internal, "unknown policy kind");
}

int64_t class_means_check_flops(size_t dim, size_t num_classes) {
    // K distances at 3*dim each, K normalizing divisions, softmax at 4 per class.
    return static_cast<int64_t>(num_classes) * (3 * static_cast<int64_t>(dim)) +
           static_cast<int64_t>(num_classes) + 4 * static_cast<int64_t>(num_classes);
}

int64_t ic_check_flops(size_t width, size_t pooled, size_t num_classes) {
    // pool + biased linear head + softmax.
    return static_cast<int64_t>(width) +
           2 * static_cast<int64_t>(pooled) * static_cast<int64_t>(num_classes) +
           static_cast<int64_t>(num_classes) + 4 * static_cast<int64_t>(num_classes);
}

namespace {

void require_means(const ClassMeansModel* means, const Network& net) {
    if (means == nullptr) {
        throw InputError("policy requires a class-means model");
    }
    if (means->layer_count != net.layer_count() || means->class_count != net.num_classes) {
        throw DimensionError("class-means model shape (" + std::to_string(means->layer_count) +
                             " layers, " + std::to_string(means->class_count) +
                             " classes) does not match network");
    }
}

void require_ics(const ICBundle* ics) {
    if (ics == nullptr || ics->empty()) {
        throw InputError("policy requires a non-empty internal-classifier bundle");
    }
}

std::vector<double> class_means_probs(const ClassMeansModel& means, size_t layer, const Tensor& x,
                                      DistanceTransform transform) {
    const std::vector<double> raw = distances(x, means.means[layer - 1]);
    const std::vector<double> nd = normalize_distances(raw, means.normalizers[layer - 1]);
    return class_probabilities(nd, transform);
}

void check_threshold_range(double value, DecisionRule rule, size_t num_classes) {
    if (rule == DecisionRule::Entropy) {
        const double bound = std::log(static_cast<double>(num_classes));
        if (!(value >= 0.0 && value <= bound)) {
            throw InputError("entropy threshold " + std::to_string(value) +
                             " out of range [0, ln K]");
        }
    } else if (!(value >= 0.0 && value <= 1.0)) {
        throw InputError("threshold " + std::to_string(value) + " out of range [0, 1]");
    }
}

} // namespace

DecisionProfile profile_sample(const Network& net, const ClassMeansModel* means,
                               const ICBundle* ics, PolicyKind kind, DecisionRule rule,
                               const EngineOptions& options, const Tensor& input) {
    if (kind != PolicyKind::InternalOnly) {
        rule = DecisionRule::MaxProb;
        require_means(means, net);
    }
    if (kind != PolicyKind::ClassMeans) {
        require_ics(ics);
    }

    DecisionProfile profile;
    profile.kind = kind;
    profile.rule = rule;
    profile.num_classes = net.num_classes;
    profile.total_backbone_flops = net.total_flops();

    Tensor x = input;
    size_t ic_idx = 0;
    for (size_t j = 1; j <= net.layer_count(); ++j) {
        x = apply_layer(net, j, x);
        if (kind == PolicyKind::ClassMeans) {
            const std::vector<double> probs =
                class_means_probs(*means, j, x, options.transform);
            DecisionProfile::Point point;
            point.layer = j;
            point.confidence = probs[argmax(probs)];
            point.prediction = static_cast<int>(argmax(probs)) + 1;
            point.backbone_flops = net.prefix_flops(j);
            point.gate_overhead = class_means_check_flops(x.numel(), net.num_classes);
            profile.points.push_back(point);
        } else if (ic_idx < ics->size() &&
                   ics->classifiers[ic_idx].attach_after_layer == j) {
            const InternalClassifier& ic = ics->classifiers[ic_idx];
            const std::vector<double> probs = ic_predict(ic, x);
            DecisionProfile::Point point;
            point.layer = j;
            point.confidence =
                rule == DecisionRule::Entropy ? entropy(probs) : probs[argmax(probs)];
            point.prediction = static_cast<int>(argmax(probs)) + 1;
            point.backbone_flops = net.prefix_flops(j);
            point.gate_overhead = ic_check_flops(x.numel(), ic.linear.in_dim, net.num_classes);
            if (kind == PolicyKind::Combined) {
                const std::vector<double> cm =
                    class_means_probs(*means, j, x, options.transform);
                point.consult_confidence = cm[argmax(cm)];
                point.consult_overhead = class_means_check_flops(x.numel(), net.num_classes);
            }
            profile.points.push_back(point);
            ++ic_idx;
        }
    }
    profile.final_prediction = static_cast<int>(argmax(x.data)) + 1;
    return profile;
}

InferenceResult replay_profile(const DecisionProfile& profile,
                               const std::vector<double>& thresholds,
                               const std::vector<double>& consult_thresholds,
                               const EngineOptions& options) {
    if (thresholds.size() != profile.points.size()) {
        throw InputError("threshold vector length " + std::to_string(thresholds.size()) +
                         " does not match decision point count " +
                         std::to_string(profile.points.size()));
    }
    if (profile.kind == PolicyKind::Combined &&
        consult_thresholds.size() != profile.points.size()) {
        throw InputError("consultation threshold length " +
                         std::to_string(consult_thresholds.size()) +
                         " does not match decision point count " +
                         std::to_string(profile.points.size()));
    }
    for (double t : thresholds) {
        check_threshold_range(t, profile.rule, profile.num_classes);
    }
    for (double t : consult_thresholds) {
        check_threshold_range(t, DecisionRule::MaxProb, profile.num_classes);
    }

    InferenceResult result;
    int64_t overhead = 0;
    for (size_t i = 0; i < profile.points.size(); ++i) {
        const DecisionProfile::Point& point = profile.points[i];
        if (options.count_decision_overhead) {
            overhead += point.gate_overhead;
        }
        DecisionRecord rec;
        rec.layer = point.layer;
        rec.confidence = point.confidence;
        rec.threshold = thresholds[i];
        bool exited = profile.rule == DecisionRule::Entropy
                          ? point.confidence < thresholds[i]
                          : point.confidence > thresholds[i];
        if (!exited && profile.kind == PolicyKind::Combined) {
            rec.consulted = true;
            rec.consult_confidence = point.consult_confidence;
            rec.consult_threshold = consult_thresholds[i];
            if (options.count_decision_overhead) {
                overhead += point.consult_overhead;
            }
            // Class means withholding approval forces an exit with the
            // internal classifier's prediction.
            exited = point.consult_confidence > consult_thresholds[i];
        }
        rec.exited = exited;
        result.trace.push_back(rec);
        if (exited) {
            result.prediction = point.prediction;
            result.exit_layer = static_cast<int>(point.layer);
            result.flops_used = point.backbone_flops + overhead;
            return result;
        }
    }
    result.prediction = profile.final_prediction;
    result.exit_layer = kExitFinal;
    result.flops_used = profile.total_backbone_flops + overhead;
    return result;
}

InferenceResult infer_class_means(const Network& net, const ClassMeansModel& means,
                                  const std::vector<double>& thresholds, const Tensor& input,
                                  const EngineOptions& options) {
    const DecisionProfile profile = profile_sample(net, &means, nullptr, PolicyKind::ClassMeans,
                                                   DecisionRule::MaxProb, options, input);
    return replay_profile(profile, thresholds, {}, options);
}

InferenceResult infer_internal(const Network& net, const ICBundle& ics, DecisionRule rule,
                               const std::vector<double>& thresholds, const Tensor& input,
                               const EngineOptions& options) {
    const DecisionProfile profile =
        profile_sample(net, nullptr, &ics, PolicyKind::InternalOnly, rule, options, input);
    return replay_profile(profile, thresholds, {}, options);
}

InferenceResult infer_combined(const Network& net, const ICBundle& ics,
                               const ClassMeansModel& means,
                               const std::vector<double>& ic_thresholds,
                               const std::vector<double>& cm_thresholds, const Tensor& input,
                               const EngineOptions& options) {
    const DecisionProfile profile = profile_sample(net, &means, &ics, PolicyKind::Combined,
                                                   DecisionRule::MaxProb, options, input);
    return replay_profile(profile, ic_thresholds, cm_thresholds, options);
}

InferenceResult infer(const Network& net, const ClassMeansModel* means, const ICBundle* ics,
                      const ExitPolicy& policy, const Tensor& input) {
    const DecisionProfile profile =
        profile_sample(net, means, ics, policy.kind, policy.rule, policy.options, input);
    return replay_profile(profile, policy.thresholds, policy.consult_thresholds, policy.options);
}

EvalSummary evaluate(const Network& net, const ClassMeansModel* means, const ICBundle* ics,
                     const ExitPolicy& policy, const Dataset& dataset) {
    dataset.validate();
    const size_t points =
        decision_point_count(net, ics != nullptr ? *ics : ICBundle{}, policy.kind);

    EvalSummary summary;
    summary.exit_histogram.assign(points + 1, 0);
    int64_t flops_sum = 0;
    for (const Sample& s : dataset.samples) {
        const DecisionProfile profile =
            profile_sample(net, means, ics, policy.kind, policy.rule, policy.options, s.features);
        const InferenceResult result =
            replay_profile(profile, policy.thresholds, policy.consult_thresholds, policy.options);
        flops_sum += result.flops_used;
        if (result.prediction == s.label) {
            ++summary.correct;
        }
        if (result.exit_layer == kExitFinal) {
            ++summary.exit_histogram[points];
        } else {
            ++summary.exit_histogram[result.trace.size() - 1];
        }
        ++summary.total;
    }
    summary.accuracy = static_cast<double>(summary.correct) / static_cast<double>(summary.total);
    summary.mean_flops = static_cast<double>(flops_sum) / static_cast<double>(summary.total);
    return summary;
}

} // namespace eenet
