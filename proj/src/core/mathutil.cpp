#include "eenet/mathutil.hpp"

#include <algorithm>
#include <cmath>

#include "eenet/errors.hpp"

namespace eenet {

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) {
        throw InputError("softmax of empty vector");
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        // Clamp keeps every entry strictly positive (exp would underflow to
        // zero past roughly -745).
        out[i] = std::exp(std::max(logits[i] - peak, -700.0));
        sum += out[i];
    }
    for (double& v : out) {
        v /= sum;
    }
    return out;
}

double entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    return h;
}

size_t argmax(std::span<const double> values) {
    size_t best = 0;
    for (size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

size_t argmin(std::span<const double> values) {
    size_t best = 0;
    for (size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) {
            best = i;
        }
    }
    return best;
}

} // namespace eenet
