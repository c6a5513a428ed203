#ifndef EENET_MATHUTIL_HPP
#define EENET_MATHUTIL_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace eenet {

// Numerically stable softmax (max-subtraction). Entries are positive and
// sum to 1 for any finite input.
std::vector<double> softmax(std::span<const double> logits);

// Shannon entropy in nats, with 0*ln(0) = 0. Bounded by ln(K).
double entropy(std::span<const double> probs);

// Index of the largest entry; first index wins ties.
size_t argmax(std::span<const double> values);

// Index of the smallest entry; first index wins ties.
size_t argmin(std::span<const double> values);

} // namespace eenet

#endif
