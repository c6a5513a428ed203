#include "eenet/rng.hpp"

#include <cmath>

namespace eenet {

namespace {
constexpr uint64_t kPhi = 0x9E3779B97F4A7C15ULL;

inline uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
} // namespace

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t splitmix64_next(uint64_t& state) {
    state += kPhi;
    return mix64(state);
}

uint64_t derive_seed(uint64_t master, SeedDomain tag, uint64_t index) {
    uint64_t x = mix64(master + kPhi * (static_cast<uint64_t>(tag) + 1));
    return mix64(x + kPhi * (index + 1));
}

Xoshiro256ss::Xoshiro256ss(uint64_t seed) {
    // Seed the full state from splitmix64, per the generator's reference usage.
    uint64_t sm = seed;
    for (auto& word : s_) {
        word = splitmix64_next(sm);
    }
}

uint64_t Xoshiro256ss::next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256ss::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Xoshiro256ss::uniform(double low, double high) {
    return low + uniform() * (high - low);
}

uint64_t Xoshiro256ss::next_below(uint64_t bound) {
    // Rejection sampling over the largest multiple of bound.
    const uint64_t threshold = bound == 0 ? 0 : (0 - bound) % bound;
    for (;;) {
        const uint64_t r = next();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

double Xoshiro256ss::normal() {
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace eenet
