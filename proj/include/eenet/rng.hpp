#ifndef EENET_RNG_HPP
#define EENET_RNG_HPP

#include <cstdint>

namespace eenet {

// All randomness in the library flows through one documented generator
// family: splitmix64 for seeding and sub-seed derivation, xoshiro256** for
// the streams. Seeded runs are bit-identical across platforms.

uint64_t splitmix64_next(uint64_t& state);

// Stateless finalizer used by derive_seed.
uint64_t mix64(uint64_t z);

// Domain tags keep sub-streams independent even when every stage is handed
// the same master seed.
enum class SeedDomain : uint64_t {
    DataGen = 1,
    Split = 2,
    LayerInit = 3,
    TrainShuffle = 4,
    IcTrainShuffle = 5,
    ThresholdSample = 6,
};

// sub-seed = mix64(mix64(master + phi*(tag+1)) + phi*(index+1)), phi = 2^64/golden ratio.
uint64_t derive_seed(uint64_t master, SeedDomain tag, uint64_t index = 0);

class Xoshiro256ss {
public:
    explicit Xoshiro256ss(uint64_t seed);

    uint64_t next();

    // Uniform on [0, 1): 53 mantissa bits.
    double uniform();

    // Uniform on [low, high).
    double uniform(double low, double high);

    // Integer in [0, bound) without modulo bias.
    uint64_t next_below(uint64_t bound);

    // Standard normal via Box-Muller (two fresh uniforms per call).
    double normal();

private:
    uint64_t s_[4];
};

} // namespace eenet

#endif
