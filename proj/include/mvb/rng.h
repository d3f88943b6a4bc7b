#pragma once
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mvb {

// Deterministic RNG used everywhere: mt19937_64 (sequence fixed by the
// standard) with hand-rolled distributions so results do not depend on the
// standard library's unspecified distribution algorithms.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double uniform() { return (eng_() >> 11) * (1.0 / 9007199254740992.0); }

    // standard normal, Box-Muller with cached spare
    double normal();
    double normal(double mean, double std) { return mean + std * normal(); }

    // unbiased integer in [0, n)
    uint64_t below(uint64_t n);

    // first k of a partial Fisher-Yates over [0, n), returned sorted ascending
    std::vector<size_t> choose(size_t n, size_t k);

    // full in-place shuffle permutation of [0, n)
    std::vector<size_t> permutation(size_t n);

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// splitmix64-style mixer for deriving named sub-seeds from one master seed
uint64_t mix_seed(uint64_t seed, uint64_t tag);

// Shortest round-trip decimal formatting for doubles (deterministic output
// files); integers print without a trailing ".0".
std::string fmt_double(double v);

}  // namespace mvb
