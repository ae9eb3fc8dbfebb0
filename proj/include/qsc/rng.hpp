#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qsc {

/// Seeded 64-bit Mersenne Twister. Every stochastic operation takes one of
/// these by reference so results are reproducible per seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    bool coin() { return (engine_() >> 63) != 0; }
    std::uint64_t bits() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent substream seed from a root seed and a label, e.g.
/// derive_seed(7, "dsss.trial", 3). Adding new labels never perturbs the
/// streams of existing ones.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0);

}  // namespace qsc
