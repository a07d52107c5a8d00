#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace synergy {

/// xoshiro256** (Blackman & Vigna) seeded through SplitMix64. Output is identical on every
/// platform, and so are the helpers below, which avoid the implementation-defined std distributions.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform integer in [0, bound) by rejection sampling; bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double unit();

private:
    std::array<std::uint64_t, 4> s_{};
};

/// `count` distinct items drawn uniformly without replacement (partial Fisher-Yates),
/// in draw order. Draws everything when count exceeds the population.
template <class T>
std::vector<T> sample_without_replacement(std::vector<T> population, std::size_t count, Xoshiro256& rng) {
    if (count > population.size()) count = population.size();
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(population.size() - i));
        std::swap(population[i], population[j]);
    }
    population.resize(count);
    return population;
}

}  // namespace synergy
