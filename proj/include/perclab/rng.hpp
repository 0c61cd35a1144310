#pragma once

#include <cstdint>

namespace perclab {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return mix64(seed ^ mix64(value + 0x632be59bd9b4e019ULL));
}

// Counter-based keyed generator: a stateless map (key, counter) -> uniform in
// [0, 1). The key identifies one configuration (base seed, config index), the
// counter identifies the edge. Equal inputs give equal deviates on every
// platform, so no configuration is ever stored. One output is a SplitMix64
// step applied to counter ^ key.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t base_seed, std::uint64_t config_index)
        : key_(hash_combine(mix64(base_seed ^ 0x5851f42d4c957f2dULL), config_index)) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const { return mix64(counter ^ key_); }

    constexpr double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

}  // namespace perclab
