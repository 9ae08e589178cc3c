#pragma once

#include <array>
#include <cstdint>

namespace lightts {

/// SplitMix64 (Steele, Lea, Flood 2014). Used only to expand a 64-bit seed
/// into generator state:
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
std::uint64_t splitmix64(std::uint64_t& state);

/// Named streams derived from one experiment seed. The stream seed is
/// `seed + offset * 0x9E3779B97F4A7C15` (mod 2^64), so reseeding one stream
/// leaves the others untouched.
enum class Stream : std::uint64_t { init = 1, shuffle = 2, data = 3 };

/// xoshiro256** 1.0 (Blackman, Vigna 2018), seeded by four SplitMix64 draws.
///   result = rotl(s1 * 5, 7) * 9
///   t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
/// Doubles are (next() >> 11) * 2^-53, uniform on [0, 1).
/// Bounded integers use the multiply-high map (next() * n) >> 64.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, Stream stream);

    std::uint64_t next();
    std::uint64_t operator()() { return next(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

    double uniform01();
    double uniform(double lo, double hi);
    /// Uniform on [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Seeded generator for the named stream of an experiment seed.
inline Rng seeded_rng(std::uint64_t seed, Stream stream = Stream::init) {
    return Rng(seed, stream);
}

}  // namespace lightts
