#pragma once

//
// Counter-based random source.
//
// Every random quantity in this project is a pure function of
// (seed, stream tag, i, j), so column i's randomness is O(1)-recomputable
// without storing any generated matrix. The generator is fixed for
// reproducibility: words are chained through the SplitMix64 finalizer
// (Steele, Lea, Flood 2014), which is the mixer used by java.util.SplittableRandom.
// Changing it would change every seeded artifact, so treat it as part of the
// on-disk/CSV contract.
//

#include <cmath>
#include <cstdint>

namespace cod::rng {

// Tags keep independent random streams from colliding on the same counters.
inline constexpr std::uint64_t kSamplingKey    = 0x01;
inline constexpr std::uint64_t kProjectionSign = 0x02;
inline constexpr std::uint64_t kHashBucket     = 0x03;
inline constexpr std::uint64_t kHashSign       = 0x04;
inline constexpr std::uint64_t kGenUx          = 0x05;
inline constexpr std::uint64_t kGenUy          = 0x06;
inline constexpr std::uint64_t kGenVx          = 0x07;
inline constexpr std::uint64_t kGenVy          = 0x08;
inline constexpr std::uint64_t kGenNoiseX      = 0x09;
inline constexpr std::uint64_t kGenNoiseY      = 0x0a;
inline constexpr std::uint64_t kPowerStart     = 0x0b;
inline constexpr std::uint64_t kTestStream     = 0x0c;
inline constexpr std::uint64_t kSeedDerive     = 0x0d;

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t i, std::uint64_t j = 0) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ i);
    h = splitmix64(h ^ j);
    return h;
}

// Uniform in (0, 1]; never returns 0 so -log(u) is always finite.
constexpr double uniform01(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t i, std::uint64_t j = 0) noexcept {
    const std::uint64_t bits = mix(seed, stream, i, j);
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one draw per counter (the sine partner is
// discarded to keep the counter arithmetic trivial).
inline double gaussian(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t i, std::uint64_t j = 0) noexcept {
    const double u1 = uniform01(seed, stream, i, 2 * j);
    const double u2 = uniform01(seed, stream, i, 2 * j + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// +1 or -1 with equal probability.
constexpr int sign(std::uint64_t seed, std::uint64_t stream,
                   std::uint64_t i, std::uint64_t j = 0) noexcept {
    return (mix(seed, stream, i, j) >> 63) ? -1 : 1;
}

// Unbiased bucket in [0, n) via Lemire's multiply-shift.
constexpr std::uint64_t bucket(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t i, std::uint64_t n) noexcept {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(mix(seed, stream, i)) * static_cast<unsigned __int128>(n);
    return static_cast<std::uint64_t>(wide >> 64);
}

// Deterministic sub-seed derivation (per benchmark cell, per data chunk, ...).
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
    return mix(seed, kSeedDerive ^ (a << 8), b, c);
}

} // namespace cod::rng
