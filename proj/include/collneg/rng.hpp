#pragma once

#include <cstdint>
#include <random>

namespace collneg {

inline constexpr std::uint64_t kDefaultSeed = 0xC011EC7;

// SplitMix64 finaliser; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seedable, splittable generator. The underlying engine is mt19937_64, whose
// output sequence is fixed by the standard; the double conversion below is
// ours, so streams are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Deterministic substream keyed by (seed, index).
    static Rng substream(std::uint64_t seed, std::uint64_t index) noexcept;

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound), bound > 0 (Lemire multiply-shift).
    std::uint64_t below(std::uint64_t bound);

    // Child generator; advances this one.
    Rng split() { return Rng(mix64(next_u64())); }

private:
    std::mt19937_64 engine_;
};

}  // namespace collneg
