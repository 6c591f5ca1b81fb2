#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace etas {

/// Seeded 64-bit Mersenne Twister with explicit bit-to-real conversions, so that a
/// given seed yields the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    [[nodiscard]] double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exp(1) draw.
    [[nodiscard]] double exponential() { return -std::log(uniform_open()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace etas
