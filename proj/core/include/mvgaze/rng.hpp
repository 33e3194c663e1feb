#pragma once

#include <cstdint>
#include <initializer_list>

namespace mvgaze {

/// Deterministic counter-keyed random stream (splitmix64 core). Streams are
/// derived from a seed plus an arbitrary key tuple, so any (phase, position,
/// point, frame, sensor) cell gets its own sequence independent of the order
/// in which cells are evaluated.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ULL)) {}

    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> key) : RngStream(seed) {
        for (auto k : key) state_ = mix(state_ ^ mix(k + 0x9e3779b97f4a7c15ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace mvgaze
