#pragma once

#include <cstdint>

namespace mblotto {

// Counter-based generator: every draw is a pure function of (seed, stream, index),
// so results never depend on scheduling or thread count.
class CounterRng {
public:
    static constexpr const char* algorithm = "splitmix64-counter/1";

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))), stream_(stream) {}

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t index) const noexcept {
        return mix(key_ + mix(index));
    }

    // Uniform on [0, 1).
    double uniform(std::uint64_t index) const noexcept {
        return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(std::uint64_t index, double lo, double hi) const noexcept {
        return lo + (hi - lo) * uniform(index);
    }

    std::uint64_t stream() const noexcept { return stream_; }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
};

// Sequential cursor over one substream.
class RngCursor {
public:
    explicit RngCursor(CounterRng rng, std::uint64_t start = 0) noexcept : rng_(rng), next_(start) {}
    double uniform() noexcept { return rng_.uniform(next_++); }
    std::uint64_t bits() noexcept { return rng_.bits(next_++); }
    std::uint64_t position() const noexcept { return next_; }

private:
    CounterRng rng_;
    std::uint64_t next_;
};

} // namespace mblotto
