#pragma once

#include <cstdint>

namespace contres {

// Counter-based random stream: every draw is a pure function of
// (key, counter), so a station's randomness depends only on its own
// stream key and how many draws it has made, never on what other
// stations or the adversary did in between.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_uniform() < p; }

    // Uniform integer in [0, n). n must be >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t draws() const { return counter_; }

    // SplitMix64 finalizer; the workhorse bit mixer for all derivation.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// Deterministic seed derivation tree:
//   master seed -> per-trial seed -> per-station / adversary stream keys.
inline std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return RngStream::mix(master_seed ^ RngStream::mix(trial_index + 0x51ed270b));
}

inline RngStream station_stream(std::uint64_t trial_seed, std::int64_t internal_id) {
    return RngStream(RngStream::mix(trial_seed ^ RngStream::mix(
        static_cast<std::uint64_t>(internal_id) + 0xa5a5a5a5ull)));
}

inline RngStream adversary_stream(std::uint64_t trial_seed) {
    return RngStream(RngStream::mix(trial_seed ^ 0xadu));
}

} // namespace contres
