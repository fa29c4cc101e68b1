#pragma once

#include <cstdint>
#include <string>

namespace tacsim {

// Counter-based uniform generator built on the splitmix64 mixing function.
// Output depends only on (base_seed, rollout_index, draw_counter), so two
// streams with the same identity produce identical sequences on every
// platform regardless of call-site interleaving elsewhere.
struct RngStream {
    static constexpr const char* kAlgorithmId = "splitmix64-ctr-v1";
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    std::uint64_t base_seed = 0;
    std::uint64_t rollout_index = 0;
    std::uint64_t draw_counter = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t stream_key() const {
        return mix(base_seed + kGolden * (rollout_index + 1));
    }

    std::uint64_t next_u64() {
        ++draw_counter;
        return mix(stream_key() + kGolden * draw_counter);
    }

    // Uniform in [0, 1): 53 mantissa bits of the next output.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }
};

}  // namespace tacsim
