// Deterministic seeded random streams. Every consumer derives its own
// engine from (run seed, stream id, substream index), so dwell-level noise
// can be generated in any order, or in parallel, with identical results.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mmsounder {

// Stream ids used by the simulator.
inline constexpr std::uint64_t kStreamDwellNoise = 1;
inline constexpr std::uint64_t kStreamGpsRx = 2;
inline constexpr std::uint64_t kStreamGpsTx = 3;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t substream) {
    return detail::splitmix64(seed ^ detail::splitmix64(stream ^ detail::splitmix64(substream)));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t substream) {
    return std::mt19937_64(derive_seed(seed, stream, substream));
}

// Standard-normal sampler with an explicit Box-Muller transform; unlike
// std::normal_distribution its output sequence is not implementation
// defined, which the byte-identical capture contract relies on.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::mt19937_64 engine) : engine_(std::move(engine)) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // 53-bit uniforms; u1 shifted into (0, 1] so log() stays finite.
        const double u1 =
            1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mmsounder
