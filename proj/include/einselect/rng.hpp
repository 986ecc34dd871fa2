// rng.hpp — Counter-based seed splitting and portable random draws.
//
// Every random quantity in the project flows from a single 64-bit master
// seed through the expansion rule below, so any run is reproducible from
// the seed alone (and reimplementable outside this codebase):
//
//   mix64(z):  SplitMix64 finalizer
//   Stream(s): x_i = mix64(s + (i+1)*GOLDEN)          (GOLDEN = 0x9E3779B97F4A7C15)
//   substream(master, counter) = Stream(mix64(master + (counter+1)*GOLDEN))
//   sweep point (N, j) uses counter = (N << 16) + j
//   doubles: u = (x >> 11) * 2^-53 in [0,1)
//   gaussians: Box-Muller on consecutive uniform pairs

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace einselect::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    // [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double(); // (0, 1], keeps log finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_{0.0};
    bool have_spare_{false};
};

inline Stream substream(std::uint64_t master, std::uint64_t counter) {
    return Stream(mix64(master + kGolden * (counter + 1)));
}

// Streams for sweep points are keyed by (N, seed index) so results do not
// depend on the order points are dispatched in.
inline Stream sweep_point_stream(std::uint64_t master, int n, int seed_index) {
    return substream(master, (static_cast<std::uint64_t>(n) << 16) +
                                 static_cast<std::uint64_t>(seed_index));
}

} // namespace einselect::rng
