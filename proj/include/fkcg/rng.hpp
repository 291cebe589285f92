#pragma once

#include <cstdint>

// Deterministic splittable RNG. A Stream is a splitmix64 sequence; derive()
// gives an independent substream from an integer id. The derivation rule is
// fixed and documented so that replica-parallel runs are reproducible:
//   child_seed = mix(parent_state ^ (GOLDEN * (id + 1)))
// where mix is the splitmix64 finalizer and GOLDEN = 0x9E3779B97F4A7C15.

namespace fkcg {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    Stream derive(std::uint64_t id) const { return Stream(mix64(state_ ^ (kGolden * (id + 1)))); }

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }
    /// Uniform in [0, 1) with 53 bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return next_double() < p; }
    /// Uniform in {0, ..., n-1}.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

}  // namespace fkcg
