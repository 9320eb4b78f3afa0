#pragma once

#include <cstdint>

namespace gasketlab {

/// SplitMix64: deterministic across platforms, unlike the standard library
/// distributions. Every sampled experiment threads one of these through.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }

    /// Independent stream for item i of a sweep; keeps parallel sweeps
    /// order-insensitive.
    static Rng stream(uint64_t seed, uint64_t item) {
        Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (item + 1)));
        r.next();
        return r;
    }

  private:
    uint64_t state_;
};

}  // namespace gasketlab
