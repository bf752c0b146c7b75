#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace dmtk {

// Counter-based generator: output k of stream s is a pure function of
// (seed, s, k), so draws can be partitioned across threads in any order and
// still reproduce bit-for-bit.  One splitmix64 finalizer derives the stream
// key, a second one whitens the counter.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed + 0x9E3779B97F4A7C15ULL * stream)), counter_(0) {}

    std::uint64_t operator()() { return mix(key_ + 0xD1B54A32D192ED03ULL * ++counter_); }

    // Uniform on (0, 1]: never 0, so log(u) is always finite.
    double uniform_pos() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform_pos()); }

    // CN(0,1): unit-mean |h|^2, circularly symmetric (polar Box-Muller).
    std::complex<double> complex_gaussian() {
        double radius = std::sqrt(exponential());
        double phase = 6.283185307179586476925287 * uniform();
        return {radius * std::cos(phase), radius * std::sin(phase)};
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace dmtk
