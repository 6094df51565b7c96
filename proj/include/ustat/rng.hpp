#ifndef USTAT_RNG_HPP
#define USTAT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ustat {

/// mt19937_64 with explicit variate constructions. The standard
/// distributions are implementation-defined, so uniform and normal draws
/// are built directly from raw 64-bit words: identical seeds give
/// identical paths on any conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0,1): 53-bit mantissa, offset half an ulp so 0 is excluded.
    double uniform01() {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal01() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Index in [0, size) from the probability vector cdf trick; `cdf` must
    /// be nondecreasing with cdf[size-1] == 1 (enforced by callers).
    template <typename Vec>
    int categorical(const Vec& cdf) {
        const double u = uniform01();
        const int size = static_cast<int>(cdf.size());
        for (int i = 0; i < size - 1; ++i) {
            if (u <= cdf[i]) return i;
        }
        return size - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ustat

#endif
