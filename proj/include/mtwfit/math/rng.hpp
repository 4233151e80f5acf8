#ifndef MTWFIT_MATH_RNG_HPP
#define MTWFIT_MATH_RNG_HPP

#include <array>
#include <cstdint>

namespace mtwfit::math {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair selects an
/// independent substream; outputs depend only on (seed, stream, position),
/// which makes partitioned sampling reproducible for any worker count.
class PhiloxStream {
  public:
    static constexpr const char* kName = "philox4x32-10";

    PhiloxStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double next_double();
    /// Uniform on (0, 1].
    double next_double_open();
    /// Standard normal (Box-Muller; the pair partner is cached).
    double next_normal();
    /// Gamma variate, shape > 0 (Marsaglia-Tsang with the shape<1 boost).
    double next_gamma(double shape, double scale);
    /// Poisson variate, mean >= 0 (inversion below mean 12, PTRS above).
    long next_poisson(double mean);

  private:
    std::array<std::uint32_t, 4> block();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffer_pos_ = 4; // consumed
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Raw Philox4x32-10 round function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 mix; used to derive auxiliary stream identifiers.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace mtwfit::math

#endif
