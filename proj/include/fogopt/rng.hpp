#pragma once
#include <cstdint>

namespace fogopt {

/*
 * Counter-based generator built on the SplitMix64 finalizer.
 *
 * A stream is identified by (seed, stream_id). Draw i of a stream is
 *
 *     key    = mix64(seed ^ mix64(stream_id + 0x9E3779B97F4A7C15))
 *     out(i) = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
 *
 * where mix64 is the SplitMix64 output function. Only 64-bit integer
 * arithmetic is involved, so sequences are identical on every platform.
 * Uniform doubles use the top 53 bits.
 */
class CounterRng
{
public:
    static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

    CounterRng(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix64(seed ^ mix64(stream_id + golden)))
    {}

    static constexpr std::uint64_t mix64(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64()
    {
        ++counter_;
        return mix64(key_ + counter_ * golden);
    }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1].
    double uniform_open0() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Uniform on [lo, hi]; returns lo exactly when lo == hi.
    double uniform(double lo, double hi)
    {
        const double u = uniform01();
        return lo == hi ? lo : lo + (hi - lo) * u;
    }

    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace fogopt
