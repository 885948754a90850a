#pragma once

#include <array>
#include <cstdint>

namespace dpp {

// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

// An independent random stream identified by (seed, stream id). Draw k of the
// stream is a pure function of (seed, stream, k), so results do not depend on
// how work is scheduled.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();
    double uniform();          // in (0, 1), 53-bit resolution
    double normal();           // inverse-CDF standard normal
    double chi_square(double k);  // inverse-CDF chi-square with k > 0 degrees of freedom
    double chi(double k);

    std::uint64_t draws() const { return counter_; }

private:
    std::array<std::uint32_t, 2> key_{};
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;  // number of 4-word blocks generated
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
};

// splitmix64 finalizer of seed + tag: decorrelates, e.g., the stream used for
// initial states from the one used for the dynamics
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace dpp
