#pragma once

#include <array>
#include <cstdint>

namespace helium {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Deterministic random stream addressed by (seed, stream id). Streams with
/// different ids never overlap, so per-sample streams can be drawn in any
/// order on any number of threads.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4; // words of buffer_ already consumed
};

} // namespace helium
