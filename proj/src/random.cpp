#include "helium/random.hpp"

namespace helium {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_lo_(static_cast<std::uint32_t>(stream)),
      stream_hi_(static_cast<std::uint32_t>(stream >> 32))
{
}

std::uint64_t CounterStream::next_u64() noexcept
{
    if (used_ >= 4) {
        buffer_ = philox4x32({static_cast<std::uint32_t>(block_),
                              static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_},
                             key_);
        ++block_;
        used_ = 0;
    }
    const std::uint64_t lo = buffer_[used_];
    const std::uint64_t hi = buffer_[used_ + 1];
    used_ += 2;
    return (hi << 32) | lo;
}

double CounterStream::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

} // namespace helium
