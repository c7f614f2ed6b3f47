#include "insider/rng.hpp"

namespace insider {
namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMulA, ctr[0], hi0, lo0);
        mulhilo(kMulB, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return ctr;
}

// Counter layout: word 0 = block index, word 1 = (substream << 16) | lane,
// words 2-3 = stream id. The key is the seed.
UniformStream::UniformStream(RngSpec spec, Substream sub, std::uint32_t lane) noexcept
    : key_{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32)},
      counter_{0u, (static_cast<std::uint32_t>(sub) << 16) | (lane & 0xFFFFu),
               static_cast<std::uint32_t>(spec.stream_id),
               static_cast<std::uint32_t>(spec.stream_id >> 32)} {}

void UniformStream::refill() noexcept {
    counter_[0] = block_index_++;
    const PhiloxBlock out = philox4x32_10(counter_, key_);
    cache_[0] = to_open_unit(out[0], out[1]);
    cache_[1] = to_open_unit(out[2], out[3]);
    cached_ = 2;
}

double UniformStream::next() noexcept {
    if (cached_ == 0) refill();
    return cache_[2 - cached_--];
}

}  // namespace insider
