#pragma once

#include <cstdint>

#include "classthresh/quantile.hpp"

namespace classthresh {

// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
// independent stream; draws are a pure function of (seed, stream, counter),
// so replicates can be computed in any order on any number of threads.
class PhiloxRng {
 public:
  PhiloxRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

// GCC's maybe-uninitialized analysis misfires on the buffered read when the
// generator is inlined into peeled loops; every path through refill() fills
// buf_ first.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform strictly inside (0, 1), 53-bit resolution.
  double next_u01() {
    const std::uint64_t v = next_u64() >> 11;
    return (static_cast<double>(v) + 0.5) * 0x1.0p-53;
  }

  double next_normal() { return normal_quantile(next_u01()); }

  // Uniform index in {0, ..., n-1}.
  std::size_t next_index(std::size_t n) {
    auto i = static_cast<std::size_t>(next_u01() * static_cast<double>(n));
    return (i >= n) ? n - 1 : i;
  }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p =
        static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b);
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  void refill() {
    std::uint32_t c0 = static_cast<std::uint32_t>(block_);
    std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, hi0, lo0);
      mulhilo(0xCD9E8D57u, c2, hi1, lo1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buf_[0] = c0;
    buf_[1] = c1;
    buf_[2] = c2;
    buf_[3] = c3;
    ++block_;
    pos_ = 0;
  }

  std::uint32_t key_[2] = {};
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::uint32_t buf_[4] = {};
  int pos_ = 4;
};

}  // namespace classthresh
