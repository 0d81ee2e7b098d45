#ifndef MEP_RNG_HPP
#define MEP_RNG_HPP

// Counter-based uniform generator (Philox4x64-10). A draw is a pure function
// of (seed, stream, index), so replicates can be evaluated in any order or
// in parallel and still reproduce the same numbers.

#include <array>
#include <cstdint>

namespace mep {

namespace detail {

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace detail

using Philox4x64Block = std::array<std::uint64_t, 4>;

/// Ten-round Philox 4x64 bijection of `counter` under `key`.
inline Philox4x64Block philox4x64(Philox4x64Block counter, std::array<std::uint64_t, 2> key) {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    detail::mulhilo64(kMul0, counter[0], hi0, lo0);
    detail::mulhilo64(kMul1, counter[2], hi1, lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
  }
  return counter;
}

/// Identifies one independent stream of draws.
///
/// `replicate` and `tag` are both part of the counter, so distinct
/// (seed, replicate, tag) triples never share a draw.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::uint64_t tag = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Raw 64-bit word number `index` of the stream.
inline std::uint64_t stream_bits(const StreamKey& key, std::uint64_t index) {
  return philox4x64({index, key.replicate, key.tag, 0}, {key.seed, 0})[0];
}

/// Maps 64 random bits to the open interval (0,1): the midpoints of a 2^-52
/// grid, so both 2^-53 and 1 - 2^-53 are exact and 0, 1 are never produced.
inline double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform draw number `index` of the stream, strictly inside (0,1).
inline double stream_uniform(const StreamKey& key, std::uint64_t index) {
  return bits_to_open_unit(stream_bits(key, index));
}

}  // namespace mep

#endif  // MEP_RNG_HPP
