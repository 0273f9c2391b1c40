#pragma once

#include <cstdint>
#include <random>

namespace decotrans {

/// splitmix64 step; used to derive statistically independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for the substream handling sample `index` of the ensemble with the
/// given master seed. Workers may process any subset of indices; the stream
/// a sample sees depends only on (seed, index).
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = master_seed;
  (void)splitmix64(s);
  s ^= 0x517cc1b727220a95ULL * (index + 1);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

inline std::mt19937_64 make_substream(std::uint64_t master_seed, std::uint64_t index) {
  return std::mt19937_64(substream_seed(master_seed, index));
}

}  // namespace decotrans
