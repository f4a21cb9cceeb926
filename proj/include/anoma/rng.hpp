#ifndef ANOMA_RNG_HPP
#define ANOMA_RNG_HPP

#include <cstdint>
#include <random>

namespace anoma {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the `index`-th independent substream of `master`. Counter based,
/// so substream i does not depend on how many others were drawn.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t purpose = 0) {
  return splitmix64(splitmix64(master ^ (purpose * 0xd1b54a32d192ed03ULL)) + index);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index = 0, std::uint64_t purpose = 0) {
  return Rng(substream_seed(master, index, purpose));
}

/// Uniform on [0,1) with 53 random bits; independent of the standard
/// library's distribution implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform on (0,1].
inline double uniform_open0(Rng& rng) { return 1.0 - uniform01(rng); }

}  // namespace anoma

#endif  // ANOMA_RNG_HPP
