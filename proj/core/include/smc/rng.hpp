#pragma once

#include <cstdint>
#include <random>

namespace smc {

// splitmix64: cheap, well mixed, used to derive independent sub-streams from
// (seed, counter) pairs so ensemble results do not depend on thread layout
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// deterministic per-stream engine: stream k of a given master seed is the same
// no matter which worker draws it
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(stream + 1));
  return std::mt19937_64(s);
}

}  // namespace smc
