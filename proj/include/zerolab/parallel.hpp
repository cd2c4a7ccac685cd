#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace zerolab {

/// One step of the splitmix64 generator.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed of the substream for work item `index` at level `p`:
/// splitmix64 chained over (master, p, index). Every sample owns its stream,
/// so results do not depend on how items are scheduled.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t p, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ p) ^ index);
}

inline std::mt19937_64 substream(std::uint64_t master, std::uint64_t p, std::uint64_t index) {
  return std::mt19937_64(substream_seed(master, p, index));
}

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 picks the
/// hardware concurrency). Items are claimed dynamically; callers write into
/// per-index slots and reduce in index order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace zerolab
