#pragma once

#include <cstdint>
#include <random>

namespace gpattr {

/// What a random stream is used for; part of the stream key.
enum class StreamPurpose : std::uint32_t {
  FirmArrivals = 1,
  ThinningBand = 2,
  Replicates = 3,
};

/// Independent generator keyed by (seed, path, type, purpose, sub). Streams
/// with different keys never share draws, so consuming one stream cannot
/// shift another.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t path, std::uint64_t type, StreamPurpose purpose,
                                   std::uint64_t sub = 0) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(path), hi(path), lo(type), hi(type),
                    static_cast<std::uint32_t>(purpose), lo(sub), hi(sub)};
  return std::mt19937_64(seq);
}

}  // namespace gpattr
