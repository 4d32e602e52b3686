#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rsi {

/// Engine used for every random draw in the project.
using Engine = std::mt19937_64;
inline constexpr std::string_view kEngineName = "mt19937_64";

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the stream with the given ordinal under a master seed.
///
/// Every parallel job (sweep cell, simulation run) gets its stream from
/// (master, ordinal) so results never depend on the schedule.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t ordinal) {
  return mix64(mix64(master) ^ mix64(ordinal + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

}  // namespace rsi
