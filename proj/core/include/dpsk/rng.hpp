#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dpsk {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the labeled sub-stream `label`, block `index`, under `root`.
/// Distinct labels never share draws, so switching one imperfection on or
/// off leaves every other stream untouched.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                    std::uint64_t index = 0) {
  return splitmix64(splitmix64(root ^ fnv1a64(label)) + splitmix64(index + 1));
}

inline Engine make_engine(std::uint64_t root, std::string_view label,
                          std::uint64_t index = 0) {
  return Engine(derive_seed(root, label, index));
}

}  // namespace dpsk
