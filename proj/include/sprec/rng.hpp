#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sprec {

// Every random draw in the library goes through an owned Stream. Streams are
// never shared between threads.
using Stream = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-style key derivation: the resulting seed depends only on the
// master seed and the ordered coordinates, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c));
  return h;
}

inline Stream make_stream(std::uint64_t master,
                          std::initializer_list<std::uint64_t> coords) {
  return Stream(derive_seed(master, coords));
}

}  // namespace sprec
