// Reproducible seed derivation.
//
// Every random stream in the toolkit is keyed by (root seed, purpose tag,
// item index): the tag is folded in with FNV-1a, then the triple is mixed
// with two rounds of splitmix64. Item seeds therefore do not depend on
// thread scheduling or on how many other items were drawn.

#pragma once

#include <cstdint>
#include <string_view>

namespace qcorr {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose,
                                    std::uint64_t index = 0) {
  return splitmix64(splitmix64(root ^ fnv1a(purpose)) + index);
}

}  // namespace qcorr
