#include "npglm/random.hpp"

namespace npglm {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t master, std::string_view label) {
  return SplitMix64(SplitMix64(master) ^ Fnv1a(label));
}

std::uint64_t DeriveSeed(std::uint64_t master, std::string_view label, std::uint64_t index) {
  return SplitMix64(DeriveSeed(master, label) ^ SplitMix64(index + 1));
}

}  // namespace npglm
