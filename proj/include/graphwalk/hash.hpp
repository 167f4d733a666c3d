#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace graphwalk {

// FNV-1a, 64 bit.  Used for feature hashing, prompt identity and seed
// derivation.  Stable across platforms by construction.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t basis = 0xcbf29ce484222325ULL) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Hex digest of fnv1a64, 16 lowercase characters.
std::string fnv1a64_hex(std::string_view data);

// Mixes a run seed with a stable per-episode label so that worker
// scheduling cannot influence any random draw.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return fnv1a64(label) ^ (seed * 0x9e3779b97f4a7c15ULL);
}

inline std::string fnv1a64_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace graphwalk
