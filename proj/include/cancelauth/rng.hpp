// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace cancelauth::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + b + (a << 6) + (a >> 2)));
}

// Derive an independent stream seed from a root seed and stream labels.
template <typename... Ts>
std::uint64_t derive(std::uint64_t root, Ts... labels) {
  std::uint64_t s = splitmix64(root);
  ((s = combine(s, static_cast<std::uint64_t>(labels))), ...);
  return s;
}

inline std::mt19937_64 engine(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

}  // namespace cancelauth::rng
