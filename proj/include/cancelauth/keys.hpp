// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

// The user-held random second factor. Keys carry no biometric data: key
// generation never sees a signal.

namespace cancelauth::keys {

/// Bioconvolving key: split positions r_1..r_k, each in [1, l/k - 1].
struct BioKey {
  std::vector<int> splits;
  int piece_count = 0;    // k, divides segment_length
  int segment_length = 0; // l
};

/// MACE key: unit-norm convolution taps.
struct MaceKey {
  std::vector<double> taps;
};

using AnyKey = std::variant<BioKey, MaceKey>;

BioKey gen_bio_key(int segment_length, int piece_count, std::uint64_t seed);
MaceKey gen_mace_key(int tap_count, std::uint64_t seed);

// One-line text format: BIO:<l>:<k>:<r1,...,rk> or MACE:<k>:<t1,...,tk>.
std::string serialize_key(const AnyKey& key);
AnyKey parse_key(const std::string& line);

void save_key(const std::string& path, const AnyKey& key);
AnyKey load_key(const std::string& path);

// FNV-1a over the serialized form; stored instead of the key itself.
std::uint64_t key_fingerprint(const AnyKey& key);

}  // namespace cancelauth::keys
