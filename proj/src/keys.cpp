// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/keys.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cancelauth/rng.hpp"

namespace cancelauth::keys {

namespace {

void check_bio_params(int l, int k) {
  if (l <= 0 || k <= 0)
    throw std::invalid_argument("bio key: l and k must be positive");
  if (l % k != 0)
    throw std::invalid_argument("bio key: piece count must divide segment length");
  // l/k == 2 is allowed as a degenerate key: the range [1, l/k-1] collapses
  // to the single value 1.
  if (l / k < 2)
    throw std::invalid_argument("bio key: l/k must be >= 2 (split range [1, l/k-1])");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

[[noreturn]] void parse_fail(const std::string& what, std::size_t field) {
  throw std::runtime_error("parse_key: " + what + " (field " +
                           std::to_string(field) + ")");
}

long long to_int(const std::string& s, std::size_t field) {
  std::size_t pos = 0;
  long long v;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    parse_fail("expected integer, got '" + s + "'", field);
  }
  if (pos != s.size()) parse_fail("trailing characters in '" + s + "'", field);
  return v;
}

double to_real(const std::string& s, std::size_t field) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    parse_fail("expected real, got '" + s + "'", field);
  }
  if (pos != s.size()) parse_fail("trailing characters in '" + s + "'", field);
  return v;
}

}  // namespace

BioKey gen_bio_key(int segment_length, int piece_count, std::uint64_t seed) {
  check_bio_params(segment_length, piece_count);
  const int hi = segment_length / piece_count - 1;
  auto eng = rng::engine(rng::derive(seed, 0xB10u));
  std::uniform_int_distribution<int> dist(1, hi);
  BioKey key;
  key.segment_length = segment_length;
  key.piece_count = piece_count;
  key.splits.reserve(static_cast<std::size_t>(piece_count));
  for (int i = 0; i < piece_count; ++i) key.splits.push_back(dist(eng));
  return key;
}

MaceKey gen_mace_key(int tap_count, std::uint64_t seed) {
  if (tap_count < 2)
    throw std::invalid_argument("mace key: need at least 2 taps");
  auto eng = rng::engine(rng::derive(seed, 0x3ACEu));
  std::normal_distribution<double> gauss(0.0, 1.0);
  MaceKey key;
  key.taps.reserve(static_cast<std::size_t>(tap_count));
  double norm2 = 0.0;
  do {
    key.taps.clear();
    norm2 = 0.0;
    for (int i = 0; i < tap_count; ++i) {
      const double t = gauss(eng);
      key.taps.push_back(t);
      norm2 += t * t;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& t : key.taps) t *= inv;
  return key;
}

std::string serialize_key(const AnyKey& key) {
  std::string out;
  char buf[64];
  if (const auto* bio = std::get_if<BioKey>(&key)) {
    out = "BIO:" + std::to_string(bio->segment_length) + ":" +
          std::to_string(bio->piece_count) + ":";
    for (std::size_t i = 0; i < bio->splits.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(bio->splits[i]);
    }
  } else {
    const auto& mace = std::get<MaceKey>(key);
    out = "MACE:" + std::to_string(mace.taps.size()) + ":";
    for (std::size_t i = 0; i < mace.taps.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", mace.taps[i]);
      out += buf;
    }
  }
  return out;
}

AnyKey parse_key(const std::string& line) {
  const auto fields = split(line, ':');
  if (fields.empty()) parse_fail("empty key text", 0);
  if (fields[0] == "BIO") {
    if (fields.size() != 4) parse_fail("BIO key needs 4 fields", fields.size());
    BioKey key;
    key.segment_length = static_cast<int>(to_int(fields[1], 1));
    key.piece_count = static_cast<int>(to_int(fields[2], 2));
    check_bio_params(key.segment_length, key.piece_count);
    const auto items = split(fields[3], ',');
    if (items.size() != static_cast<std::size_t>(key.piece_count))
      parse_fail("split count does not match piece count", 3);
    const int hi = key.segment_length / key.piece_count - 1;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto r = static_cast<int>(to_int(items[i], 3 + i));
      if (r < 1 || r > hi) parse_fail("split out of range [1, l/k-1]", 3 + i);
      key.splits.push_back(r);
    }
    return key;
  }
  if (fields[0] == "MACE") {
    if (fields.size() != 3) parse_fail("MACE key needs 3 fields", fields.size());
    const auto k = to_int(fields[1], 1);
    if (k < 2) parse_fail("MACE key needs at least 2 taps", 1);
    const auto items = split(fields[2], ',');
    if (items.size() != static_cast<std::size_t>(k))
      parse_fail("tap count does not match declared length", 2);
    MaceKey key;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const double t = to_real(items[i], 2 + i);
      key.taps.push_back(t);
      norm2 += t * t;
    }
    if (norm2 == 0.0) parse_fail("MACE taps are all zero", 2);
    return key;
  }
  parse_fail("unknown key scheme '" + fields[0] + "'", 0);
}

void save_key(const std::string& path, const AnyKey& key) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_key: cannot write " + path);
  out << serialize_key(key) << "\n";
}

AnyKey load_key(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_key: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_key: " + path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return parse_key(line);
}

std::uint64_t key_fingerprint(const AnyKey& key) {
  const std::string text = serialize_key(key);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cancelauth::keys
