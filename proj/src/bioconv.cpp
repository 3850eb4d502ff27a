// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/bioconv.hpp"

#include <stdexcept>

#include "cancelauth/kernels.hpp"

namespace cancelauth::bioconv {

std::vector<double> ensemble_average(
    const std::vector<preprocess::BeatSegment>& beats) {
  if (beats.empty())
    throw std::invalid_argument("ensemble_average: empty beat list");
  const std::size_t l = beats.front().samples.size();
  std::vector<double> avg(l, 0.0);
  for (const auto& b : beats) {
    if (b.samples.size() != l)
      throw std::invalid_argument("ensemble_average: mixed beat lengths");
    kernels::accumulate(avg.data(), b.samples.data(), l);
  }
  kernels::scale(avg.data(), l, 1.0 / static_cast<double>(beats.size()));
  return avg;
}

BioTemplate build_bio_template(const std::vector<double>& avg,
                               const keys::BioKey& key) {
  const int l = key.segment_length;
  const int k = key.piece_count;
  if (static_cast<int>(avg.size()) != l)
    throw std::invalid_argument("build_bio_template: key/segment length mismatch");
  if (k <= 0 || l % k != 0 ||
      key.splits.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("build_bio_template: malformed key");

  const int piece = l / k;
  BioTemplate tpl;
  tpl.piece_count = k;
  tpl.segment_length = l;
  tpl.values.resize(static_cast<std::size_t>(l - k));

  // Each piece contributes a full linear convolution of its two parts,
  // length r_i + (piece - r_i) - 1 = piece - 1.
  double* out = tpl.values.data();
  for (int i = 0; i < k; ++i) {
    const int r = key.splits[static_cast<std::size_t>(i)];
    if (r < 1 || r >= piece)
      throw std::invalid_argument("build_bio_template: split out of range");
    const double* a = avg.data() + static_cast<std::ptrdiff_t>(i) * piece;
    const double* b = a + r;
    kernels::convolve_full(a, static_cast<std::size_t>(r), b,
                           static_cast<std::size_t>(piece - r), out);
    out += piece - 1;
  }
  return tpl;
}

BioTemplate bio_probe(const std::vector<preprocess::BeatSegment>& beats,
                      const keys::BioKey& key) {
  return build_bio_template(ensemble_average(beats), key);
}

}  // namespace cancelauth::bioconv
