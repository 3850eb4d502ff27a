// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "cancelauth/keys.hpp"
#include "cancelauth/preprocess.hpp"

// Bioconvolving templates: cut the beat average into k equal pieces, split
// each piece at the key position r_i, convolve the two parts, and stack the
// k results into a vector of length l - k.

namespace cancelauth::bioconv {

struct BioTemplate {
  std::vector<double> values;  // length segment_length - piece_count
  int piece_count = 0;
  int segment_length = 0;
};

std::vector<double> ensemble_average(
    const std::vector<preprocess::BeatSegment>& beats);

BioTemplate build_bio_template(const std::vector<double>& avg,
                               const keys::BioKey& key);

// Average the N_v probe beats, then template them with the presented key.
BioTemplate bio_probe(const std::vector<preprocess::BeatSegment>& beats,
                      const keys::BioKey& key);

}  // namespace cancelauth::bioconv
