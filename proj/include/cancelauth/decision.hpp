// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "cancelauth/keys.hpp"
#include "cancelauth/preprocess.hpp"

namespace cancelauth::store {
struct SubjectEntry;
}

namespace cancelauth::decision {

enum class Scheme { bioconvolving, mace };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Per-subject acceptance fence: t_mse = q3 + k_iqr * (q3 - q1).
struct ThresholdModel {
  double q1 = 0.0;
  double q3 = 0.0;
  double k_iqr = 0.0;
  double t_mse = 0.0;
  std::vector<double> enrollment_mses;
};

double mse(const std::vector<double>& a, const std::vector<double>& b);

// Quantile p at rank p*(n-1) with linear interpolation (zero-indexed).
std::pair<double, double> quartiles(std::vector<double> values);

ThresholdModel compute_threshold(const std::vector<double>& enrollment_mses,
                                 double k_iqr);

// Per-beat scores against the stored credential: bioconvolving scores
// single-beat templates against F; MACE scores each beat's correlation
// spectrum against the stored reference.
std::vector<double> enrollment_scores(
    const std::vector<preprocess::BeatSegment>& beats,
    const store::SubjectEntry& entry, const keys::AnyKey& key);

struct VerifyResult {
  bool accept = false;
  double score = 0.0;
  std::string reason;  // set when rejected
};

// Fail-closed: any error (scheme/key/length mismatch) yields a reject with
// the cause in `reason`, never an accept.
VerifyResult verify(const std::vector<preprocess::BeatSegment>& probe_beats,
                    const keys::AnyKey& presented_key,
                    const store::SubjectEntry& claimed_entry);

// Probe score without the threshold decision (used by the eval harness).
double probe_score(const std::vector<preprocess::BeatSegment>& probe_beats,
                   const keys::AnyKey& presented_key,
                   const store::SubjectEntry& claimed_entry);

}  // namespace cancelauth::decision
