// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cancelauth/kernels.hpp"
#include "cancelauth/store.hpp"

namespace cancelauth::decision {

std::string scheme_name(Scheme s) {
  return s == Scheme::bioconvolving ? "bioconvolving" : "mace";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "bioconvolving" || name == "bio") return Scheme::bioconvolving;
  if (name == "mace") return Scheme::mace;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("mse: length mismatch");
  if (a.empty()) throw std::invalid_argument("mse: empty input");
  return kernels::mse(a.data(), b.data(), a.size());
}

std::pair<double, double> quartiles(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("quartiles: empty input");
  if (values.size() == 1) return {values[0], values[0]};
  std::sort(values.begin(), values.end());
  const auto at = [&](double p) {
    const double rank = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (frac == 0.0) return values[lo];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  return {at(0.25), at(0.75)};
}

ThresholdModel compute_threshold(const std::vector<double>& enrollment_mses,
                                 double k_iqr) {
  if (!(k_iqr >= 0.0))
    throw std::invalid_argument("compute_threshold: k_iqr must be >= 0");
  const auto [q1, q3] = quartiles(enrollment_mses);
  ThresholdModel model;
  model.q1 = q1;
  model.q3 = q3;
  model.k_iqr = k_iqr;
  model.t_mse = q3 + k_iqr * (q3 - q1);
  model.enrollment_mses = enrollment_mses;
  return model;
}

namespace {

const std::vector<double>& bio_template_of(const store::SubjectEntry& entry) {
  const auto* tpl = std::get_if<bioconv::BioTemplate>(&entry.payload);
  if (!tpl) throw std::invalid_argument("entry payload is not bioconvolving");
  return tpl->values;
}

const store::MacePayload& mace_payload_of(const store::SubjectEntry& entry) {
  const auto* p = std::get_if<store::MacePayload>(&entry.payload);
  if (!p) throw std::invalid_argument("entry payload is not mace");
  return *p;
}

}  // namespace

std::vector<double> enrollment_scores(
    const std::vector<preprocess::BeatSegment>& beats,
    const store::SubjectEntry& entry, const keys::AnyKey& key) {
  std::vector<double> scores;
  scores.reserve(beats.size());
  if (entry.scheme == Scheme::bioconvolving) {
    const auto* bio_key = std::get_if<keys::BioKey>(&key);
    if (!bio_key)
      throw std::invalid_argument("enrollment_scores: expected a BIO key");
    const auto& stored = bio_template_of(entry);
    for (const auto& beat : beats) {
      const auto tpl = bioconv::build_bio_template(beat.samples, *bio_key);
      scores.push_back(mse(tpl.values, stored));
    }
  } else {
    const auto* mace_key = std::get_if<keys::MaceKey>(&key);
    if (!mace_key)
      throw std::invalid_argument("enrollment_scores: expected a MACE key");
    const auto& payload = mace_payload_of(entry);
    for (const auto& beat : beats) {
      const auto spec = mace::correlation_spectrum(
          payload.filter, mace::encrypt_segment(beat, *mace_key));
      scores.push_back(mse(spec.values, payload.reference.values));
    }
  }
  return scores;
}

double probe_score(const std::vector<preprocess::BeatSegment>& probe_beats,
                   const keys::AnyKey& presented_key,
                   const store::SubjectEntry& claimed_entry) {
  if (claimed_entry.scheme == Scheme::bioconvolving) {
    const auto* bio_key = std::get_if<keys::BioKey>(&presented_key);
    if (!bio_key) throw std::invalid_argument("probe: expected a BIO key");
    const auto probe = bioconv::bio_probe(probe_beats, *bio_key);
    return mse(probe.values, bio_template_of(claimed_entry));
  }
  const auto* mace_key = std::get_if<keys::MaceKey>(&presented_key);
  if (!mace_key) throw std::invalid_argument("probe: expected a MACE key");
  const auto& payload = mace_payload_of(claimed_entry);
  const auto spec = mace::correlation_spectrum(
      payload.filter, mace::mean_encrypted(probe_beats, *mace_key));
  return mse(spec.values, payload.reference.values);
}

VerifyResult verify(const std::vector<preprocess::BeatSegment>& probe_beats,
                    const keys::AnyKey& presented_key,
                    const store::SubjectEntry& claimed_entry) {
  VerifyResult result;
  try {
    result.score = probe_score(probe_beats, presented_key, claimed_entry);
  } catch (const std::exception& e) {
    result.accept = false;
    result.score = std::numeric_limits<double>::infinity();
    result.reason = e.what();
    return result;
  }
  if (!std::isfinite(result.score)) {
    result.accept = false;
    result.reason = "non-finite score";
    return result;
  }
  // Strict inequality: ties reject.
  result.accept = result.score < claimed_entry.threshold.t_mse;
  if (!result.accept) result.reason = "score above threshold";
  return result;
}

}  // namespace cancelauth::decision
