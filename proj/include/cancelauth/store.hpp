// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cancelauth/bioconv.hpp"
#include "cancelauth/decision.hpp"
#include "cancelauth/mace.hpp"

// Enrollment database: one immutable record per (subject, scheme). The raw
// key is never stored, only a 64-bit fingerprint of its serialized form.

namespace cancelauth::store {

struct MacePayload {
  mace::MaceFilter filter;
  mace::CorrelationSpectrum reference;
};

struct SubjectEntry {
  std::string subject_id;
  decision::Scheme scheme = decision::Scheme::bioconvolving;
  std::variant<bioconv::BioTemplate, MacePayload> payload;
  decision::ThresholdModel threshold;
  std::string created_at;  // informational only
  std::uint64_t key_fingerprint = 0;
};

// Credential construction shared by Store::enroll and the eval harness:
// builds the scheme payload, scores the N_en beats, derives the threshold.
SubjectEntry make_entry(const std::string& subject_id,
                        const std::vector<preprocess::BeatSegment>& beats,
                        decision::Scheme scheme, const keys::AnyKey& key,
                        double k_iqr);

class Store {
 public:
  bool has(const std::string& subject_id, decision::Scheme scheme) const;
  const SubjectEntry& get_entry(const std::string& subject_id,
                                decision::Scheme scheme) const;
  std::vector<std::string> list_subjects() const;  // insertion order, deduped
  std::size_t size() const { return entries_.size(); }

  const SubjectEntry& enroll(const std::string& subject_id,
                             const std::vector<preprocess::BeatSegment>& beats,
                             decision::Scheme scheme, const keys::AnyKey& key,
                             double k_iqr);

  // Replaces the existing entry under a new key; errors if absent.
  const SubjectEntry& revoke_and_reenroll(
      const std::string& subject_id,
      const std::vector<preprocess::BeatSegment>& beats,
      decision::Scheme scheme, const keys::AnyKey& new_key, double k_iqr);

  // Line-oriented text file, written via temp-then-rename.
  void save(const std::string& path) const;
  static Store load(const std::string& path);

 private:
  std::vector<SubjectEntry> entries_;
};

}  // namespace cancelauth::store
