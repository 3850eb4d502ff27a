// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cancelauth/decision.hpp"
#include "cancelauth/ingest.hpp"
#include "cancelauth/preprocess.hpp"

// Leave-one-out verification experiments: every subject is enrolled in turn,
// scored against genuine probes from their held-out beats and impostor probes
// from every other subject, and FPR/FNR are swept over the k_iqr fence grid
// to the equal-error operating point.

namespace cancelauth::eval {

using decision::Scheme;

// Impostors present the genuine subject's key by default, which isolates the
// biometric factor; random_key measures the two-factor benefit.
enum class AttackModel { genuine_key, random_key };

struct ExperimentConfig {
  Scheme scheme = Scheme::bioconvolving;
  int n_trials = 10;  // per genuine subject and per impostor pair
  int n_en = 15;
  int n_v = 1;
  int bio_k = 4;
  int mace_k = 16;
  AttackModel attack = AttackModel::genuine_key;
  std::uint64_t rng_seed = 0;
};

struct SubjectScores {
  std::string subject_id;
  std::vector<double> enrollment_mses;
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct TrialScores {
  std::vector<SubjectScores> per_subject;
  std::size_t genuine_total() const;
  std::size_t impostor_total() const;
};

TrialScores run_trials(
    const std::vector<std::vector<preprocess::BeatSegment>>& pools,
    const std::vector<std::string>& subject_ids,
    const ExperimentConfig& config);

// Recomputes each subject's fence at this k_iqr from the stored enrollment
// MSEs; returns (fpr, fnr) pooled over all subjects.
std::pair<double, double> rates_at(const TrialScores& scores, double k_iqr);

struct EerResult {
  double eer = 0.0;
  double k_iqr_star = 0.0;
};

// Locates the FPR/FNR crossing on the grid (linear interpolation between
// bracketing points); the grid is extended by doubling its upper end when no
// crossing is found.
EerResult find_eer(const TrialScores& scores, std::vector<double> k_iqr_grid);

std::vector<double> default_k_iqr_grid();  // 0 to 10, step 0.1

struct ReportRow {
  Scheme scheme;
  double fs_hz;
  int n_en;
  int n_v;
  double k_iqr, fpr, fnr;
};

struct SummaryRow {
  Scheme scheme;
  double fs_hz;
  int n_en;
  int n_v;
  double eer = 0.0;
  double k_iqr_star = 0.0;
  std::string error;  // nonempty when this cell failed
};

struct EvalReport {
  std::vector<ReportRow> rows;        // one per (cell, grid point)
  std::vector<SummaryRow> summary;    // one per cell
};

struct GridConfig {
  std::vector<Scheme> schemes{Scheme::bioconvolving};
  std::vector<int> downsample_factors{1};
  std::vector<int> n_v_list{1};
  int n_trials = 10;
  int n_en = 15;
  int bio_k = 4;
  int mace_k = 16;
  AttackModel attack = AttackModel::genuine_key;
  std::vector<double> k_iqr_grid = default_k_iqr_grid();
  std::uint64_t rng_seed = 0;
  double segment_duration_s = 0.8;
  std::string score_dump_prefix;  // when set, per-cell score CSVs are written
};

// cleaned_records: baseline/notch-filtered full records with R peaks, at the
// base sampling rate. Cell failures land in summary[i].error; other cells
// still run.
EvalReport run_grid(const std::vector<ingest::EcgRecord>& cleaned_records,
                    const GridConfig& config);

void write_report_csv(const std::string& path, const EvalReport& report);
void write_summary_csv(const std::string& path, const EvalReport& report);
void write_scores_csv(const std::string& path, const TrialScores& scores);

}  // namespace cancelauth::eval
