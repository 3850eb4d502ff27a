// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cancelauth::ingest {

/// Raw single-lead ECG signal. r_peaks, when nonempty, are strictly
/// increasing sample indices into samples.
struct EcgRecord {
  std::vector<double> samples;  // mV
  double sample_rate_hz = 0.0;
  std::vector<std::size_t> r_peaks;
  std::string subject_id;
};

/// Parameters of a 3-Gaussian synthetic beat (P, QRS, T bumps).
struct SynthSubjectParams {
  std::array<double, 3> wave_amplitudes_mv{0.15, 1.0, 0.3};
  std::array<double, 3> wave_widths_s{0.025, 0.012, 0.06};
  std::array<double, 3> wave_centers_s{-0.2, 0.0, 0.22};  // relative to R
  double mean_rr_s = 0.9;
  double rr_jitter_frac = 0.0;   // in [0, 0.5)
  double noise_std_mv = 0.0;
};

// Plain-text signal format: one real number per line, no header.
EcgRecord load_record(const std::string& path, double sample_rate_hz,
                      const std::string& subject_id);
void save_record(const std::string& path, const EcgRecord& record);

// Annotation sidecar (same basename, extension .rpk): one index per line.
std::vector<std::size_t> load_annotations(const std::string& path,
                                          std::size_t n_samples);
void save_annotations(const std::string& path,
                      const std::vector<std::size_t>& r_peaks);
std::string annotation_path_for(const std::string& signal_path);

EcgRecord synth_subject(const SynthSubjectParams& params, int n_beats,
                        double fs, std::uint64_t seed);

// Deterministic per-subject morphology draw for synthetic corpora.
SynthSubjectParams synth_params_for_subject(std::uint64_t corpus_seed,
                                            int subject_index);

// Derivative-square-integrate detector with a 200 ms refractory window.
std::vector<std::size_t> detect_r_peaks(const EcgRecord& record);

}  // namespace cancelauth::ingest
