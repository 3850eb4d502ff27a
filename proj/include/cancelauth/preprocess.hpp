// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "cancelauth/ingest.hpp"

namespace cancelauth::preprocess {

/// l-sample window centered at an R peak; l = round(duration_s * fs).
struct BeatSegment {
  std::vector<double> samples;  // mV
  double fs = 0.0;
  double duration_s = 0.0;
};

struct PreprocessConfig {
  double median_win1_ms = 200.0;
  double median_win2_ms = 600.0;
  double notch_freq_hz = 50.0;
  double notch_bandwidth_hz = 1.0;
  double segment_duration_s = 0.8;
  int downsample_factor = 1;
};

// Running median, window shrinks symmetrically at the edges.
std::vector<double> median_filter(const std::vector<double>& signal,
                                  std::size_t window_samples);

// Baseline = median cascade (win1 then win2); returns signal - baseline.
std::vector<double> remove_baseline(const std::vector<double>& signal,
                                    double fs, double win1_ms = 200.0,
                                    double win2_ms = 600.0);

// Second-order IIR notch (zeros on the unit circle at +-f0).
std::vector<double> notch_filter(const std::vector<double>& signal, double fs,
                                 double f0, double bandwidth);

std::vector<preprocess::BeatSegment> segment_beats(
    const ingest::EcgRecord& record, double duration_s);

// Order-8 Chebyshev Type-I anti-alias (0.05 dB ripple, cutoff 0.8*pi/r),
// applied forward-backward, then keep every r-th sample.
std::pair<std::vector<double>, double> downsample(
    const std::vector<double>& signal, double fs, int r);

// Peak indices rescaled to the decimated rate.
std::vector<std::size_t> scale_peaks(const std::vector<std::size_t>& peaks,
                                     int r, std::size_t new_len);

// Baseline + notch on a whole record; peaks and metadata preserved.
ingest::EcgRecord clean_record(const ingest::EcgRecord& record,
                               const PreprocessConfig& config);

// clean_record output decimated by r, with peaks rescaled.
ingest::EcgRecord decimate_record(const ingest::EcgRecord& cleaned, int r);

// Second-order sections for the Chebyshev design, exposed for tests.
struct Biquad {
  double b0, b1, b2, a1, a2;
};
struct SosFilter {
  std::vector<Biquad> sections;
  double gain;  // applied once per pass
};
SosFilter cheby1_lowpass(int order, double ripple_db, double cutoff_norm);
std::vector<double> filtfilt(const SosFilter& f,
                             const std::vector<double>& signal);

}  // namespace cancelauth::preprocess
