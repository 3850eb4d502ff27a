// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "cancelauth/keys.hpp"
#include "cancelauth/preprocess.hpp"

// MACE-filter scheme: beats are "encrypted" by convolution with the key taps
// followed by a DFT; a filter h is synthesized so every training spectrum
// correlates to a unit peak at the origin while the average correlation-plane
// energy is minimized.

namespace cancelauth::mace {

struct EncryptedSegment {
  std::vector<std::complex<double>> spectrum;  // length l + k - 1
};

struct MaceFilter {
  std::vector<std::complex<double>> coefficients;  // length l + k - 1
};

struct CorrelationSpectrum {
  std::vector<double> values;  // nonnegative, length l + k - 1
};

EncryptedSegment encrypt_segment(const preprocess::BeatSegment& beat,
                                 const keys::MaceKey& key);

// h = D^-1 M (M^H D^-1 M)^-1 u with u = all-ones. By default D holds the
// squared magnitudes of the element-wise mean spectrum; the classic variant
// uses the average power spectrum instead.
MaceFilter build_mace_filter(const std::vector<EncryptedSegment>& encrypted,
                             bool classic_power_spectrum = false);

// |IDFT(m .* conj(h))|.
CorrelationSpectrum correlation_spectrum(const MaceFilter& h,
                                         const EncryptedSegment& m);

EncryptedSegment mean_encrypted(const std::vector<preprocess::BeatSegment>& beats,
                                const keys::MaceKey& key);

}  // namespace cancelauth::mace
