// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

// DFT convention used everywhere in this project: the forward transform is
// unnormalized, the inverse carries the 1/L factor. Backed by FFTW with a
// per-length plan cache; arbitrary (non power-of-two) lengths are supported.

namespace cancelauth::dft {

std::vector<std::complex<double>> forward(
    const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> inverse(
    const std::vector<std::complex<double>>& x);

// Forward DFT of a real sequence.
std::vector<std::complex<double>> forward_real(const std::vector<double>& x);

}  // namespace cancelauth::dft
