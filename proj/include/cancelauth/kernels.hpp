// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

// Data-parallel inner loops used by the template and scoring pipelines.
// A scalar reference implementation always exists; on x86-64 an AVX2
// variant (and on aarch64 a NEON variant) is selected at runtime. The
// environment variable CANCELAUTH_KERNELS={scalar,avx2,neon} forces a
// backend, which the equivalence tests use.

namespace cancelauth::kernels {

struct Backend {
  const char* name;
  // out[0 .. n+m-2] = full linear convolution of a (length n) with b (length m)
  void (*convolve_full)(const double* a, std::size_t n, const double* b,
                        std::size_t m, double* out);
  // (1/n) * sum_i (a_i - b_i)^2
  double (*mse)(const double* a, const double* b, std::size_t n);
  // acc[i] += x[i]
  void (*accumulate)(double* acc, const double* x, std::size_t n);
  // x[i] *= s
  void (*scale)(double* x, std::size_t n, double s);
};

const Backend& scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2_backend();  // valid only when avx2_available()
bool avx2_available();
#endif
#if defined(__aarch64__)
const Backend& neon_backend();
#endif

// Backend chosen at first use (CPU probe + optional env override).
const Backend& active_backend();

// Convenience wrappers through the active backend.
void convolve_full(const double* a, std::size_t n, const double* b,
                   std::size_t m, double* out);
double mse(const double* a, const double* b, std::size_t n);
void accumulate(double* acc, const double* x, std::size_t n);
void scale(double* x, std::size_t n, double s);

}  // namespace cancelauth::kernels
