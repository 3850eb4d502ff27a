// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

// AVX2 kernel variants. Compiled with -mavx2 -mfma; only reached after a
// runtime cpuid check, so the rest of the library stays baseline-ISA clean.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

#include "cancelauth/kernels.hpp"

namespace cancelauth::kernels {

namespace {

void convolve_full_avx2(const double* a, std::size_t n, const double* b,
                        std::size_t m, double* out) {
  std::memset(out, 0, (n + m - 1) * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    const __m256d ai = _mm256_set1_pd(a[i]);
    double* o = out + i;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      __m256d acc = _mm256_loadu_pd(o + j);
      acc = _mm256_fmadd_pd(ai, _mm256_loadu_pd(b + j), acc);
      _mm256_storeu_pd(o + j, acc);
    }
    for (; j < m; ++j) o[j] += a[i] * b[j];
  }
}

double mse_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(n);
}

void accumulate_avx2(double* acc, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i),
                                            _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

void scale_avx2(double* x, std::size_t n, double s) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
  for (; i < n; ++i) x[i] *= s;
}

const Backend kAvx2{"avx2", convolve_full_avx2, mse_avx2, accumulate_avx2,
                    scale_avx2};

}  // namespace

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Backend& avx2_backend() { return kAvx2; }

}  // namespace cancelauth::kernels

#endif  // x86-64
