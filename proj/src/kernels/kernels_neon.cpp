// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

// NEON kernel variants for aarch64 (float64x2).

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstring>

#include "cancelauth/kernels.hpp"

namespace cancelauth::kernels {

namespace {

void convolve_full_neon(const double* a, std::size_t n, const double* b,
                        std::size_t m, double* out) {
  std::memset(out, 0, (n + m - 1) * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t ai = vdupq_n_f64(a[i]);
    double* o = out + i;
    std::size_t j = 0;
    for (; j + 2 <= m; j += 2) {
      float64x2_t acc = vld1q_f64(o + j);
      acc = vfmaq_f64(acc, ai, vld1q_f64(b + j));
      vst1q_f64(o + j, acc);
    }
    for (; j < m; ++j) o[j] += a[i] * b[j];
  }
}

double mse_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(n);
}

void accumulate_neon(double* acc, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(x + i)));
  for (; i < n; ++i) acc[i] += x[i];
}

void scale_neon(double* x, std::size_t n, double s) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), vs));
  for (; i < n; ++i) x[i] *= s;
}

const Backend kNeon{"neon", convolve_full_neon, mse_neon, accumulate_neon,
                    scale_neon};

}  // namespace

const Backend& neon_backend() { return kNeon; }

}  // namespace cancelauth::kernels

#endif  // aarch64
