// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace cancelauth::kernels {

namespace {

void convolve_full_scalar(const double* a, std::size_t n, const double* b,
                          std::size_t m, double* out) {
  std::memset(out, 0, (n + m - 1) * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = a[i];
    double* o = out + i;
    for (std::size_t j = 0; j < m; ++j) o[j] += ai * b[j];
  }
}

double mse_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(n);
}

void accumulate_scalar(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void scale_scalar(double* x, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

const Backend kScalar{"scalar", convolve_full_scalar, mse_scalar,
                      accumulate_scalar, scale_scalar};

const Backend* pick_backend() {
  const char* force = std::getenv("CANCELAUTH_KERNELS");
#if defined(__x86_64__) || defined(_M_X64)
  if (force) {
    if (std::strcmp(force, "scalar") == 0) return &kScalar;
    if (std::strcmp(force, "avx2") == 0 && avx2_available())
      return &avx2_backend();
    return &kScalar;
  }
  if (avx2_available()) return &avx2_backend();
#elif defined(__aarch64__)
  if (force && std::strcmp(force, "scalar") == 0) return &kScalar;
  return &neon_backend();
#else
  (void)force;
#endif
  return &kScalar;
}

}  // namespace

const Backend& scalar_backend() { return kScalar; }

const Backend& active_backend() {
  static const Backend* chosen = pick_backend();
  return *chosen;
}

void convolve_full(const double* a, std::size_t n, const double* b,
                   std::size_t m, double* out) {
  active_backend().convolve_full(a, n, b, m, out);
}

double mse(const double* a, const double* b, std::size_t n) {
  return active_backend().mse(a, b, n);
}

void accumulate(double* acc, const double* x, std::size_t n) {
  active_backend().accumulate(acc, x, n);
}

void scale(double* x, std::size_t n, double s) {
  active_backend().scale(x, n, s);
}

}  // namespace cancelauth::kernels
