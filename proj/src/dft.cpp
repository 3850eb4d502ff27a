// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/dft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace cancelauth::dft {

namespace {

// Plans are created once per (length, sign) against scratch buffers and
// re-executed on caller arrays via fftw_execute_dft. FFTW_UNALIGNED keeps
// the plan valid for arbitrarily aligned std::complex<double> storage.
class PlanCache {
 public:
  void execute(int sign, std::vector<std::complex<double>>& inout) {
    const std::size_t n = inout.size();
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(mu_);
      const std::uint64_t key = (static_cast<std::uint64_t>(n) << 1) |
                                (sign == FFTW_BACKWARD ? 1u : 0u);
      auto it = plans_.find(key);
      if (it == plans_.end()) {
        std::vector<std::complex<double>> scratch(n);
        fftw_complex* s = reinterpret_cast<fftw_complex*>(scratch.data());
        plan = fftw_plan_dft_1d(static_cast<int>(n), s, s, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("dft: fftw plan creation failed");
        plans_.emplace(key, plan);
      } else {
        plan = it->second;
      }
    }
    fftw_complex* d = reinterpret_cast<fftw_complex*>(inout.data());
    fftw_execute_dft(plan, d, d);
  }

 private:
  std::mutex mu_;
  std::unordered_map<std::uint64_t, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

std::vector<std::complex<double>> forward(
    const std::vector<std::complex<double>>& x) {
  if (x.empty()) throw std::invalid_argument("dft: empty input");
  std::vector<std::complex<double>> y = x;
  cache().execute(FFTW_FORWARD, y);
  return y;
}

std::vector<std::complex<double>> inverse(
    const std::vector<std::complex<double>>& x) {
  if (x.empty()) throw std::invalid_argument("dft: empty input");
  std::vector<std::complex<double>> y = x;
  cache().execute(FFTW_BACKWARD, y);
  const double inv_n = 1.0 / static_cast<double>(y.size());
  for (auto& v : y) v *= inv_n;
  return y;
}

std::vector<std::complex<double>> forward_real(const std::vector<double>& x) {
  std::vector<std::complex<double>> c(x.begin(), x.end());
  return forward(c);
}

}  // namespace cancelauth::dft
