// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace cancelauth::preprocess {

std::vector<double> median_filter(const std::vector<double>& signal,
                                  std::size_t window_samples) {
  if (window_samples == 0)
    throw std::invalid_argument("median_filter: window must be positive");
  const std::size_t n = signal.size();
  if (n == 0) return {};
  const std::size_t half = window_samples / 2;
  std::vector<double> out(n);
  std::vector<double> buf;
  buf.reserve(2 * half + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = std::min({half, i, n - 1 - i});
    buf.assign(signal.begin() + static_cast<std::ptrdiff_t>(i - r),
               signal.begin() + static_cast<std::ptrdiff_t>(i + r + 1));
    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(r);
    std::nth_element(buf.begin(), mid, buf.end());
    out[i] = *mid;
  }
  return out;
}

std::vector<double> remove_baseline(const std::vector<double>& signal,
                                    double fs, double win1_ms, double win2_ms) {
  if (fs <= 0.0) throw std::invalid_argument("remove_baseline: fs must be > 0");
  if (win1_ms <= 0.0 || win2_ms <= win1_ms)
    throw std::invalid_argument("remove_baseline: need 0 < win1 < win2");
  const auto w1 = static_cast<std::size_t>(std::llround(win1_ms * 1e-3 * fs));
  const auto w2 = static_cast<std::size_t>(std::llround(win2_ms * 1e-3 * fs));
  if (signal.size() <= w2)
    throw std::invalid_argument(
        "remove_baseline: signal shorter than the larger median window");
  const std::vector<double> baseline = median_filter(median_filter(signal, w1), w2);
  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i)
    out[i] = signal[i] - baseline[i];
  return out;
}

std::vector<double> notch_filter(const std::vector<double>& signal, double fs,
                                 double f0, double bandwidth) {
  if (fs <= 0.0) throw std::invalid_argument("notch_filter: fs must be > 0");
  if (f0 <= 0.0 || f0 >= fs / 2.0)
    throw std::invalid_argument("notch_filter: f0 must lie in (0, fs/2)");
  if (bandwidth <= 0.0)
    throw std::invalid_argument("notch_filter: bandwidth must be > 0");

  const double w0 = 2.0 * M_PI * f0 / fs;
  const double q = f0 / bandwidth;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  const double b0 = 1.0 / a0;
  const double b1 = -2.0 * std::cos(w0) / a0;
  const double b2 = 1.0 / a0;
  const double a1 = -2.0 * std::cos(w0) / a0;
  const double a2 = (1.0 - alpha) / a0;

  std::vector<double> out(signal.size());
  double z1 = 0.0, z2 = 0.0;  // direct form II transposed
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double x = signal[i];
    const double y = b0 * x + z1;
    z1 = b1 * x - a1 * y + z2;
    z2 = b2 * x - a2 * y;
    out[i] = y;
  }
  return out;
}

std::vector<BeatSegment> segment_beats(const ingest::EcgRecord& record,
                                       double duration_s) {
  if (record.r_peaks.empty())
    throw std::invalid_argument("segment_beats: record has no R peaks");
  if (duration_s <= 0.0)
    throw std::invalid_argument("segment_beats: duration must be > 0");
  const double fs = record.sample_rate_hz;
  const auto l = static_cast<std::size_t>(std::llround(duration_s * fs));
  if (l == 0) throw std::invalid_argument("segment_beats: zero-length window");
  const std::size_t pre = l - l / 2;  // extra sample (odd l) goes before the peak
  const std::size_t n = record.samples.size();

  std::vector<BeatSegment> segments;
  std::size_t skipped = 0;
  for (std::size_t peak : record.r_peaks) {
    if (peak < pre || peak - pre + l > n) {
      ++skipped;
      continue;
    }
    const std::size_t start = peak - pre;
    BeatSegment seg;
    seg.fs = fs;
    seg.duration_s = duration_s;
    seg.samples.assign(record.samples.begin() + static_cast<std::ptrdiff_t>(start),
                       record.samples.begin() + static_cast<std::ptrdiff_t>(start + l));
    segments.push_back(std::move(seg));
  }
  if (segments.empty())
    throw std::runtime_error("segment_beats: no peak window fits (" +
                             std::to_string(skipped) + " peaks skipped)");
  return segments;
}

SosFilter cheby1_lowpass(int order, double ripple_db, double cutoff_norm) {
  if (order < 1) throw std::invalid_argument("cheby1_lowpass: order >= 1");
  if (cutoff_norm <= 0.0 || cutoff_norm >= 1.0)
    throw std::invalid_argument("cheby1_lowpass: cutoff in (0, 1)");
  if (ripple_db <= 0.0)
    throw std::invalid_argument("cheby1_lowpass: ripple must be > 0 dB");

  const double eps = std::sqrt(std::pow(10.0, ripple_db / 10.0) - 1.0);
  const double mu = std::asinh(1.0 / eps) / order;
  const double wa = std::tan(M_PI * cutoff_norm / 2.0);  // bilinear prewarp

  SosFilter f;
  // Conjugate analog pole pairs -> digital biquads via s = (z-1)/(z+1).
  for (int k = 1; 2 * k <= order; ++k) {
    const double theta = M_PI * (2.0 * k - 1.0) / (2.0 * order);
    const std::complex<double> p(-std::sinh(mu) * std::sin(theta) * wa,
                                 std::cosh(mu) * std::cos(theta) * wa);
    const double c1 = -2.0 * p.real();
    const double c0 = std::norm(p);
    const double d0 = 1.0 + c1 + c0;
    f.sections.push_back({1.0 / d0, 2.0 / d0, 1.0 / d0, (2.0 * c0 - 2.0) / d0,
                          (1.0 - c1 + c0) / d0});
  }
  if (order % 2 == 1) {
    const double p = -std::sinh(mu) * wa;  // real pole
    const double d0 = 1.0 - p;
    f.sections.push_back({1.0 / d0, 1.0 / d0, 0.0, -(1.0 + p) / d0, 0.0});
  }

  // Normalize: even-order Chebyshev I has DC gain -ripple dB, odd has 0 dB.
  double dc = 1.0;
  for (const auto& s : f.sections)
    dc *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  const double target =
      order % 2 == 0 ? std::pow(10.0, -ripple_db / 20.0) : 1.0;
  f.gain = target / dc;
  return f;
}

namespace {

std::vector<double> sos_forward(const SosFilter& f, std::vector<double> x) {
  for (const auto& s : f.sections) {
    double z1 = 0.0, z2 = 0.0;
    for (auto& v : x) {
      const double y = s.b0 * v + z1;
      z1 = s.b1 * v - s.a1 * y + z2;
      z2 = s.b2 * v - s.a2 * y;
      v = y;
    }
  }
  for (auto& v : x) v *= f.gain;
  return x;
}

}  // namespace

std::vector<double> filtfilt(const SosFilter& f,
                             const std::vector<double>& signal) {
  std::vector<double> y = sos_forward(f, signal);
  std::reverse(y.begin(), y.end());
  y = sos_forward(f, std::move(y));
  std::reverse(y.begin(), y.end());
  return y;
}

std::pair<std::vector<double>, double> downsample(
    const std::vector<double>& signal, double fs, int r) {
  if (r < 1) throw std::invalid_argument("downsample: factor must be >= 1");
  if (r == 1) return {signal, fs};
  const SosFilter aa = cheby1_lowpass(8, 0.05, 0.8 / r);
  const std::vector<double> filtered = filtfilt(aa, signal);
  std::vector<double> out;
  out.reserve((signal.size() + static_cast<std::size_t>(r) - 1) /
              static_cast<std::size_t>(r));
  for (std::size_t i = 0; i < filtered.size(); i += static_cast<std::size_t>(r))
    out.push_back(filtered[i]);
  return {std::move(out), fs / r};
}

std::vector<std::size_t> scale_peaks(const std::vector<std::size_t>& peaks,
                                     int r, std::size_t new_len) {
  if (r < 1) throw std::invalid_argument("scale_peaks: factor must be >= 1");
  std::vector<std::size_t> out;
  out.reserve(peaks.size());
  for (std::size_t p : peaks) {
    const auto q = static_cast<std::size_t>(
        std::llround(static_cast<double>(p) / r));
    if (q >= new_len) continue;
    if (!out.empty() && q <= out.back()) continue;
    out.push_back(q);
  }
  return out;
}

ingest::EcgRecord clean_record(const ingest::EcgRecord& record,
                               const PreprocessConfig& config) {
  ingest::EcgRecord out = record;
  out.samples = remove_baseline(record.samples, record.sample_rate_hz,
                                config.median_win1_ms, config.median_win2_ms);
  out.samples = notch_filter(out.samples, record.sample_rate_hz,
                             config.notch_freq_hz, config.notch_bandwidth_hz);
  return out;
}

ingest::EcgRecord decimate_record(const ingest::EcgRecord& cleaned, int r) {
  ingest::EcgRecord out;
  out.subject_id = cleaned.subject_id;
  auto [samples, new_fs] = downsample(cleaned.samples, cleaned.sample_rate_hz, r);
  out.samples = std::move(samples);
  out.sample_rate_hz = new_fs;
  out.r_peaks = scale_peaks(cleaned.r_peaks, r, out.samples.size());
  return out;
}

}  // namespace cancelauth::preprocess
