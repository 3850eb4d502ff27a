// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "cancelauth/rng.hpp"

namespace cancelauth::ingest {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

EcgRecord load_record(const std::string& path, double sample_rate_hz,
                      const std::string& subject_id) {
  if (sample_rate_hz <= 0.0)
    throw std::invalid_argument("load_record: sample rate must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_record: cannot open " + path);

  EcgRecord rec;
  rec.sample_rate_hz = sample_rate_hz;
  rec.subject_id = subject_id;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) {
      throw std::runtime_error("load_record: " + path + ": empty line " +
                               std::to_string(lineno));
    }
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(t, &pos);
    } catch (const std::exception&) {
      throw std::runtime_error("load_record: " + path +
                               ": non-numeric value at line " +
                               std::to_string(lineno));
    }
    if (pos != t.size())
      throw std::runtime_error("load_record: " + path +
                               ": trailing garbage at line " +
                               std::to_string(lineno));
    rec.samples.push_back(v);
  }
  if (rec.samples.empty())
    throw std::runtime_error("load_record: " + path + " is empty");
  return rec;
}

void save_record(const std::string& path, const EcgRecord& record) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_record: cannot write " + path);
  char buf[64];
  for (double v : record.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
  if (!out) throw std::runtime_error("save_record: write failed for " + path);
}

std::string annotation_path_for(const std::string& signal_path) {
  const auto slash = signal_path.find_last_of('/');
  const auto dot = signal_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return signal_path + ".rpk";
  return signal_path.substr(0, dot) + ".rpk";
}

std::vector<std::size_t> load_annotations(const std::string& path,
                                          std::size_t n_samples) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_annotations: cannot open " + path);
  std::vector<std::size_t> peaks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    long long idx;
    try {
      idx = std::stoll(t);
    } catch (const std::exception&) {
      throw std::runtime_error("load_annotations: " + path +
                               ": bad index at line " + std::to_string(lineno));
    }
    if (idx < 0 || static_cast<std::size_t>(idx) >= n_samples)
      throw std::runtime_error("load_annotations: " + path +
                               ": index out of range at line " +
                               std::to_string(lineno));
    if (!peaks.empty() && static_cast<std::size_t>(idx) <= peaks.back())
      throw std::runtime_error("load_annotations: " + path +
                               ": indices not strictly increasing at line " +
                               std::to_string(lineno));
    peaks.push_back(static_cast<std::size_t>(idx));
  }
  return peaks;
}

void save_annotations(const std::string& path,
                      const std::vector<std::size_t>& r_peaks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_annotations: cannot write " + path);
  for (std::size_t p : r_peaks) out << p << "\n";
}

EcgRecord synth_subject(const SynthSubjectParams& params, int n_beats,
                        double fs, std::uint64_t seed) {
  if (n_beats < 1) throw std::invalid_argument("synth_subject: n_beats >= 1");
  if (fs <= 0.0) throw std::invalid_argument("synth_subject: fs must be > 0");
  if (params.mean_rr_s <= 0.0)
    throw std::invalid_argument("synth_subject: mean_rr_s must be > 0");
  if (params.rr_jitter_frac < 0.0 || params.rr_jitter_frac >= 0.5)
    throw std::invalid_argument("synth_subject: rr_jitter_frac in [0, 0.5)");
  if (params.noise_std_mv < 0.0)
    throw std::invalid_argument("synth_subject: noise_std_mv >= 0");
  for (double w : params.wave_widths_s)
    if (w <= 0.0)
      throw std::invalid_argument("synth_subject: wave widths must be > 0");

  auto eng = rng::engine(seed);

  // Beat centers: lead-in of one mean RR, then jittered RR intervals.
  std::vector<double> centers(static_cast<std::size_t>(n_beats));
  std::uniform_real_distribution<double> jitter(-params.rr_jitter_frac,
                                                params.rr_jitter_frac);
  double t = params.mean_rr_s;
  for (int b = 0; b < n_beats; ++b) {
    // Snap each beat onto an 8-sample grid so the R annotation is exact and
    // every beat is sampled at the same waveform phase, including after
    // decimation by 2, 4, or 8; fractional-sample offsets would otherwise
    // add amplitude-proportional beat-to-beat variation that has nothing to
    // do with the modelled noise.
    centers[static_cast<std::size_t>(b)] =
        8.0 * static_cast<double>(std::llround(t * fs / 8.0)) / fs;
    t += params.mean_rr_s * (1.0 + (params.rr_jitter_frac > 0.0 ? jitter(eng) : 0.0));
  }

  const double duration = centers.back() + params.mean_rr_s;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * fs));

  EcgRecord rec;
  rec.sample_rate_hz = fs;
  rec.samples.assign(n, 0.0);

  const double support_s = 0.8;  // bumps are negligible beyond this
  for (double c : centers) {
    const auto lo = static_cast<std::size_t>(
        std::max(0.0, std::floor((c - support_s) * fs)));
    const auto hi = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil((c + support_s) * fs)));
    for (std::size_t i = lo; i < hi; ++i) {
      const double ti = static_cast<double>(i) / fs - c;
      double v = 0.0;
      for (int w = 0; w < 3; ++w) {
        const double z = (ti - params.wave_centers_s[static_cast<std::size_t>(w)]) /
                         params.wave_widths_s[static_cast<std::size_t>(w)];
        v += params.wave_amplitudes_mv[static_cast<std::size_t>(w)] *
             std::exp(-0.5 * z * z);
      }
      rec.samples[i] += v;
    }
    rec.r_peaks.push_back(static_cast<std::size_t>(std::llround(c * fs)));
  }

  if (params.noise_std_mv > 0.0) {
    std::normal_distribution<double> noise(0.0, params.noise_std_mv);
    for (auto& s : rec.samples) s += noise(eng);
  }
  return rec;
}

namespace {

// Radical inverse of n in the given base with a Faure-style multiplicative
// digit scramble. The plain van der Corput sequence is nearly linear in n
// for small n, which would leave consecutive subjects almost identical in
// every fine-variation dimension.
double scrambled_radical_inverse(std::uint64_t n, std::uint64_t base,
                                 std::uint64_t mult) {
  double v = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (n) {
    const std::uint64_t digit = n % base;
    v += static_cast<double>(digit ? (digit * mult) % base : 0) * f;
    n /= base;
    f /= static_cast<double>(base);
  }
  return v;
}

}  // namespace

SynthSubjectParams synth_params_for_subject(std::uint64_t corpus_seed,
                                            int subject_index) {
  if (subject_index < 0)
    throw std::invalid_argument("synth_params_for_subject: subject_index >= 0");
  // Fine variation: each dimension walks its own scrambled low-discrepancy
  // sequence with a corpus-seeded rotation, so any prefix of subject indices
  // is spread evenly across the fine-variation ranges.
  auto eng = rng::engine(rng::derive(corpus_seed, 0x5u, 0));
  std::uniform_real_distribution<double> rotation(0.0, 1.0);
  constexpr std::uint64_t kBases[8] = {2, 3, 5, 7, 11, 13, 17, 19};
  constexpr std::uint64_t kMults[8] = {1, 2, 3, 5, 7, 11, 10, 14};
  const auto n = static_cast<std::uint64_t>(subject_index) + 1;
  double u[8];
  for (int d = 0; d < 8; ++d)
    u[d] = std::fmod(scrambled_radical_inverse(n, kBases[d], kMults[d]) +
                         rotation(eng),
                     1.0);
  auto span = [](double x, double lo, double hi) { return lo + (hi - lo) * x; };

  // Coarse variation: a 6-bit even-parity morphology code. Every pair of
  // subjects (mod 32) then differs in at least two coded dimensions, which
  // keeps the impostor/genuine margin up at the fixed measurement noise;
  // iid morphology draws can place two subjects almost on top of each
  // other. The P and T waves sit just inside the quarter-window boundaries
  // of the 0.8 s beat: both halves of any keyed piece split then carry
  // signal, so no revocable-template block can collapse to pure noise for
  // an unlucky key.
  const int w = subject_index % 32;
  const int b_qrs = w & 1;         // QRS amplitude band
  const int b_tw = (w >> 1) & 1;   // T width band (+ center shift)
  const int b_ta = (w >> 2) & 1;   // T amplitude band (+ center shift)
  const int b_ps = (w >> 3) & 1;   // P polarity (+ center shift)
  const int b_pw = (w >> 4) & 1;   // P width band (+ center shift)
  const int b_ts = (b_qrs + b_tw + b_ta + b_ps + b_pw) & 1;  // T polarity

  SynthSubjectParams p;
  const double qrs_amp =
      b_qrs ? span(u[0], 7.6, 8.0) : span(u[0], 3.4, 3.8);
  const double t_mag = b_ta ? span(u[1], 2.9, 3.1) : span(u[1], 1.3, 1.5);
  const double p_mag = span(u[2], 2.2, 2.5);
  p.wave_amplitudes_mv = {b_ps ? -p_mag : p_mag, qrs_amp,
                          b_ts ? -t_mag : t_mag};
  p.wave_widths_s = {
      b_pw ? span(u[3], 0.0120, 0.0130) : span(u[3], 0.0075, 0.0082),
      span(u[4], 0.0009, 0.0011),
      b_tw ? span(u[5], 0.0120, 0.0130) : span(u[5], 0.0075, 0.0082)};
  p.wave_centers_s = {
      -(0.1870 + 0.0110 * b_pw + 0.0055 * b_ps + 0.0010 * u[6]), 0.0,
      0.1870 + 0.0110 * b_tw + 0.0055 * b_ta + 0.0010 * u[7]};
  p.mean_rr_s = span(std::fmod(u[0] + u[7], 1.0), 0.95, 1.25);
  return p;
}

std::vector<std::size_t> detect_r_peaks(const EcgRecord& record) {
  const double fs = record.sample_rate_hz;
  const std::size_t n = record.samples.size();
  if (fs <= 0.0) throw std::invalid_argument("detect_r_peaks: bad sample rate");
  if (static_cast<double>(n) < fs)
    throw std::invalid_argument("detect_r_peaks: need at least 1 s of data");

  // Derivative, square, moving-window integration (150 ms).
  std::vector<double> feat(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double d = record.samples[i] - record.samples[i - 1];
    feat[i] = d * d;
  }
  const std::size_t w =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.15 * fs)));
  std::vector<double> integ(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += feat[i];
    if (i >= w) acc -= feat[i - w];
    integ[i] = acc;
  }

  const double peak = *std::max_element(integ.begin(), integ.end());
  if (peak <= 0.0) return {};
  const double thresh = 0.25 * peak;

  const std::size_t refractory =
      static_cast<std::size_t>(std::llround(0.2 * fs));
  std::vector<std::size_t> peaks;
  std::size_t i = 0;
  while (i < n) {
    if (integ[i] <= thresh) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < n && integ[end] > thresh) ++end;
    // Locate the R peak as the largest |sample| around the active region.
    const std::size_t lo = i > w ? i - w : 0;
    const std::size_t hi = std::min(n, end + w / 2);
    std::size_t best = lo;
    for (std::size_t j = lo; j < hi; ++j)
      if (std::fabs(record.samples[j]) > std::fabs(record.samples[best]))
        best = j;
    if (!peaks.empty() && best - peaks.back() < refractory) {
      if (std::fabs(record.samples[best]) >
          std::fabs(record.samples[peaks.back()]))
        peaks.back() = best;
    } else {
      peaks.push_back(best);
    }
    i = end;
  }
  return peaks;
}

}  // namespace cancelauth::ingest
