// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cancelauth/preprocess.hpp"
#include "oracles.hpp"

using namespace cancelauth;

namespace {

std::vector<double> sinusoid(double f, double fs, std::size_t n,
                             double amp = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = amp * std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs);
  return v;
}

}  // namespace

TEST_CASE("remove_baseline: constant signal becomes zero") {
  const std::vector<double> sig(2000, 3.7);
  const auto out = preprocess::remove_baseline(sig, 1000.0);
  REQUIRE(out.size() == sig.size());
  for (double v : out) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("remove_baseline: slow wander is mostly removed") {
  const double fs = 1000.0;
  const auto sig = sinusoid(0.3, fs, 10000);
  const auto out = preprocess::remove_baseline(sig, fs);
  CHECK(oracles::rms(out) < 0.1 * oracles::rms(sig));
}

TEST_CASE("remove_baseline: narrow spikes survive the median cascade") {
  const double fs = 1000.0;
  auto sig = sinusoid(0.3, fs, 8000, 0.5);
  std::vector<std::size_t> spikes{1500, 3000, 4500, 6000};
  for (std::size_t s : spikes)
    for (std::size_t i = s; i < s + 10; ++i) sig[i] += 2.0;  // 10 ms spikes
  const auto baseline_in = sinusoid(0.3, fs, 8000, 0.5);
  const auto out = preprocess::remove_baseline(sig, fs);
  for (std::size_t s : spikes) {
    const double in_amp = sig[s + 5] - baseline_in[s + 5];
    CHECK(out[s + 5] == doctest::Approx(in_amp).epsilon(0.05));
  }
}

TEST_CASE("remove_baseline rejects too-short signals") {
  CHECK_THROWS(preprocess::remove_baseline(std::vector<double>(100, 0.0), 1000.0));
}

TEST_CASE("notch: 50 Hz tone attenuated by at least 30 dB at steady state") {
  const double fs = 1000.0;
  const auto sig = sinusoid(50.0, fs, 20000);
  const auto out = preprocess::notch_filter(sig, fs, 50.0, 1.0);
  REQUIRE(out.size() == sig.size());
  // Skip the transient, measure the tail.
  const std::vector<double> tail(out.begin() + 10000, out.end());
  const double residual = oracles::tone_amplitude(tail, fs, 50.0);
  CHECK(residual < std::pow(10.0, -30.0 / 20.0));
}

TEST_CASE("notch: 5 Hz tone passes within 5%") {
  const double fs = 1000.0;
  const auto sig = sinusoid(5.0, fs, 20000);
  const auto out = preprocess::notch_filter(sig, fs, 50.0, 1.0);
  const std::vector<double> tail(out.begin() + 10000, out.end());
  const double amp = oracles::tone_amplitude(tail, fs, 5.0);
  CHECK(amp == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("notch: zero in, zero out; linear in scale") {
  const auto zero = preprocess::notch_filter(std::vector<double>(100, 0.0),
                                             1000.0, 50.0, 1.0);
  for (double v : zero) CHECK(v == 0.0);

  std::mt19937_64 eng(2);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x(512);
  for (auto& v : x) v = d(eng);
  auto scaled = x;
  for (auto& v : scaled) v *= -2.5;
  const auto y = preprocess::notch_filter(x, 1000.0, 50.0, 1.0);
  const auto ys = preprocess::notch_filter(scaled, 1000.0, 50.0, 1.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(ys[i] == doctest::Approx(-2.5 * y[i]).epsilon(1e-9));
}

TEST_CASE("notch rejects f0 at or above Nyquist") {
  CHECK_THROWS(preprocess::notch_filter(std::vector<double>(10, 0.0), 100.0,
                                        50.0, 1.0));
}

TEST_CASE("segment_beats: 0.8 s at 1 kHz gives 800-sample segments") {
  ingest::EcgRecord rec;
  rec.sample_rate_hz = 1000.0;
  rec.samples.assign(20000, 0.0);
  for (int i = 0; i < 15; ++i)
    rec.r_peaks.push_back(1000 + static_cast<std::size_t>(i) * 1200);
  const auto segs = preprocess::segment_beats(rec, 0.8);
  REQUIRE(segs.size() == 15);
  for (const auto& s : segs) CHECK(s.samples.size() == 800);
}

TEST_CASE("segment_beats skips peaks whose window does not fit") {
  ingest::EcgRecord rec;
  rec.sample_rate_hz = 1000.0;
  rec.samples.assign(500, 0.0);
  rec.r_peaks = {100, 250};
  CHECK_THROWS(preprocess::segment_beats(rec, 0.8));  // nothing fits

  rec.samples.assign(3000, 0.0);
  rec.r_peaks = {100, 1500};
  const auto segs = preprocess::segment_beats(rec, 0.8);
  CHECK(segs.size() == 1);  // the edge peak at 100 is skipped
}

TEST_CASE("segment_beats requires R peaks") {
  ingest::EcgRecord rec;
  rec.sample_rate_hz = 1000.0;
  rec.samples.assign(3000, 0.0);
  CHECK_THROWS(preprocess::segment_beats(rec, 0.8));
}

TEST_CASE("downsample: r=1 is bit-identical") {
  std::mt19937_64 eng(4);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x(1234);
  for (auto& v : x) v = d(eng);
  const auto [y, fs] = preprocess::downsample(x, 1000.0, 1);
  CHECK(y == x);
  CHECK(fs == 1000.0);
}

TEST_CASE("downsample length and rate arithmetic") {
  const std::vector<double> x(800, 0.0);
  const auto [y, fs] = preprocess::downsample(x, 1000.0, 2);
  CHECK(y.size() == 400);
  CHECK(fs == 500.0);
  const auto [y3, fs3] = preprocess::downsample(std::vector<double>(801, 0.0),
                                                1000.0, 4);
  CHECK(y3.size() == 201);  // ceil(801/4)
  CHECK(fs3 == 250.0);
}

TEST_CASE("downsample: 10 Hz tone survives r=4 within 1% amplitude") {
  const double fs = 1000.0;
  const auto x = sinusoid(10.0, fs, 8000);
  const auto [y, new_fs] = preprocess::downsample(x, fs, 4);
  CHECK(new_fs == 250.0);
  const double amp = oracles::tone_amplitude(y, new_fs, 10.0, 250);
  CHECK(amp == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("downsample rejects nonpositive factors") {
  CHECK_THROWS(preprocess::downsample(std::vector<double>(10, 0.0), 100.0, 0));
}

TEST_CASE("anti-alias filter kills content above the cutoff") {
  const double fs = 1000.0;
  // 200 Hz is above the r=4 cutoff (100 Hz) and must not alias through.
  const auto x = sinusoid(200.0, fs, 8000);
  const auto [y, new_fs] = preprocess::downsample(x, fs, 4);
  CHECK(oracles::rms(y) < 0.02);
  (void)new_fs;
}

TEST_CASE("segment length scales consistently under decimation") {
  ingest::SynthSubjectParams p;
  const auto rec = ingest::synth_subject(p, 20, 1000.0, 31);
  preprocess::PreprocessConfig cfg;
  const auto cleaned = preprocess::clean_record(rec, cfg);
  for (int r : {1, 2, 4}) {
    const auto dec = preprocess::decimate_record(cleaned, r);
    const auto segs = preprocess::segment_beats(dec, 0.8);
    for (const auto& s : segs)
      CHECK(s.samples.size() ==
            static_cast<std::size_t>(std::llround(0.8 * 1000.0 / r)));
  }
}
