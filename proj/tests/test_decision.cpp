// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <vector>

#include "cancelauth/decision.hpp"
#include "cancelauth/ingest.hpp"
#include "cancelauth/store.hpp"
#include "oracles.hpp"

using namespace cancelauth;

namespace {

std::vector<preprocess::BeatSegment> subject_beats(int subject_index, int n,
                                                   std::uint64_t seed) {
  auto params = ingest::synth_params_for_subject(404, subject_index);
  params.rr_jitter_frac = 0.05;
  params.noise_std_mv = 0.02;
  const auto rec = ingest::synth_subject(params, n + 4, 1000.0, seed);
  auto beats = preprocess::segment_beats(rec, 0.8);
  REQUIRE(beats.size() >= static_cast<std::size_t>(n));
  beats.resize(static_cast<std::size_t>(n));
  return beats;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  CHECK(decision::scheme_name(decision::Scheme::bioconvolving) == "bioconvolving");
  CHECK(decision::scheme_name(decision::Scheme::mace) == "mace");
  CHECK(decision::scheme_from_name("bioconvolving") == decision::Scheme::bioconvolving);
  CHECK(decision::scheme_from_name("bio") == decision::Scheme::bioconvolving);
  CHECK(decision::scheme_from_name("mace") == decision::Scheme::mace);
  CHECK_THROWS(decision::scheme_from_name("rsa"));
}

TEST_CASE("mse matches the hand oracle") {
  CHECK(decision::mse({0.0, 2.0, 2.0}, {0.0, 0.0, 0.0}) ==
        doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(decision::mse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK_THROWS(decision::mse({1.0}, {1.0, 2.0}));
  CHECK_THROWS(decision::mse({}, {}));
}

TEST_CASE("quartiles use linear interpolation at rank p*(n-1)") {
  const auto [q1a, q3a] = decision::quartiles({8, 1, 7, 2, 6, 3, 5, 4});
  CHECK(q1a == doctest::Approx(2.75).epsilon(1e-15));
  CHECK(q3a == doctest::Approx(6.25).epsilon(1e-15));

  const auto [q1b, q3b] = decision::quartiles({1.0, 0.0});
  CHECK(q1b == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(q3b == doctest::Approx(0.75).epsilon(1e-15));

  const auto [q1c, q3c] = decision::quartiles({5.0});
  CHECK(q1c == 5.0);
  CHECK(q3c == 5.0);

  CHECK_THROWS(decision::quartiles({}));
}

TEST_CASE("quartiles agree with the generic quantile oracle") {
  std::mt19937_64 eng(3);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> v(15);
    for (auto& x : v) x = d(eng);
    const auto [q1, q3] = decision::quartiles(v);
    CHECK(q1 == doctest::Approx(oracles::quantile(v, 0.25)).epsilon(1e-12));
    CHECK(q3 == doctest::Approx(oracles::quantile(v, 0.75)).epsilon(1e-12));
  }
}

TEST_CASE("threshold fence: t = q3 + k_iqr * (q3 - q1)") {
  const std::vector<double> mses{1, 2, 3, 4, 5, 6, 7, 8};
  const auto t = decision::compute_threshold(mses, 1.5);
  CHECK(t.q1 == doctest::Approx(2.75).epsilon(1e-15));
  CHECK(t.q3 == doctest::Approx(6.25).epsilon(1e-15));
  CHECK(t.t_mse == doctest::Approx(11.5).epsilon(1e-15));
  CHECK(t.enrollment_mses == mses);

  CHECK(decision::compute_threshold(mses, 0.0).t_mse ==
        doctest::Approx(6.25).epsilon(1e-15));
  const auto flat = decision::compute_threshold({2.0, 2.0, 2.0}, 5.0);
  CHECK(flat.t_mse == 2.0);
  CHECK_THROWS(decision::compute_threshold({}, 1.5));
  CHECK_THROWS(decision::compute_threshold({1.0, 3.0}, -1.5));  // negative k
}

TEST_CASE("enrollment_scores: one score per beat, zero for identical beats") {
  auto beats = subject_beats(0, 15, 7);
  for (auto scheme : {decision::Scheme::bioconvolving, decision::Scheme::mace}) {
    const keys::AnyKey key =
        scheme == decision::Scheme::bioconvolving
            ? keys::AnyKey(keys::gen_bio_key(800, 4, 11))
            : keys::AnyKey(keys::gen_mace_key(16, 11));
    const auto entry = store::make_entry("s0", beats, scheme, key, 1.5);
    const auto scores = decision::enrollment_scores(beats, entry, key);
    CHECK(scores.size() == beats.size());
    for (double s : scores) {
      CHECK(std::isfinite(s));
      CHECK(s >= 0.0);
    }
  }

  // Identical beats make every single-beat bioconvolving template equal F.
  std::vector<preprocess::BeatSegment> same(5, beats.front());
  const keys::AnyKey key = keys::gen_bio_key(800, 4, 11);
  const auto entry = store::make_entry("s0", same,
                                       decision::Scheme::bioconvolving, key, 1.5);
  for (double s : decision::enrollment_scores(same, entry, key))
    CHECK(s <= 1e-18);
}

TEST_CASE("verify accepts a genuine probe and rejects an impostor") {
  const auto enroll = subject_beats(1, 15, 21);
  const auto genuine = subject_beats(1, 5, 22);
  const auto impostor = subject_beats(2, 5, 23);
  for (auto scheme : {decision::Scheme::bioconvolving, decision::Scheme::mace}) {
    const keys::AnyKey key =
        scheme == decision::Scheme::bioconvolving
            ? keys::AnyKey(keys::gen_bio_key(800, 4, 31))
            : keys::AnyKey(keys::gen_mace_key(16, 31));
    const auto entry = store::make_entry("s1", enroll, scheme, key, 1.5);
    const auto ok = decision::verify(genuine, key, entry);
    CHECK(ok.accept);
    CHECK(ok.score < entry.threshold.t_mse);
    const auto bad = decision::verify(impostor, key, entry);
    CHECK_FALSE(bad.accept);
  }
}

TEST_CASE("verify fails closed on scheme/key/shape mismatches") {
  const auto enroll = subject_beats(3, 15, 41);
  const keys::AnyKey bio_key = keys::gen_bio_key(800, 4, 1);
  const keys::AnyKey mace_key = keys::gen_mace_key(16, 1);
  const auto entry = store::make_entry("s3", enroll,
                                       decision::Scheme::bioconvolving, bio_key, 1.5);

  // Wrong key family.
  auto r = decision::verify(enroll, mace_key, entry);
  CHECK_FALSE(r.accept);
  CHECK_FALSE(r.reason.empty());

  // Wrong segment length.
  const keys::AnyKey short_key = keys::gen_bio_key(400, 4, 1);
  auto beats400 = enroll;
  for (auto& b : beats400) b.samples.resize(400);
  r = decision::verify(beats400, short_key, entry);
  CHECK_FALSE(r.accept);
  CHECK_FALSE(r.reason.empty());

  // Empty probe.
  r = decision::verify({}, bio_key, entry);
  CHECK_FALSE(r.accept);
}

TEST_CASE("acceptance is monotone in k_iqr") {
  const auto enroll = subject_beats(4, 15, 51);
  const auto probe = subject_beats(4, 3, 52);
  const keys::AnyKey key = keys::gen_bio_key(800, 4, 5);
  bool prev_accept = false;
  for (double k : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const auto entry = store::make_entry("s4", enroll,
                                         decision::Scheme::bioconvolving, key, k);
    const bool accept = decision::verify(probe, key, entry).accept;
    if (prev_accept) CHECK(accept);  // widening the fence cannot un-accept
    prev_accept = accept;
  }
}

TEST_CASE("wrong keys are rejected nearly always") {
  const auto enroll = subject_beats(5, 15, 61);
  const auto probe = subject_beats(5, 5, 62);
  for (auto scheme : {decision::Scheme::bioconvolving, decision::Scheme::mace}) {
    const keys::AnyKey key =
        scheme == decision::Scheme::bioconvolving
            ? keys::AnyKey(keys::gen_bio_key(800, 4, 1000))
            : keys::AnyKey(keys::gen_mace_key(16, 1000));
    const auto entry = store::make_entry("s5", enroll, scheme, key, 1.5);
    REQUIRE(decision::verify(probe, key, entry).accept);
    int rejects = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const keys::AnyKey wrong =
          scheme == decision::Scheme::bioconvolving
              ? keys::AnyKey(keys::gen_bio_key(800, 4, s))
              : keys::AnyKey(keys::gen_mace_key(16, s));
      if (!decision::verify(probe, wrong, entry).accept) ++rejects;
    }
    CHECK(rejects >= 99);
  }
}

TEST_CASE("probe_score matches the score reported by verify") {
  const auto enroll = subject_beats(6, 15, 71);
  const auto probe = subject_beats(6, 3, 72);
  const keys::AnyKey key = keys::gen_mace_key(16, 6);
  const auto entry = store::make_entry("s6", enroll, decision::Scheme::mace, key, 1.5);
  const double s = decision::probe_score(probe, key, entry);
  CHECK(decision::verify(probe, key, entry).score == s);
}
