// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cancelauth/eval.hpp"

using namespace cancelauth;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cancelauth_eval_tests";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::vector<ingest::EcgRecord> synth_corpus(int n_subjects, int n_beats,
                                            std::uint64_t seed) {
  std::vector<ingest::EcgRecord> records;
  for (int i = 0; i < n_subjects; ++i) {
    auto params = ingest::synth_params_for_subject(seed, i);
    params.rr_jitter_frac = 0.05;
    params.noise_std_mv = 0.02;
    auto rec = ingest::synth_subject(params, n_beats, 1000.0,
                                     seed + static_cast<std::uint64_t>(i));
    rec.subject_id = "s" + std::to_string(i);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<std::vector<preprocess::BeatSegment>> pools_of(
    const std::vector<ingest::EcgRecord>& records) {
  std::vector<std::vector<preprocess::BeatSegment>> pools;
  for (const auto& r : records)
    pools.push_back(preprocess::segment_beats(r, 0.8));
  return pools;
}

std::vector<std::string> ids_of(const std::vector<ingest::EcgRecord>& records) {
  std::vector<std::string> ids;
  for (const auto& r : records) ids.push_back(r.subject_id);
  return ids;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

eval::TrialScores hand_scores() {
  eval::SubjectScores s;
  s.subject_id = "h";
  s.enrollment_mses = {0.0, 2.0};  // q1 = 0.5, q3 = 1.5 -> t = 1.5 + k_iqr
  s.genuine = {2.0, 4.0};
  s.impostor = {2.2};
  eval::TrialScores ts;
  ts.per_subject.push_back(s);
  return ts;
}

}  // namespace

TEST_CASE("run_trials produces the expected trial counts") {
  const auto records = synth_corpus(4, 25, 900);
  eval::ExperimentConfig cfg;
  cfg.scheme = eval::Scheme::bioconvolving;
  cfg.n_trials = 3;
  cfg.n_en = 15;
  cfg.n_v = 3;
  const auto scores = eval::run_trials(pools_of(records), ids_of(records), cfg);
  CHECK(scores.per_subject.size() == 4);
  CHECK(scores.genuine_total() == 12);    // 4 subjects x 3 trials
  CHECK(scores.impostor_total() == 36);   // 4 x 3 other subjects x 3 trials
  for (const auto& s : scores.per_subject)
    CHECK(s.enrollment_mses.size() == 15);
}

TEST_CASE("run_trials is deterministic in the seed") {
  const auto records = synth_corpus(3, 25, 901);
  const auto pools = pools_of(records);
  const auto ids = ids_of(records);
  eval::ExperimentConfig cfg;
  cfg.scheme = eval::Scheme::mace;
  cfg.n_trials = 2;
  cfg.n_v = 3;
  cfg.rng_seed = 5;
  const auto a = eval::run_trials(pools, ids, cfg);
  const auto b = eval::run_trials(pools, ids, cfg);
  for (std::size_t i = 0; i < a.per_subject.size(); ++i) {
    CHECK(a.per_subject[i].genuine == b.per_subject[i].genuine);
    CHECK(a.per_subject[i].impostor == b.per_subject[i].impostor);
  }
  cfg.rng_seed = 6;
  const auto c = eval::run_trials(pools, ids, cfg);
  CHECK(a.per_subject[0].genuine != c.per_subject[0].genuine);
}

TEST_CASE("genuine scores sit below impostor scores") {
  const auto records = synth_corpus(5, 25, 902);
  const auto pools = pools_of(records);
  const auto ids = ids_of(records);
  for (auto scheme : {eval::Scheme::bioconvolving, eval::Scheme::mace}) {
    eval::ExperimentConfig cfg;
    cfg.scheme = scheme;
    cfg.n_trials = 5;
    cfg.n_v = 5;
    const auto scores = eval::run_trials(pools, ids, cfg);
    for (const auto& s : scores.per_subject)
      CHECK(median(s.genuine) < median(s.impostor));
  }
}

TEST_CASE("run_trials input validation") {
  const auto records = synth_corpus(2, 25, 903);
  const auto pools = pools_of(records);
  const auto ids = ids_of(records);
  eval::ExperimentConfig cfg;
  CHECK_THROWS(eval::run_trials({pools[0]}, {ids[0]}, cfg));  // 1 subject
  cfg.n_v = 50;  // n_v > n_en
  CHECK_THROWS(eval::run_trials(pools, ids, cfg));
  cfg.n_v = 10;
  cfg.n_en = 40;  // pool too small; error names the subject
  CHECK_THROWS_WITH_AS(eval::run_trials(pools, ids, cfg),
                       doctest::Contains("s0"), std::runtime_error);
}

TEST_CASE("random-key attack changes the impostor scores") {
  const auto records = synth_corpus(3, 25, 904);
  const auto pools = pools_of(records);
  const auto ids = ids_of(records);
  eval::ExperimentConfig cfg;
  cfg.scheme = eval::Scheme::bioconvolving;
  cfg.n_trials = 3;
  cfg.n_v = 3;
  const auto gk = eval::run_trials(pools, ids, cfg);
  cfg.attack = eval::AttackModel::random_key;
  const auto rk = eval::run_trials(pools, ids, cfg);
  CHECK(gk.per_subject[0].impostor != rk.per_subject[0].impostor);
  // Genuine trials are unaffected by the attack model.
  CHECK(gk.per_subject[0].genuine == rk.per_subject[0].genuine);
}

TEST_CASE("rates_at on hand-built scores") {
  const auto ts = hand_scores();
  // k = 0 -> t = 1.5: both genuine rejected, impostor rejected.
  auto [fpr0, fnr0] = eval::rates_at(ts, 0.0);
  CHECK(fpr0 == 0.0);
  CHECK(fnr0 == 1.0);
  // k = 1 -> t = 2.5: genuine 2.0 accepted, 4.0 rejected; impostor 2.2 accepted.
  auto [fpr1, fnr1] = eval::rates_at(ts, 1.0);
  CHECK(fpr1 == 1.0);
  CHECK(fnr1 == 0.5);
  // k = 3 -> t = 4.5: everything accepted.
  auto [fpr3, fnr3] = eval::rates_at(ts, 3.0);
  CHECK(fpr3 == 1.0);
  CHECK(fnr3 == 0.0);
  CHECK_THROWS(eval::rates_at(eval::TrialScores{}, 1.0));
}

TEST_CASE("find_eer interpolates between bracketing grid points") {
  const auto ts = hand_scores();
  // d(0) = fpr - fnr = -1, d(1) = +0.5: crossing at k* = 2/3, rate 2/3.
  const auto eer = eval::find_eer(ts, {0.0, 1.0});
  CHECK(eer.k_iqr_star == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(eer.eer == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS(eval::find_eer(ts, {}));
}

TEST_CASE("find_eer returns an exact grid point when rates tie") {
  eval::SubjectScores s;
  s.subject_id = "p";
  s.enrollment_mses = {0.0, 2.0};  // t = 1.5 + k
  s.genuine = {1.0};
  s.impostor = {50.0};
  eval::TrialScores ts;
  ts.per_subject.push_back(s);
  // Already separated at k = 0: fpr = fnr = 0.
  const auto eer = eval::find_eer(ts, eval::default_k_iqr_grid());
  CHECK(eer.eer == 0.0);
  CHECK(eer.k_iqr_star == 0.0);
}

TEST_CASE("find_eer extends the grid when no crossing is covered") {
  eval::SubjectScores s;
  s.subject_id = "x";
  s.enrollment_mses = {0.0, 1.0};  // t = 0.75 + 0.5 k
  s.genuine = {10.0};
  s.impostor = {100.0};
  eval::TrialScores ts;
  ts.per_subject.push_back(s);
  // Separation happens around k = 18.5, beyond the default 0..10 grid.
  const auto eer = eval::find_eer(ts, eval::default_k_iqr_grid());
  CHECK(eer.eer == 0.0);
  CHECK(eer.k_iqr_star > 10.0);
}

TEST_CASE("default grid is 0 to 10 in steps of 0.1") {
  const auto grid = eval::default_k_iqr_grid();
  REQUIRE(grid.size() == 101);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(grid[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("run_grid fills every cell and the rate curves are monotone") {
  const auto records = synth_corpus(5, 25, 905);
  eval::GridConfig cfg;
  cfg.schemes = {eval::Scheme::bioconvolving, eval::Scheme::mace};
  cfg.downsample_factors = {1, 2};
  cfg.n_v_list = {1, 3};
  cfg.n_trials = 3;
  cfg.k_iqr_grid = {0.0, 1.0, 2.0, 4.0, 8.0};
  const auto report = eval::run_grid(records, cfg);

  REQUIRE(report.summary.size() == 8);  // 2 factors x 2 schemes x 2 n_v
  for (const auto& cell : report.summary) CHECK(cell.error.empty());
  CHECK(report.rows.size() == 8 * 5);

  // Monotone within each cell: fpr nondecreasing, fnr nonincreasing in k.
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& prev = report.rows[i - 1];
    const auto& row = report.rows[i];
    if (row.k_iqr <= prev.k_iqr) continue;  // new cell begins
    CHECK(row.fpr >= prev.fpr);
    CHECK(row.fnr <= prev.fnr);
  }
  // Downsampled cells report the decimated rate.
  CHECK(report.summary.front().fs_hz == 1000.0);
  CHECK(report.summary.back().fs_hz == 500.0);
}

TEST_CASE("run_grid captures per-cell errors without aborting") {
  const auto records = synth_corpus(3, 25, 906);
  eval::GridConfig cfg;
  cfg.schemes = {eval::Scheme::bioconvolving};
  cfg.downsample_factors = {1};
  cfg.n_v_list = {1, 50};  // 50 > n_en is a cell-level error
  cfg.n_trials = 2;
  cfg.k_iqr_grid = {0.0, 2.0, 8.0};
  const auto report = eval::run_grid(records, cfg);
  REQUIRE(report.summary.size() == 2);
  CHECK(report.summary[0].error.empty());
  CHECK_FALSE(report.summary[1].error.empty());
}

TEST_CASE("CSV outputs are byte-identical across identical runs") {
  const auto records = synth_corpus(3, 25, 907);
  eval::GridConfig cfg;
  cfg.schemes = {eval::Scheme::mace};
  cfg.downsample_factors = {1};
  cfg.n_v_list = {1};
  cfg.n_trials = 2;
  cfg.k_iqr_grid = {0.0, 1.0, 2.0};
  cfg.score_dump_prefix = temp_path("dump_a");

  const auto r1 = eval::run_grid(records, cfg);
  eval::write_report_csv(temp_path("rep1.csv"), r1);
  eval::write_summary_csv(temp_path("sum1.csv"), r1);

  cfg.score_dump_prefix = temp_path("dump_b");
  const auto r2 = eval::run_grid(records, cfg);
  eval::write_report_csv(temp_path("rep2.csv"), r2);
  eval::write_summary_csv(temp_path("sum2.csv"), r2);

  CHECK(slurp(temp_path("rep1.csv")) == slurp(temp_path("rep2.csv")));
  CHECK(slurp(temp_path("sum1.csv")) == slurp(temp_path("sum2.csv")));
  CHECK(slurp(temp_path("dump_a_mace_r1_nv1.csv")) ==
        slurp(temp_path("dump_b_mace_r1_nv1.csv")));

  const std::string report_text = slurp(temp_path("rep1.csv"));
  CHECK(report_text.rfind("scheme,fs_hz,n_en,n_v,k_iqr,fpr,fnr\n", 0) == 0);
  CHECK(slurp(temp_path("sum1.csv"))
            .rfind("scheme,fs_hz,n_en,n_v,eer,k_iqr_star\n", 0) == 0);
  CHECK(slurp(temp_path("dump_a_mace_r1_nv1.csv"))
            .rfind("subject_id,trial,role,score\n", 0) == 0);
}
