// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "cancelauth/rng.hpp"
#include "cancelauth/store.hpp"

namespace cancelauth::eval {

namespace {

// Stream labels for per-(subject, trial) RNG derivation.
enum : std::uint64_t {
  kEnrollStream = 1,
  kKeyStream = 2,
  kGenuineStream = 3,
  kImpostorStream = 4,
  kAttackKeyStream = 5
};

std::vector<std::size_t> sample_without_replacement(std::mt19937_64& eng,
                                                    std::size_t pool_size,
                                                    std::size_t count) {
  std::vector<std::size_t> idx(pool_size);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool_size - 1);
    std::swap(idx[i], idx[pick(eng)]);
  }
  idx.resize(count);
  return idx;
}

std::vector<preprocess::BeatSegment> gather(
    const std::vector<preprocess::BeatSegment>& pool,
    const std::vector<std::size_t>& idx) {
  std::vector<preprocess::BeatSegment> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(pool[i]);
  return out;
}

keys::AnyKey make_key(Scheme scheme, int l, int bio_k, int mace_k,
                      std::uint64_t seed) {
  if (scheme == Scheme::bioconvolving)
    return keys::gen_bio_key(l, bio_k, seed);
  return keys::gen_mace_key(mace_k, seed);
}

const char* scheme_csv(Scheme s) { return s == Scheme::bioconvolving ? "bioconvolving" : "mace"; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::size_t TrialScores::genuine_total() const {
  std::size_t n = 0;
  for (const auto& s : per_subject) n += s.genuine.size();
  return n;
}

std::size_t TrialScores::impostor_total() const {
  std::size_t n = 0;
  for (const auto& s : per_subject) n += s.impostor.size();
  return n;
}

TrialScores run_trials(
    const std::vector<std::vector<preprocess::BeatSegment>>& pools,
    const std::vector<std::string>& subject_ids,
    const ExperimentConfig& config) {
  const std::size_t n_subjects = pools.size();
  if (n_subjects < 2)
    throw std::invalid_argument("run_trials: need at least 2 subjects");
  if (subject_ids.size() != n_subjects)
    throw std::invalid_argument("run_trials: ids/pools size mismatch");
  if (config.n_v > config.n_en)
    throw std::invalid_argument("run_trials: n_v must not exceed n_en");
  const auto need = static_cast<std::size_t>(config.n_en + config.n_v);
  for (std::size_t s = 0; s < n_subjects; ++s) {
    if (pools[s].size() < need)
      throw std::runtime_error("run_trials: subject '" + subject_ids[s] +
                               "' has " + std::to_string(pools[s].size()) +
                               " beats, needs " + std::to_string(need));
  }
  const int l = static_cast<int>(pools.front().front().samples.size());

  TrialScores scores;
  scores.per_subject.resize(n_subjects);

  for (std::size_t s = 0; s < n_subjects; ++s) {
    auto& subj = scores.per_subject[s];
    subj.subject_id = subject_ids[s];

    auto enroll_eng = rng::engine(rng::derive(config.rng_seed, kEnrollStream, s));
    const auto enroll_idx = sample_without_replacement(
        enroll_eng, pools[s].size(), static_cast<std::size_t>(config.n_en));
    std::vector<bool> in_enroll(pools[s].size(), false);
    for (std::size_t i : enroll_idx) in_enroll[i] = true;
    std::vector<preprocess::BeatSegment> heldout;
    for (std::size_t i = 0; i < pools[s].size(); ++i)
      if (!in_enroll[i]) heldout.push_back(pools[s][i]);

    const keys::AnyKey key =
        make_key(config.scheme, l, config.bio_k, config.mace_k,
                 rng::derive(config.rng_seed, kKeyStream, s));
    const store::SubjectEntry entry = store::make_entry(
        subject_ids[s], gather(pools[s], enroll_idx), config.scheme, key, 1.5);
    subj.enrollment_mses = entry.threshold.enrollment_mses;

    for (int t = 0; t < config.n_trials; ++t) {
      auto eng = rng::engine(rng::derive(config.rng_seed, kGenuineStream, s, t));
      const auto idx = sample_without_replacement(
          eng, heldout.size(), static_cast<std::size_t>(config.n_v));
      subj.genuine.push_back(decision::probe_score(gather(heldout, idx), key, entry));
    }

    for (std::size_t o = 0; o < n_subjects; ++o) {
      if (o == s) continue;
      for (int t = 0; t < config.n_trials; ++t) {
        auto eng =
            rng::engine(rng::derive(config.rng_seed, kImpostorStream, s, o, t));
        const auto idx = sample_without_replacement(
            eng, pools[o].size(), static_cast<std::size_t>(config.n_v));
        keys::AnyKey presented = key;
        if (config.attack == AttackModel::random_key) {
          presented = make_key(config.scheme, l, config.bio_k, config.mace_k,
                               rng::derive(config.rng_seed, kAttackKeyStream,
                                           s, o, t));
        }
        subj.impostor.push_back(
            decision::probe_score(gather(pools[o], idx), presented, entry));
      }
    }
  }
  return scores;
}

std::pair<double, double> rates_at(const TrialScores& scores, double k_iqr) {
  std::size_t genuine_total = 0, impostor_total = 0;
  std::size_t false_rejects = 0, false_accepts = 0;
  for (const auto& s : scores.per_subject) {
    const auto model = decision::compute_threshold(s.enrollment_mses, k_iqr);
    std::size_t gen_acc = 0, imp_acc = 0;
    for (double v : s.genuine)
      if (v < model.t_mse) ++gen_acc;
    for (double v : s.impostor)
      if (v < model.t_mse) ++imp_acc;
    // conservation: every trial is either accepted or rejected
    false_rejects += s.genuine.size() - gen_acc;
    false_accepts += imp_acc;
    genuine_total += s.genuine.size();
    impostor_total += s.impostor.size();
  }
  if (genuine_total == 0 || impostor_total == 0)
    throw std::invalid_argument("rates_at: empty score populations");
  return {static_cast<double>(false_accepts) / static_cast<double>(impostor_total),
          static_cast<double>(false_rejects) / static_cast<double>(genuine_total)};
}

std::vector<double> default_k_iqr_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  return grid;
}

EerResult find_eer(const TrialScores& scores, std::vector<double> grid) {
  if (grid.empty()) throw std::invalid_argument("find_eer: empty grid");
  constexpr double kGridCap = 1e7;
  for (;;) {
    std::vector<double> fprs(grid.size()), fnrs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto [fpr, fnr] = rates_at(scores, grid[i]);
      fprs[i] = fpr;
      fnrs[i] = fnr;
      if (fpr == fnr) return {fpr, grid[i]};
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double d0 = fprs[i] - fnrs[i];
      const double d1 = fprs[i + 1] - fnrs[i + 1];
      if ((d0 < 0.0) != (d1 < 0.0)) {
        const double t = d0 / (d0 - d1);
        const double k_star = grid[i] + t * (grid[i + 1] - grid[i]);
        const double rate = fprs[i] + t * (fprs[i + 1] - fprs[i]);
        return {rate, k_star};
      }
    }
    if (grid.back() >= kGridCap)
      throw std::runtime_error(
          "find_eer: no FPR/FNR crossing up to k_iqr = " +
          std::to_string(grid.back()) + "; extend the grid");
    // Double the covered range, same point count.
    const double lo = grid.back();
    const double hi = 2.0 * std::max(lo, 1.0);
    const std::size_t n = grid.size();
    grid.clear();
    for (std::size_t i = 0; i <= n; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(n));
  }
}

EvalReport run_grid(const std::vector<ingest::EcgRecord>& cleaned_records,
                    const GridConfig& config) {
  if (cleaned_records.size() < 2)
    throw std::invalid_argument("run_grid: need at least 2 subjects");
  if (config.downsample_factors.empty() || config.n_v_list.empty() ||
      config.schemes.empty() || config.k_iqr_grid.empty())
    throw std::invalid_argument("run_grid: empty grid axis");

  std::vector<std::string> ids;
  for (const auto& r : cleaned_records) ids.push_back(r.subject_id);

  EvalReport report;
  for (int r : config.downsample_factors) {
    // One decimation + segmentation pass per factor, shared across cells.
    std::vector<std::vector<preprocess::BeatSegment>> pools;
    double fs = 0.0;
    std::string prep_error;
    try {
      for (const auto& rec : cleaned_records) {
        const ingest::EcgRecord dec = preprocess::decimate_record(rec, r);
        pools.push_back(
            preprocess::segment_beats(dec, config.segment_duration_s));
        fs = dec.sample_rate_hz;
      }
    } catch (const std::exception& e) {
      prep_error = e.what();
    }

    for (Scheme scheme : config.schemes) {
      for (int n_v : config.n_v_list) {
        SummaryRow cell;
        cell.scheme = scheme;
        cell.fs_hz = fs;
        cell.n_en = config.n_en;
        cell.n_v = n_v;
        if (!prep_error.empty()) {
          cell.error = prep_error;
          report.summary.push_back(cell);
          continue;
        }
        try {
          ExperimentConfig ec;
          ec.scheme = scheme;
          ec.n_trials = config.n_trials;
          ec.n_en = config.n_en;
          ec.n_v = n_v;
          ec.bio_k = config.bio_k;
          ec.mace_k = config.mace_k;
          ec.attack = config.attack;
          ec.rng_seed = rng::derive(config.rng_seed, 0xCE11u,
                                    static_cast<std::uint64_t>(r),
                                    static_cast<std::uint64_t>(scheme), n_v);
          const TrialScores scores = run_trials(pools, ids, ec);

          double prev_fpr = -1.0, prev_fnr = 2.0;
          for (double k : config.k_iqr_grid) {
            const auto [fpr, fnr] = rates_at(scores, k);
            if (fpr + 1e-12 < prev_fpr || fnr - 1e-12 > prev_fnr)
              throw std::logic_error("run_grid: non-monotone rate curve");
            prev_fpr = fpr;
            prev_fnr = fnr;
            report.rows.push_back(
                {scheme, fs, config.n_en, n_v, k, fpr, fnr});
          }
          const EerResult eer = find_eer(scores, config.k_iqr_grid);
          cell.eer = eer.eer;
          cell.k_iqr_star = eer.k_iqr_star;

          if (!config.score_dump_prefix.empty()) {
            char suffix[64];
            std::snprintf(suffix, sizeof(suffix), "_%s_r%d_nv%d.csv",
                          scheme_csv(scheme), r, n_v);
            write_scores_csv(config.score_dump_prefix + suffix, scores);
          }
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        report.summary.push_back(cell);
      }
    }
  }
  return report;
}

void write_report_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "scheme,fs_hz,n_en,n_v,k_iqr,fpr,fnr\n";
  for (const auto& row : report.rows) {
    out << scheme_csv(row.scheme) << "," << fmt(row.fs_hz) << "," << row.n_en
        << "," << row.n_v << "," << fmt(row.k_iqr) << "," << fmt(row.fpr)
        << "," << fmt(row.fnr) << "\n";
  }
}

void write_summary_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "scheme,fs_hz,n_en,n_v,eer,k_iqr_star\n";
  for (const auto& row : report.summary) {
    out << scheme_csv(row.scheme) << "," << fmt(row.fs_hz) << "," << row.n_en
        << "," << row.n_v << ",";
    if (row.error.empty())
      out << fmt(row.eer) << "," << fmt(row.k_iqr_star) << "\n";
    else
      out << "ERROR," << row.error << "\n";
  }
}

void write_scores_csv(const std::string& path, const TrialScores& scores) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "subject_id,trial,role,score\n";
  for (const auto& s : scores.per_subject) {
    for (std::size_t t = 0; t < s.genuine.size(); ++t)
      out << s.subject_id << "," << t << ",genuine," << fmt(s.genuine[t]) << "\n";
    for (std::size_t t = 0; t < s.impostor.size(); ++t)
      out << s.subject_id << "," << t << ",impostor," << fmt(s.impostor[t]) << "\n";
  }
}

}  // namespace cancelauth::eval
