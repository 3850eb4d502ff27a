// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

// cancelauth: two-factor cancelable ECG verification CLI.
//
// Exit status discipline: 0 = accept/success, 1 = reject, 2 = operational
// error (bad flags, I/O failures, malformed inputs).

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cancelauth/rng.hpp"

#include "cancelauth/bioconv.hpp"
#include "cancelauth/decision.hpp"
#include "cancelauth/eval.hpp"
#include "cancelauth/ingest.hpp"
#include "cancelauth/keys.hpp"
#include "cancelauth/mace.hpp"
#include "cancelauth/preprocess.hpp"
#include "cancelauth/store.hpp"

namespace fs = std::filesystem;
using namespace cancelauth;

namespace {

struct PrepFlags {
  double fs = 1000.0;
  int downsample = 1;
  double notch_freq = 50.0;
  double notch_bw = 1.0;
  double median_win1 = 200.0;
  double median_win2 = 600.0;
  double segment_s = 0.8;
};

void add_prep_flags(CLI::App* cmd, PrepFlags& p) {
  cmd->add_option("--fs", p.fs, "Sampling rate of the input signal (Hz)");
  cmd->add_option("--downsample", p.downsample, "Decimation factor r");
  cmd->add_option("--notch-freq", p.notch_freq, "Power-line notch frequency (Hz)");
  cmd->add_option("--notch-bw", p.notch_bw, "Notch bandwidth (Hz)");
  cmd->add_option("--median-win1", p.median_win1, "First median window (ms)");
  cmd->add_option("--median-win2", p.median_win2, "Second median window (ms)");
  cmd->add_option("--segment-duration", p.segment_s, "Beat segment length (s)");
}

preprocess::PreprocessConfig to_config(const PrepFlags& p) {
  preprocess::PreprocessConfig c;
  c.median_win1_ms = p.median_win1;
  c.median_win2_ms = p.median_win2;
  c.notch_freq_hz = p.notch_freq;
  c.notch_bandwidth_hz = p.notch_bw;
  c.segment_duration_s = p.segment_s;
  c.downsample_factor = p.downsample;
  return c;
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t seed) {
  if (opt->count()) return seed;
  std::random_device rd;
  const std::uint64_t s =
      (static_cast<std::uint64_t>(rd()) << 32) | rd();
  std::fprintf(stderr, "seed: %llu\n", static_cast<unsigned long long>(s));
  return s;
}

// Load a signal, attach .rpk annotations when present (detector otherwise),
// clean, decimate, and cut into beats.
std::vector<preprocess::BeatSegment> beats_from_file(const std::string& path,
                                                     const PrepFlags& prep,
                                                     const std::string& id) {
  ingest::EcgRecord rec = ingest::load_record(path, prep.fs, id);
  const std::string rpk = ingest::annotation_path_for(path);
  if (fs::exists(rpk))
    rec.r_peaks = ingest::load_annotations(rpk, rec.samples.size());
  ingest::EcgRecord cleaned = preprocess::clean_record(rec, to_config(prep));
  if (cleaned.r_peaks.empty()) cleaned.r_peaks = ingest::detect_r_peaks(cleaned);
  const ingest::EcgRecord ready =
      preprocess::decimate_record(cleaned, prep.downsample);
  return preprocess::segment_beats(ready, prep.segment_s);
}

int cmd_synth(int subjects, int beats, double fs, std::uint64_t seed,
              const std::string& out_dir, double rr_jitter, double noise) {
  fs::create_directories(out_dir);
  for (int i = 0; i < subjects; ++i) {
    ingest::SynthSubjectParams params = ingest::synth_params_for_subject(seed, i);
    params.rr_jitter_frac = rr_jitter;
    params.noise_std_mv = noise;
    const ingest::EcgRecord rec = ingest::synth_subject(
        params, beats, fs, rng::derive(seed, 0x0DA7Au, i));
    char name[32];
    std::snprintf(name, sizeof(name), "subject_%03d", i);
    const std::string base = out_dir + "/" + name;
    ingest::save_record(base + ".txt", rec);
    ingest::save_annotations(base + ".rpk", rec.r_peaks);
  }
  std::printf("wrote %d subjects to %s\n", subjects, out_dir.c_str());
  return 0;
}

int cmd_preprocess(const std::string& signal, const PrepFlags& prep,
                   const std::string& out, const std::string& peaks_out) {
  ingest::EcgRecord rec = ingest::load_record(signal, prep.fs, "anon");
  ingest::EcgRecord cleaned = preprocess::clean_record(rec, to_config(prep));
  if (cleaned.r_peaks.empty()) cleaned.r_peaks = ingest::detect_r_peaks(cleaned);
  const ingest::EcgRecord ready =
      preprocess::decimate_record(cleaned, prep.downsample);
  if (!out.empty()) ingest::save_record(out, ready);
  if (!peaks_out.empty()) ingest::save_annotations(peaks_out, ready.r_peaks);
  std::printf("%zu samples at %g Hz, %zu R peaks\n", ready.samples.size(),
              ready.sample_rate_hz, ready.r_peaks.size());
  return 0;
}

int cmd_enroll(const std::string& store_path, const std::string& id,
               const std::string& scheme_str, const std::string& signal,
               const std::string& key_out, int n_en, double k_iqr, int bio_k,
               int mace_k, std::uint64_t seed, const PrepFlags& prep,
               bool revoke) {
  const decision::Scheme scheme = decision::scheme_from_name(scheme_str);
  auto beats = beats_from_file(signal, prep, id);
  if (static_cast<int>(beats.size()) < n_en)
    throw std::runtime_error("enroll: only " + std::to_string(beats.size()) +
                             " usable beats, need " + std::to_string(n_en));
  beats.resize(static_cast<std::size_t>(n_en));
  const int l = static_cast<int>(beats.front().samples.size());

  const keys::AnyKey key =
      scheme == decision::Scheme::bioconvolving
          ? keys::AnyKey(keys::gen_bio_key(l, bio_k, seed))
          : keys::AnyKey(keys::gen_mace_key(mace_k, seed));

  store::Store db;
  if (fs::exists(store_path)) db = store::Store::load(store_path);
  if (revoke)
    db.revoke_and_reenroll(id, beats, scheme, key, k_iqr);
  else
    db.enroll(id, beats, scheme, key, k_iqr);
  db.save(store_path);
  keys::save_key(key_out, key);
  std::printf("%s %s under %s (N_en=%d, l=%d)\n",
              revoke ? "re-enrolled" : "enrolled", id.c_str(),
              decision::scheme_name(scheme).c_str(), n_en, l);
  return 0;
}

int cmd_verify(const std::string& store_path, const std::string& id,
               const std::string& scheme_str, const std::string& signal,
               const std::string& key_path, int n_v, const PrepFlags& prep) {
  const decision::Scheme scheme = decision::scheme_from_name(scheme_str);
  const store::Store db = store::Store::load(store_path);
  const store::SubjectEntry& entry = db.get_entry(id, scheme);

  keys::AnyKey key;
  try {
    key = keys::load_key(key_path);
  } catch (const std::exception& e) {
    std::printf("REJECT inf %s\n", e.what());
    return 1;
  }

  decision::VerifyResult result;
  try {
    auto beats = beats_from_file(signal, prep, id);
    if (static_cast<int>(beats.size()) < n_v)
      throw std::runtime_error("only " + std::to_string(beats.size()) +
                               " usable beats, need " + std::to_string(n_v));
    beats.resize(static_cast<std::size_t>(n_v));
    result = decision::verify(beats, key, entry);
  } catch (const std::exception& e) {
    result.accept = false;
    result.score = std::numeric_limits<double>::infinity();
    result.reason = e.what();
  }

  if (result.accept) {
    std::printf("ACCEPT %.17g\n", result.score);
    return 0;
  }
  std::string reason = result.reason;
  if (keys::key_fingerprint(key) != entry.key_fingerprint)
    reason += " (key fingerprint mismatch)";
  std::printf("REJECT %.17g %s\n", result.score, reason.c_str());
  return 1;
}

int cmd_evaluate(const std::string& data_dir, const std::string& scheme_str,
                 int n_en, const std::string& n_v_list,
                 const std::string& downsample_list, int trials,
                 std::uint64_t seed, const std::string& out,
                 const std::string& summary_out, const std::string& dump_prefix,
                 const std::string& attack, int bio_k, int mace_k,
                 double kiqr_max, double kiqr_step, const PrepFlags& prep) {
  eval::GridConfig config;
  config.schemes.clear();
  if (scheme_str == "both") {
    config.schemes = {decision::Scheme::bioconvolving, decision::Scheme::mace};
  } else {
    config.schemes = {decision::scheme_from_name(scheme_str)};
  }
  config.n_en = n_en;
  config.n_trials = trials;
  config.rng_seed = seed;
  config.bio_k = bio_k;
  config.mace_k = mace_k;
  config.segment_duration_s = prep.segment_s;
  config.score_dump_prefix = dump_prefix;
  config.attack = attack == "random-key" ? eval::AttackModel::random_key
                                         : eval::AttackModel::genuine_key;
  config.n_v_list.clear();
  for (const auto& tok : CLI::detail::split(n_v_list, ','))
    config.n_v_list.push_back(std::stoi(tok));
  config.downsample_factors.clear();
  for (const auto& tok : CLI::detail::split(downsample_list, ','))
    config.downsample_factors.push_back(std::stoi(tok));
  config.k_iqr_grid.clear();
  for (double k = 0.0; k <= kiqr_max + 1e-9; k += kiqr_step)
    config.k_iqr_grid.push_back(k);

  // Corpus: every .txt in the directory, sorted, with .rpk sidecars.
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(data_dir))
    if (e.path().extension() == ".txt") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.size() < 2)
    throw std::runtime_error("evaluate: need at least 2 subject files in " +
                             data_dir);

  std::vector<ingest::EcgRecord> cleaned;
  for (const auto& f : files) {
    const std::string id = fs::path(f).stem().string();
    ingest::EcgRecord rec = ingest::load_record(f, prep.fs, id);
    const std::string rpk = ingest::annotation_path_for(f);
    if (fs::exists(rpk))
      rec.r_peaks = ingest::load_annotations(rpk, rec.samples.size());
    ingest::EcgRecord c = preprocess::clean_record(rec, to_config(prep));
    if (c.r_peaks.empty()) c.r_peaks = ingest::detect_r_peaks(c);
    cleaned.push_back(std::move(c));
  }

  const eval::EvalReport report = eval::run_grid(cleaned, config);
  eval::write_report_csv(out, report);
  const std::string sum_path =
      summary_out.empty()
          ? (out.size() > 4 && out.substr(out.size() - 4) == ".csv"
                 ? out.substr(0, out.size() - 4) + "_summary.csv"
                 : out + "_summary.csv")
          : summary_out;
  eval::write_summary_csv(sum_path, report);

  int status = 0;
  for (const auto& row : report.summary) {
    if (!row.error.empty()) {
      std::fprintf(stderr, "cell %s fs=%g n_v=%d failed: %s\n",
                   decision::scheme_name(row.scheme).c_str(), row.fs_hz,
                   row.n_v, row.error.c_str());
      status = 2;
    } else {
      std::printf("%s fs=%g n_en=%d n_v=%d eer=%.4f k_iqr*=%.3f\n",
                  decision::scheme_name(row.scheme).c_str(), row.fs_hz,
                  row.n_en, row.n_v, row.eer, row.k_iqr_star);
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-factor cancelable ECG biometric verification"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic ECG corpus");
  int sy_subjects = 30, sy_beats = 48;
  double sy_fs = 1000.0, sy_jitter = 0.05, sy_noise = 0.02;
  std::uint64_t sy_seed = 0;
  std::string sy_out;
  synth->add_option("--subjects", sy_subjects, "Number of subjects");
  synth->add_option("--beats", sy_beats, "Beats per subject");
  synth->add_option("--fs", sy_fs, "Sampling rate (Hz)");
  auto* sy_seed_opt = synth->add_option("--seed", sy_seed, "RNG seed");
  synth->add_option("--out", sy_out, "Output directory")->required();
  synth->add_option("--rr-jitter", sy_jitter, "RR jitter fraction");
  synth->add_option("--noise", sy_noise, "Additive noise std (mV)");

  // preprocess
  auto* prepc = app.add_subcommand("preprocess", "Clean and decimate a signal");
  PrepFlags pp;
  std::string pp_signal, pp_out, pp_peaks_out;
  prepc->add_option("--signal", pp_signal, "Input signal file")->required();
  prepc->add_option("--out", pp_out, "Cleaned signal output file");
  prepc->add_option("--peaks-out", pp_peaks_out, "Detected R-peak output file");
  add_prep_flags(prepc, pp);

  // enroll / revoke share flags
  PrepFlags ep, rp;
  std::string e_store, e_id, e_scheme, e_signal, e_keyout;
  int e_nen = 15, e_biok = 4, e_macek = 16;
  double e_kiqr = 1.5;
  std::uint64_t e_seed = 0;
  auto* enroll = app.add_subcommand("enroll", "Enroll a subject");
  enroll->add_option("--store", e_store, "Store file")->required();
  enroll->add_option("--id", e_id, "Subject id")->required();
  enroll->add_option("--scheme", e_scheme, "bio|mace")->required();
  enroll->add_option("--signal", e_signal, "ECG signal file")->required();
  enroll->add_option("--key-out", e_keyout, "Key output file")->required();
  enroll->add_option("--n-en", e_nen, "Enrollment beats");
  enroll->add_option("--kiqr", e_kiqr, "Fence parameter k_iqr");
  enroll->add_option("--bio-k", e_biok, "Bioconvolving piece count");
  enroll->add_option("--mace-k", e_macek, "MACE key tap count");
  auto* e_seed_opt = enroll->add_option("--seed", e_seed, "Key RNG seed");
  add_prep_flags(enroll, ep);

  std::string r_store, r_id, r_scheme, r_signal, r_keyout;
  int r_nen = 15, r_biok = 4, r_macek = 16;
  double r_kiqr = 1.5;
  std::uint64_t r_seed = 0;
  auto* revoke = app.add_subcommand("revoke", "Revoke and re-enroll with a new key");
  revoke->add_option("--store", r_store, "Store file")->required();
  revoke->add_option("--id", r_id, "Subject id")->required();
  revoke->add_option("--scheme", r_scheme, "bio|mace")->required();
  revoke->add_option("--signal", r_signal, "ECG signal file")->required();
  revoke->add_option("--key-out", r_keyout, "New key output file")->required();
  revoke->add_option("--n-en", r_nen, "Enrollment beats");
  revoke->add_option("--kiqr", r_kiqr, "Fence parameter k_iqr");
  revoke->add_option("--bio-k", r_biok, "Bioconvolving piece count");
  revoke->add_option("--mace-k", r_macek, "MACE key tap count");
  auto* r_seed_opt = revoke->add_option("--seed", r_seed, "Key RNG seed");
  add_prep_flags(revoke, rp);

  // verify
  PrepFlags vp;
  std::string v_store, v_id, v_scheme, v_signal, v_key;
  int v_nv = 1;
  auto* verify = app.add_subcommand("verify", "Verify a claimed identity");
  verify->add_option("--store", v_store, "Store file")->required();
  verify->add_option("--id", v_id, "Claimed subject id")->required();
  verify->add_option("--scheme", v_scheme, "bio|mace")->required();
  verify->add_option("--signal", v_signal, "ECG signal file")->required();
  verify->add_option("--key", v_key, "Key file (second factor)")->required();
  verify->add_option("--n-v", v_nv, "Verification beats");
  add_prep_flags(verify, vp);

  // evaluate
  PrepFlags gp;
  std::string g_data, g_scheme = "both", g_nv = "1,3,5,10",
              g_factors = "1,2,4,8", g_out = "report.csv", g_summary, g_dump,
              g_attack = "genuine-key";
  int g_nen = 15, g_trials = 10, g_biok = 4, g_macek = 16;
  double g_kiqr_max = 10.0, g_kiqr_step = 0.1;
  std::uint64_t g_seed = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Run the FPR/FNR/EER grid");
  evaluate->add_option("--data", g_data, "Corpus directory")->required();
  evaluate->add_option("--scheme", g_scheme, "bio|mace|both");
  evaluate->add_option("--n-en", g_nen, "Enrollment beats");
  evaluate->add_option("--n-v-list", g_nv, "Comma list of N_v values");
  evaluate->add_option("--downsample-list", g_factors, "Comma list of factors r");
  evaluate->add_option("--trials", g_trials, "Trials per subject / pair");
  auto* g_seed_opt = evaluate->add_option("--seed", g_seed, "RNG seed");
  evaluate->add_option("--out", g_out, "Report CSV path");
  evaluate->add_option("--summary-out", g_summary, "Summary CSV path");
  evaluate->add_option("--dump-scores", g_dump, "Per-cell score CSV prefix");
  evaluate->add_option("--attack", g_attack, "genuine-key|random-key");
  evaluate->add_option("--bio-k", g_biok, "Bioconvolving piece count");
  evaluate->add_option("--mace-k", g_macek, "MACE key tap count");
  evaluate->add_option("--kiqr-max", g_kiqr_max, "Upper end of k_iqr grid");
  evaluate->add_option("--kiqr-step", g_kiqr_step, "k_iqr grid step");
  add_prep_flags(evaluate, gp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed())
      return cmd_synth(sy_subjects, sy_beats, sy_fs,
                       resolve_seed(sy_seed_opt, sy_seed), sy_out, sy_jitter,
                       sy_noise);
    if (prepc->parsed()) return cmd_preprocess(pp_signal, pp, pp_out, pp_peaks_out);
    if (enroll->parsed())
      return cmd_enroll(e_store, e_id, e_scheme, e_signal, e_keyout, e_nen,
                        e_kiqr, e_biok, e_macek,
                        resolve_seed(e_seed_opt, e_seed), ep, false);
    if (revoke->parsed())
      return cmd_enroll(r_store, r_id, r_scheme, r_signal, r_keyout, r_nen,
                        r_kiqr, r_biok, r_macek,
                        resolve_seed(r_seed_opt, r_seed), rp, true);
    if (verify->parsed())
      return cmd_verify(v_store, v_id, v_scheme, v_signal, v_key, v_nv, vp);
    if (evaluate->parsed())
      return cmd_evaluate(g_data, g_scheme, g_nen, g_nv, g_factors, g_trials,
                          resolve_seed(g_seed_opt, g_seed), g_out, g_summary,
                          g_dump, g_attack, g_biok, g_macek, g_kiqr_max,
                          g_kiqr_step, gp);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
