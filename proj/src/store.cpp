// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/store.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cancelauth::store {

namespace {

constexpr const char* kHeader = "CANCELAUTH-STORE v1";

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_vector(std::ostream& out, const std::string& name,
                  const std::vector<double>& v) {
  out << "DATA " << name << " " << v.size() << " ";
  char buf[64];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    out << buf;
  }
  out << "\n";
}

std::vector<double> parse_vector(const std::string& line, std::string* name) {
  std::istringstream in(line);
  std::string tag;
  std::size_t len = 0;
  std::string payload;
  in >> tag >> *name >> len >> payload;
  if (tag != "DATA" || in.fail())
    throw std::runtime_error("store: malformed DATA line: " + line);
  std::vector<double> v;
  v.reserve(len);
  std::istringstream items(payload);
  std::string item;
  while (std::getline(items, item, ',')) v.push_back(std::stod(item));
  if (v.size() != len)
    throw std::runtime_error("store: DATA length mismatch for " + *name);
  return v;
}

void check_beats(const std::vector<preprocess::BeatSegment>& beats) {
  if (beats.size() < 2)
    throw std::invalid_argument("enroll: need at least 2 beats (N_en >= 2)");
}

}  // namespace

SubjectEntry make_entry(const std::string& subject_id,
                        const std::vector<preprocess::BeatSegment>& beats,
                        decision::Scheme scheme, const keys::AnyKey& key,
                        double k_iqr) {
  check_beats(beats);
  SubjectEntry entry;
  entry.subject_id = subject_id;
  entry.scheme = scheme;
  entry.created_at = now_iso8601();
  entry.key_fingerprint = keys::key_fingerprint(key);

  if (scheme == decision::Scheme::bioconvolving) {
    const auto* bio_key = std::get_if<keys::BioKey>(&key);
    if (!bio_key) throw std::invalid_argument("enroll: expected a BIO key");
    entry.payload = bioconv::build_bio_template(bioconv::ensemble_average(beats),
                                                *bio_key);
  } else {
    const auto* mace_key = std::get_if<keys::MaceKey>(&key);
    if (!mace_key) throw std::invalid_argument("enroll: expected a MACE key");
    std::vector<mace::EncryptedSegment> encrypted;
    encrypted.reserve(beats.size());
    for (const auto& b : beats)
      encrypted.push_back(mace::encrypt_segment(b, *mace_key));
    MacePayload payload;
    // Enrollment uses the average-power-spectrum D: with D built from the
    // ensemble-mean spectrum, noise-only bins are attenuated by N_en in D and
    // so over-amplified by D^-1, which drowns the impostor/genuine margin.
    payload.filter = mace::build_mace_filter(encrypted,
                                             /*classic_power_spectrum=*/true);
    payload.reference = mace::correlation_spectrum(
        payload.filter, mace::mean_encrypted(beats, *mace_key));
    entry.payload = std::move(payload);
  }

  entry.threshold =
      decision::compute_threshold(decision::enrollment_scores(beats, entry, key),
                                  k_iqr);
  return entry;
}

bool Store::has(const std::string& subject_id, decision::Scheme scheme) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) {
    return e.subject_id == subject_id && e.scheme == scheme;
  });
}

const SubjectEntry& Store::get_entry(const std::string& subject_id,
                                     decision::Scheme scheme) const {
  for (const auto& e : entries_)
    if (e.subject_id == subject_id && e.scheme == scheme) return e;
  throw std::runtime_error("store: no entry for subject '" + subject_id +
                           "' under scheme " + decision::scheme_name(scheme));
}

std::vector<std::string> Store::list_subjects() const {
  std::vector<std::string> ids;
  for (const auto& e : entries_)
    if (std::find(ids.begin(), ids.end(), e.subject_id) == ids.end())
      ids.push_back(e.subject_id);
  return ids;
}

const SubjectEntry& Store::enroll(
    const std::string& subject_id,
    const std::vector<preprocess::BeatSegment>& beats, decision::Scheme scheme,
    const keys::AnyKey& key, double k_iqr) {
  if (subject_id.empty() ||
      subject_id.find_first_of(" \t\r\n") != std::string::npos)
    throw std::invalid_argument("enroll: subject id must be nonempty, no whitespace");
  if (has(subject_id, scheme))
    throw std::runtime_error("enroll: subject '" + subject_id +
                             "' already enrolled under scheme " +
                             decision::scheme_name(scheme));
  entries_.push_back(make_entry(subject_id, beats, scheme, key, k_iqr));
  return entries_.back();
}

const SubjectEntry& Store::revoke_and_reenroll(
    const std::string& subject_id,
    const std::vector<preprocess::BeatSegment>& beats, decision::Scheme scheme,
    const keys::AnyKey& new_key, double k_iqr) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) {
    return e.subject_id == subject_id && e.scheme == scheme;
  });
  if (it == entries_.end())
    throw std::runtime_error("revoke: unknown subject '" + subject_id + "'");
  *it = make_entry(subject_id, beats, scheme, new_key, k_iqr);
  return *it;
}

void Store::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("store: cannot write " + tmp);
    out << kHeader << "\n";
    char buf[64];
    for (const auto& e : entries_) {
      // Bioconvolving records carry (segment length, piece count); MACE
      // records carry (spectrum length, 0) since the payload vectors fix
      // the geometry.
      int l = 0, k = 0;
      if (const auto* tpl = std::get_if<bioconv::BioTemplate>(&e.payload)) {
        l = tpl->segment_length;
        k = tpl->piece_count;
      } else {
        l = static_cast<int>(std::get<MacePayload>(e.payload)
                                 .filter.coefficients.size());
      }
      out << "SUBJECT " << e.subject_id << " " << decision::scheme_name(e.scheme)
          << " " << l << " " << k;
      for (double v : {e.threshold.t_mse, e.threshold.k_iqr, e.threshold.q1,
                       e.threshold.q3}) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << " " << buf;
      }
      out << "\n";
      std::snprintf(buf, sizeof(buf), "%016llx",
                    static_cast<unsigned long long>(e.key_fingerprint));
      out << "META " << e.created_at << " " << buf << "\n";
      if (const auto* tpl = std::get_if<bioconv::BioTemplate>(&e.payload)) {
        write_vector(out, "F", tpl->values);
      } else {
        const auto& p = std::get<MacePayload>(e.payload);
        std::vector<double> re(p.filter.coefficients.size());
        std::vector<double> im(p.filter.coefficients.size());
        for (std::size_t i = 0; i < re.size(); ++i) {
          re[i] = p.filter.coefficients[i].real();
          im[i] = p.filter.coefficients[i].imag();
        }
        write_vector(out, "H_RE", re);
        write_vector(out, "H_IM", im);
        write_vector(out, "REFSPEC", p.reference.values);
      }
      write_vector(out, "ENMSE", e.threshold.enrollment_mses);
      out << "END\n";
    }
    if (!out) throw std::runtime_error("store: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Store Store::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("store: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw std::runtime_error("store: bad header in " + path);

  Store store;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream hd(line);
    std::string tag, id, scheme_str;
    int l = 0, k = 0;
    double t_mse, k_iqr, q1, q3;
    hd >> tag >> id >> scheme_str >> l >> k >> t_mse >> k_iqr >> q1 >> q3;
    if (tag != "SUBJECT" || hd.fail())
      throw std::runtime_error("store: malformed SUBJECT line: " + line);

    SubjectEntry e;
    e.subject_id = id;
    e.scheme = decision::scheme_from_name(scheme_str);
    e.threshold.t_mse = t_mse;
    e.threshold.k_iqr = k_iqr;
    e.threshold.q1 = q1;
    e.threshold.q3 = q3;

    std::vector<double> h_re, h_im, refspec, f;
    bool ended = false;
    while (std::getline(in, line)) {
      if (line == "END") {
        ended = true;
        break;
      }
      if (line.rfind("META ", 0) == 0) {
        std::istringstream meta(line);
        std::string mtag, created, fp;
        meta >> mtag >> created >> fp;
        e.created_at = created;
        e.key_fingerprint = std::stoull(fp, nullptr, 16);
        continue;
      }
      std::string name;
      auto v = parse_vector(line, &name);
      if (name == "F")
        f = std::move(v);
      else if (name == "H_RE")
        h_re = std::move(v);
      else if (name == "H_IM")
        h_im = std::move(v);
      else if (name == "REFSPEC")
        refspec = std::move(v);
      else if (name == "ENMSE")
        e.threshold.enrollment_mses = std::move(v);
      else
        throw std::runtime_error("store: unknown DATA vector '" + name + "'");
    }
    if (!ended) throw std::runtime_error("store: truncated record for " + id);

    if (e.scheme == decision::Scheme::bioconvolving) {
      if (f.empty()) throw std::runtime_error("store: missing F for " + id);
      bioconv::BioTemplate tpl;
      tpl.values = std::move(f);
      tpl.segment_length = l;
      tpl.piece_count = k;
      e.payload = std::move(tpl);
    } else {
      if (h_re.size() != h_im.size() || h_re.empty() ||
          refspec.size() != h_re.size())
        throw std::runtime_error("store: inconsistent MACE payload for " + id);
      MacePayload p;
      p.filter.coefficients.resize(h_re.size());
      for (std::size_t i = 0; i < h_re.size(); ++i)
        p.filter.coefficients[i] = {h_re[i], h_im[i]};
      p.reference.values = std::move(refspec);
      e.payload = std::move(p);
    }
    store.entries_.push_back(std::move(e));
  }
  return store;
}

}  // namespace cancelauth::store
