// Copyright 2026 The cancelauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "cancelauth/mace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "cancelauth/dft.hpp"
#include "cancelauth/kernels.hpp"

namespace cancelauth::mace {

EncryptedSegment encrypt_segment(const preprocess::BeatSegment& beat,
                                 const keys::MaceKey& key) {
  if (beat.samples.empty())
    throw std::invalid_argument("encrypt_segment: empty beat");
  if (key.taps.size() < 2)
    throw std::invalid_argument("encrypt_segment: key needs at least 2 taps");
  std::vector<double> conv(beat.samples.size() + key.taps.size() - 1);
  kernels::convolve_full(beat.samples.data(), beat.samples.size(),
                         key.taps.data(), key.taps.size(), conv.data());
  return {dft::forward_real(conv)};
}

MaceFilter build_mace_filter(const std::vector<EncryptedSegment>& encrypted,
                             bool classic_power_spectrum) {
  if (encrypted.empty())
    throw std::invalid_argument("build_mace_filter: no training segments");
  const std::size_t len = encrypted.front().spectrum.size();
  const std::size_t n_en = encrypted.size();
  for (const auto& e : encrypted)
    if (e.spectrum.size() != len)
      throw std::invalid_argument("build_mace_filter: mixed spectrum lengths");

  // Diagonal D from the mean spectrum (or mean power spectrum), with a
  // relative floor so the inverse stays finite on zero bins.
  std::vector<double> d(len, 0.0);
  if (classic_power_spectrum) {
    for (const auto& e : encrypted)
      for (std::size_t j = 0; j < len; ++j) d[j] += std::norm(e.spectrum[j]);
    for (auto& v : d) v /= static_cast<double>(n_en);
  } else {
    std::vector<std::complex<double>> mean(len, {0.0, 0.0});
    for (const auto& e : encrypted)
      for (std::size_t j = 0; j < len; ++j) mean[j] += e.spectrum[j];
    for (std::size_t j = 0; j < len; ++j)
      d[j] = std::norm(mean[j] / static_cast<double>(n_en));
  }
  double d_max = 0.0;
  for (double v : d) d_max = std::max(d_max, v);
  if (d_max <= 0.0)
    throw std::runtime_error("build_mace_filter: all-zero training spectra");
  const double floor = 1e-12 * d_max;
  for (auto& v : d) v = std::max(v, floor);

  // A = M^H D^-1 M (N_en x N_en), solved directly; never an explicit inverse.
  Eigen::MatrixXcd m(len, static_cast<Eigen::Index>(n_en));
  for (std::size_t i = 0; i < n_en; ++i)
    for (std::size_t j = 0; j < len; ++j)
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          encrypted[i].spectrum[j];
  Eigen::VectorXd d_inv(static_cast<Eigen::Index>(len));
  for (std::size_t j = 0; j < len; ++j)
    d_inv(static_cast<Eigen::Index>(j)) = 1.0 / d[j];
  const Eigen::MatrixXcd dm = d_inv.asDiagonal() * m;
  const Eigen::MatrixXcd a = m.adjoint() * dm;

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  if (!lu.isInvertible()) {
    throw std::runtime_error(
        "build_mace_filter: singular M^H D^-1 M (rcond ~ " +
        std::to_string(lu.rcond()) + "); duplicate training segments?");
  }
  const Eigen::VectorXcd c =
      lu.solve(Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(n_en)));
  const Eigen::VectorXcd h = dm * c;

  MaceFilter filter;
  filter.coefficients.assign(h.data(), h.data() + h.size());
  return filter;
}

CorrelationSpectrum correlation_spectrum(const MaceFilter& h,
                                         const EncryptedSegment& m) {
  const std::size_t len = h.coefficients.size();
  if (m.spectrum.size() != len)
    throw std::invalid_argument("correlation_spectrum: length mismatch");
  std::vector<std::complex<double>> prod(len);
  for (std::size_t j = 0; j < len; ++j)
    prod[j] = m.spectrum[j] * std::conj(h.coefficients[j]);
  const auto plane = dft::inverse(prod);
  CorrelationSpectrum out;
  out.values.resize(len);
  for (std::size_t j = 0; j < len; ++j) out.values[j] = std::abs(plane[j]);
  return out;
}

EncryptedSegment mean_encrypted(const std::vector<preprocess::BeatSegment>& beats,
                                const keys::MaceKey& key) {
  if (beats.empty())
    throw std::invalid_argument("mean_encrypted: empty beat list");
  const std::size_t l = beats.front().samples.size();
  EncryptedSegment acc = encrypt_segment(beats.front(), key);
  for (std::size_t i = 1; i < beats.size(); ++i) {
    if (beats[i].samples.size() != l)
      throw std::invalid_argument("mean_encrypted: mixed beat lengths");
    const EncryptedSegment e = encrypt_segment(beats[i], key);
    for (std::size_t j = 0; j < acc.spectrum.size(); ++j)
      acc.spectrum[j] += e.spectrum[j];
  }
  const double inv = 1.0 / static_cast<double>(beats.size());
  for (auto& v : acc.spectrum) v *= inv;
  return acc;
}

}  // namespace cancelauth::mace
