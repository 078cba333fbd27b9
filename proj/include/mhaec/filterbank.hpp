#pragma once

// Uniform complex-modulated analysis/synthesis filterbank.
//
// N_B bands on centers k * fs / (2 * N_B), produced by windowing the most
// recent prototype-length history, folding it into 2 * N_B bins and taking a
// DFT. Hop equals N_B, so the complex bands are 2x oversampled. The synthesis
// prototype is solved per polyphase phase as the minimum-norm dual of the
// analysis prototype, which cancels the fold aliasing exactly; reconstruction
// error is down at float rounding.
//
// For real input the upper half of the transform is the conjugate mirror of
// the lower half and is regenerated inside synthesize(). The one bin that has
// no mirror, the Nyquist-centered bin, is real valued and travels beside the
// bands as SubbandFrame::nyquist; dropping it would cap broadband
// reconstruction near 30 dB, and folding it into band 0 would make that band
// a DC/Nyquist composite no single-band filter can model.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mhaec/fft.hpp"

namespace mhaec {

// The prototype trades band selectivity against length. What matters for the
// per-band cancelers is the energy that folds back across the decimated
// Nyquist (half the band spacing): that energy is uncancellable by a
// single-band filter and caps the reachable echo suppression. Six hops with
// a light Kaiser taper and a slightly narrowed cutoff keep that fold-back
// near -28 dB; a four-hop prototype caps suppression around 16 dB.
struct FilterbankConfig {
  std::size_t bands = 512;         // N_B
  std::size_t hop = 512;           // samples per frame
  std::size_t prototype_hops = 6;  // prototype length as a multiple of hop
  double kaiser_beta = 3.0;
  double cutoff_scale = 0.7;       // cutoff relative to half the band spacing
};

struct SubbandFrame {
  std::vector<cplx> bands;
  double nyquist = 0.0;  // real-valued Nyquist-centered bin, bypasses the bands
  std::int64_t frame_index = 0;
};

namespace detail {

inline double sincf(double t) {
  if (std::abs(t) < 1e-12) return 1.0;
  const double pt = std::numbers::pi * t;
  return std::sin(pt) / pt;
}

inline std::vector<double> make_prototype(const FilterbankConfig& cfg) {
  if (cfg.bands < 8 || !is_pow2(cfg.bands))
    throw std::invalid_argument("filterbank: bands must be a power of two >= 8");
  if (cfg.hop != cfg.bands)
    throw std::invalid_argument("filterbank: hop must equal band count");
  if (cfg.prototype_hops < 2 || cfg.prototype_hops % 2 != 0)
    throw std::invalid_argument("filterbank: prototype_hops must be even and >= 2");

  const std::size_t len = cfg.prototype_hops * cfg.hop;
  const std::size_t fft_size = 2 * cfg.bands;
  const double center = 0.5 * static_cast<double>(len - 1);
  const double i0_beta = std::cyl_bessel_i(0.0, cfg.kaiser_beta);

  std::vector<double> p(len);
  double sum = 0.0;
  for (std::size_t l = 0; l < len; ++l) {
    const double t = (static_cast<double>(l) - center) / center;
    const double win = std::cyl_bessel_i(0.0, cfg.kaiser_beta * std::sqrt(1.0 - t * t)) / i0_beta;
    p[l] = win * sincf(cfg.cutoff_scale * (static_cast<double>(l) - center) /
                       static_cast<double>(fft_size));
    sum += p[l];
  }
  for (double& v : p) v /= sum;  // unity band-center gain
  return p;
}

// Minimum-norm dual window: per phase, q must hit the delayed-identity
// constraint while zeroing every fold-alias term.
inline std::vector<double> solve_dual_prototype(const std::vector<double>& p,
                                                std::size_t hop) {
  const std::size_t len = p.size();
  const std::size_t c = len / hop;            // taps per phase
  const std::size_t fft_size = 2 * hop;
  const int rmax = static_cast<int>((c - 1) / 2);
  const std::size_t nr = 2 * static_cast<std::size_t>(rmax) + 1;

  std::vector<double> q(len, 0.0);
  std::vector<double> a(nr * c);
  std::vector<double> g(nr * nr);
  std::vector<double> y(nr);

  for (std::size_t phase = 0; phase < hop; ++phase) {
    for (std::size_t row = 0; row < nr; ++row) {
      const int r = static_cast<int>(row) - rmax;
      for (std::size_t j = 0; j < c; ++j) {
        const long idx = static_cast<long>(phase + j * hop) +
                         static_cast<long>(r) * static_cast<long>(fft_size);
        a[row * c + j] =
            (idx >= 0 && idx < static_cast<long>(len)) ? p[static_cast<std::size_t>(idx)] : 0.0;
      }
    }
    // G = A A^T, solve G y = e_{r=0}
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nr; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < c; ++k) s += a[i * c + k] * a[j * c + k];
        g[i * nr + j] = s;
      }
    for (std::size_t i = 0; i < nr; ++i) y[i] = (i == static_cast<std::size_t>(rmax)) ? 1.0 : 0.0;

    for (std::size_t col = 0; col < nr; ++col) {  // Gaussian elimination, partial pivot
      std::size_t piv = col;
      for (std::size_t row = col + 1; row < nr; ++row)
        if (std::abs(g[row * nr + col]) > std::abs(g[piv * nr + col])) piv = row;
      if (std::abs(g[piv * nr + col]) < 1e-300)
        throw std::runtime_error("filterbank: prototype admits no dual window");
      if (piv != col) {
        for (std::size_t k = 0; k < nr; ++k) std::swap(g[piv * nr + k], g[col * nr + k]);
        std::swap(y[piv], y[col]);
      }
      for (std::size_t row = col + 1; row < nr; ++row) {
        const double f = g[row * nr + col] / g[col * nr + col];
        for (std::size_t k = col; k < nr; ++k) g[row * nr + k] -= f * g[col * nr + k];
        y[row] -= f * y[col];
      }
    }
    for (std::size_t i = nr; i-- > 0;) {
      double s = y[i];
      for (std::size_t k = i + 1; k < nr; ++k) s -= g[i * nr + k] * y[k];
      y[i] = s / g[i * nr + i];
    }
    for (std::size_t j = 0; j < c; ++j) {
      double s = 0.0;
      for (std::size_t row = 0; row < nr; ++row) s += a[row * c + j] * y[row];
      q[phase + j * hop] = s;
    }
  }
  return q;
}

}  // namespace detail

class SubbandAnalyzer {
public:
  explicit SubbandAnalyzer(const FilterbankConfig& cfg = {})
      : cfg_(cfg),
        prototype_(detail::make_prototype(cfg)),
        history_(prototype_.size(), 0.0),
        spectrum_(2 * cfg.bands) {}

  // Consumes one hop of samples, returns the N_B band samples.
  SubbandFrame analyze(std::span<const double> frame) {
    const std::size_t hop = cfg_.hop;
    if (frame.size() != hop)
      throw std::invalid_argument("analyze: frame must contain exactly hop samples");

    const std::size_t len = history_.size();
    for (std::size_t i = 0; i + hop < len; ++i) history_[i] = history_[i + hop];
    for (std::size_t i = 0; i < hop; ++i) history_[len - hop + i] = frame[i];

    const std::size_t fft_size = 2 * cfg_.bands;
    for (auto& v : spectrum_) v = 0.0;
    for (std::size_t l = 0; l < len; ++l) {
      // newest sample at lag 0
      spectrum_[l & (fft_size - 1)] += prototype_[l] * history_[len - 1 - l];
    }
    fft_inplace(spectrum_, +1);

    SubbandFrame out;
    out.frame_index = frame_index_++;
    out.bands.resize(cfg_.bands);
    out.bands[0] = spectrum_[0].real();
    out.nyquist = spectrum_[cfg_.bands].real();
    for (std::size_t k = 1; k < cfg_.bands; ++k) out.bands[k] = spectrum_[k];
    return out;
  }

  const FilterbankConfig& config() const { return cfg_; }
  const std::vector<double>& prototype() const { return prototype_; }

private:
  FilterbankConfig cfg_;
  std::vector<double> prototype_;
  std::vector<double> history_;
  std::vector<cplx> spectrum_;
  std::int64_t frame_index_ = 0;
};

class SubbandSynthesizer {
public:
  explicit SubbandSynthesizer(const FilterbankConfig& cfg = {})
      : cfg_(cfg),
        prototype_(detail::make_prototype(cfg)),
        dual_(detail::solve_dual_prototype(prototype_, cfg.hop)),
        overlap_(prototype_.size(), 0.0),
        spectrum_(2 * cfg.bands) {}

  // Consumes one band frame, emits one hop of time samples.
  std::vector<double> synthesize(const SubbandFrame& frame) {
    const std::size_t nb = cfg_.bands;
    if (frame.bands.size() != nb)
      throw std::invalid_argument("synthesize: band count mismatch");

    const std::size_t fft_size = 2 * nb;
    spectrum_[0] = frame.bands[0].real();
    spectrum_[nb] = frame.nyquist;
    for (std::size_t k = 1; k < nb; ++k) {
      spectrum_[k] = frame.bands[k];
      spectrum_[fft_size - k] = std::conj(frame.bands[k]);
    }
    fft_inplace(spectrum_, -1);

    const std::size_t hop = cfg_.hop;
    const std::size_t len = overlap_.size();
    for (std::size_t i = 0; i + hop < len; ++i) overlap_[i] = overlap_[i + hop];
    for (std::size_t i = len - hop; i < len; ++i) overlap_[i] = 0.0;

    const double scale = 1.0 / static_cast<double>(fft_size);
    for (std::size_t l = 0; l < len; ++l)
      overlap_[len - 1 - l] += dual_[l] * spectrum_[l & (fft_size - 1)].real() * scale;

    return {overlap_.begin(), overlap_.begin() + static_cast<long>(hop)};
  }

  const FilterbankConfig& config() const { return cfg_; }
  const std::vector<double>& prototype() const { return prototype_; }
  const std::vector<double>& dual_prototype() const { return dual_; }

private:
  FilterbankConfig cfg_;
  std::vector<double> prototype_;
  std::vector<double> dual_;
  std::vector<double> overlap_;
  std::vector<cplx> spectrum_;
};

// Fixed latency of an analyze->synthesize chain, in samples.
inline std::size_t round_trip_delay(const SubbandAnalyzer& a, const SubbandSynthesizer& s) {
  if (a.prototype() != s.prototype())
    throw std::invalid_argument("round_trip_delay: states use different prototypes");
  return a.prototype().size() - a.config().hop;
}

}  // namespace mhaec
