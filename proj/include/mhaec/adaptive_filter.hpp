#pragma once

// Per-band complex adaptive FIR filters: prediction, NLMS, PNLMS and the
// shadow filter's variable step size.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mhaec/fft.hpp"  // cplx

namespace mhaec {

inline constexpr double kVssDenominatorFloor = 1e-20;
inline constexpr double kMisalignmentFloorDb = -300.0;

struct PnlmsParams {
  double rho = 0.01;      // minimum share of the largest tap
  double delta_p = 0.01;  // floor on the largest tap magnitude
};

struct StepSize {
  double mu = 0.0;

  explicit StepSize(double value) : mu(value) {
    if (!(value >= 0.0 && value <= 0.5))
      throw std::invalid_argument("StepSize: mu must lie in [0, 0.5]");
  }
};

class AdaptiveFilter {
public:
  explicit AdaptiveFilter(std::size_t taps = 20, double epsilon = 1e-10,
                          std::optional<PnlmsParams> pnlms = std::nullopt)
      : taps_(taps, cplx{}), delay_(taps, cplx{}), epsilon_(epsilon), pnlms_(pnlms) {
    if (taps == 0) throw std::invalid_argument("AdaptiveFilter: need at least one tap");
    if (!(epsilon > 0.0)) throw std::invalid_argument("AdaptiveFilter: epsilon must be positive");
  }

  // Shifts the delay line and returns y_hat = sum_l x[l] * h[l].
  cplx push_and_predict(cplx x_new) {
    if (!std::isfinite(x_new.real()) || !std::isfinite(x_new.imag()))
      throw std::invalid_argument("push_and_predict: non-finite input");
    for (std::size_t l = delay_.size() - 1; l > 0; --l) delay_[l] = delay_[l - 1];
    delay_[0] = x_new;
    cplx y{};
    for (std::size_t l = 0; l < taps_.size(); ++l) y += delay_[l] * taps_[l];
    return y;
  }

  // h += mu * e * conj(x) / (x^H x + eps). The conjugate sits on the delay
  // line so that a mu = 1 update zeroes the a-posteriori error of the
  // unconjugated predictor above.
  void nlms_update(cplx e, StepSize mu) {
    check_error(e);
    double energy = 0.0;
    for (const cplx& x : delay_) energy += std::norm(x);
    if (energy == 0.0) return;
    const cplx g = mu.mu * e / (energy + epsilon_);
    for (std::size_t l = 0; l < taps_.size(); ++l) taps_[l] += g * std::conj(delay_[l]);
  }

  void pnlms_update(cplx e, StepSize mu) {
    check_error(e);
    if (!pnlms_) throw std::invalid_argument("pnlms_update: filter has no PNLMS parameters");
    const std::size_t n = taps_.size();
    gains_.resize(n);

    double max_mag = pnlms_->delta_p;
    for (const cplx& h : taps_) max_mag = std::max(max_mag, std::abs(h));
    double mean_gamma = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      gains_[l] = std::max(pnlms_->rho * max_mag, std::abs(taps_[l]));
      mean_gamma += gains_[l];
    }
    mean_gamma /= static_cast<double>(n);
    double weighted_energy = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      gains_[l] /= mean_gamma;
      weighted_energy += gains_[l] * std::norm(delay_[l]);
    }
    if (weighted_energy == 0.0) return;
    const cplx g = mu.mu * e / (weighted_energy + epsilon_);
    for (std::size_t l = 0; l < n; ++l) taps_[l] += g * gains_[l] * std::conj(delay_[l]);
  }

  std::span<const cplx> taps() const { return taps_; }
  std::span<const cplx> delay_line() const { return delay_; }
  std::size_t tap_count() const { return taps_.size(); }
  bool has_pnlms() const { return pnlms_.has_value(); }

  void copy_taps_from(const AdaptiveFilter& src) {
    if (src.taps_.size() != taps_.size())
      throw std::invalid_argument("copy_taps_from: tap count mismatch");
    taps_ = src.taps_;
  }

  void set_taps(std::span<const cplx> taps) {
    if (taps.size() != taps_.size()) throw std::invalid_argument("set_taps: tap count mismatch");
    std::copy(taps.begin(), taps.end(), taps_.begin());
  }

private:
  static void check_error(cplx e) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
      throw std::invalid_argument("filter update: non-finite error");
  }

  std::vector<cplx> taps_;
  std::vector<cplx> delay_;
  double epsilon_;
  std::optional<PnlmsParams> pnlms_;
  std::vector<double> gains_;  // scratch for proportionate weights
};

// mu_shadow = min(|y_s|^2 / |e_s|^2, 0.5); the shadow adapts fastest when the
// predicted echo dominates its own residual.
inline StepSize vss_shadow_step(cplx y_s, cplx e_s) {
  const double num = std::norm(y_s);
  const double den = std::norm(e_s) + kVssDenominatorFloor;
  return StepSize(std::min(num / den, 0.5));
}

inline double misalignment_db(std::span<const cplx> estimate, std::span<const cplx> reference) {
  if (estimate.size() != reference.size())
    throw std::invalid_argument("misalignment_db: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < estimate.size(); ++l) {
    num += std::norm(estimate[l] - reference[l]);
    den += std::norm(reference[l]);
  }
  if (den == 0.0) throw std::invalid_argument("misalignment_db: zero reference");
  if (num == 0.0) return kMisalignmentFloorDb;
  return 10.0 * std::log10(num / den);
}

}  // namespace mhaec
