#pragma once

// Main/shadow filter pair per sub-band: copy heuristics with asymmetric
// holdover, minimum-power output selection, per-frame outcome events.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhaec/adaptive_filter.hpp"
#include "mhaec/filterbank.hpp"

namespace mhaec {

inline constexpr double kPowerFloor = 1e-30;

struct ControlConfig {
  double copy_threshold_db = 10.0;
  int shadow_to_main_holdover = 2;  // frames the shadow must win before main takes its taps
  int main_to_shadow_holdover = 5;  // frames the main must win before shadow takes its taps
  double mu_main = 0.5;

  void validate() const {
    if (!(copy_threshold_db > 0.0))
      throw std::invalid_argument("ControlConfig: copy threshold must be positive");
    if (shadow_to_main_holdover < 1 || main_to_shadow_holdover < 1)
      throw std::invalid_argument("ControlConfig: holdovers must be >= 1");
    if (!(mu_main >= 0.0 && mu_main <= 0.5))
      throw std::invalid_argument("ControlConfig: mu_main must lie in [0, 0.5]");
  }
};

enum class Selection : std::uint8_t { Main, Shadow, Mic };

struct BandOutcome {
  cplx e_m{};
  cplx e_s{};
  Selection selected = Selection::Main;
  bool copied_into_main = false;
  bool copied_into_shadow = false;
  cplx r_band{};
};

struct CopyDecision {
  bool copy_into_main = false;
  bool copy_into_shadow = false;
};

// argmin of {|e_m|^2, |e_s|^2, |d|^2}; ties prefer Main, then Shadow.
inline Selection select_min_power(cplx e_m, cplx e_s, cplx d) {
  const double pm = std::norm(e_m);
  const double ps = std::norm(e_s);
  const double pd = std::norm(d);
  if (pm <= ps && pm <= pd) return Selection::Main;
  if (ps <= pd) return Selection::Shadow;
  return Selection::Mic;
}

class BandHypothesis {
public:
  explicit BandHypothesis(std::size_t taps = 20, double epsilon = 1e-10,
                          PnlmsParams pnlms = {})
      : main_(taps, epsilon, pnlms), shadow_(taps, epsilon) {}

  // Residual-power comparison with holdover counters. A counter runs while
  // its filter is winning by at least the threshold and resets the moment it
  // is not; any copy resets both.
  CopyDecision update_copy_logic(double p_m, double p_s, const ControlConfig& cfg) {
    if (p_m < 0.0 || p_s < 0.0)
      throw std::invalid_argument("update_copy_logic: negative power");
    const double ratio = std::pow(10.0, cfg.copy_threshold_db / 10.0);
    const double pm = std::max(p_m, kPowerFloor);
    const double ps = std::max(p_s, kPowerFloor);

    shadow_better_count_ = (pm >= ps * ratio) ? shadow_better_count_ + 1 : 0;
    main_better_count_ = (ps >= pm * ratio) ? main_better_count_ + 1 : 0;

    CopyDecision out;
    if (shadow_better_count_ >= cfg.shadow_to_main_holdover) {
      out.copy_into_main = true;
    } else if (main_better_count_ >= cfg.main_to_shadow_holdover) {
      out.copy_into_shadow = true;
    }
    if (out.copy_into_main || out.copy_into_shadow) {
      shadow_better_count_ = 0;
      main_better_count_ = 0;
    }
    return out;
  }

  BandOutcome step(cplx x_k, cplx d_k, const ControlConfig& cfg) {
    if (!std::isfinite(x_k.real()) || !std::isfinite(x_k.imag()) ||
        !std::isfinite(d_k.real()) || !std::isfinite(d_k.imag()))
      throw std::invalid_argument("step: non-finite band sample");

    const cplx y_m = main_.push_and_predict(x_k);
    const cplx y_s = shadow_.push_and_predict(x_k);
    const cplx e_m = d_k - y_m;
    const cplx e_s = d_k - y_s;

    const CopyDecision copy = update_copy_logic(std::norm(e_m), std::norm(e_s), cfg);
    if (copy.copy_into_main) main_.copy_taps_from(shadow_);
    if (copy.copy_into_shadow) shadow_.copy_taps_from(main_);

    BandOutcome out;
    out.e_m = e_m;
    out.e_s = e_s;
    out.copied_into_main = copy.copy_into_main;
    out.copied_into_shadow = copy.copy_into_shadow;
    out.selected = select_min_power(e_m, e_s, d_k);
    switch (out.selected) {
      case Selection::Main: out.r_band = e_m; break;
      case Selection::Shadow: out.r_band = e_s; break;
      case Selection::Mic: out.r_band = d_k; break;
    }

    main_.pnlms_update(e_m, StepSize(cfg.mu_main));
    shadow_.nlms_update(e_s, vss_shadow_step(y_s, e_s));
    return out;
  }

  const AdaptiveFilter& main() const { return main_; }
  const AdaptiveFilter& shadow() const { return shadow_; }
  AdaptiveFilter& main() { return main_; }
  AdaptiveFilter& shadow() { return shadow_; }
  int shadow_better_count() const { return shadow_better_count_; }
  int main_better_count() const { return main_better_count_; }

private:
  AdaptiveFilter main_;    // PNLMS, fixed aggressive step
  AdaptiveFilter shadow_;  // NLMS with the VSS of vss_shadow_step
  int shadow_better_count_ = 0;
  int main_better_count_ = 0;
};

struct FrameResult {
  std::vector<BandOutcome> outcomes;
  SubbandFrame residual;
};

class CancelerBank {
public:
  explicit CancelerBank(std::size_t bands = 512, std::size_t taps = 20,
                        double epsilon = 1e-10, PnlmsParams pnlms = {})
      : bands_(bands, BandHypothesis(taps, epsilon, pnlms)) {
    if (bands == 0) throw std::invalid_argument("CancelerBank: need at least one band");
  }

  // Bands are mutually independent; frame order is sequential.
  FrameResult step_frame(const SubbandFrame& x, const SubbandFrame& d,
                         const ControlConfig& cfg) {
    if (x.bands.size() != bands_.size() || d.bands.size() != bands_.size())
      throw std::invalid_argument("step_frame: band count mismatch");

    FrameResult result;
    result.outcomes.resize(bands_.size());
    result.residual.bands.resize(bands_.size());
    result.residual.frame_index = d.frame_index;
    result.residual.nyquist = d.nyquist;  // bypasses the cancelers
    for (std::size_t k = 0; k < bands_.size(); ++k) {
      try {
        result.outcomes[k] = bands_[k].step(x.bands[k], d.bands[k], cfg);
      } catch (const std::invalid_argument& err) {
        throw std::invalid_argument("band " + std::to_string(k) + ": " + err.what());
      }
      result.residual.bands[k] = result.outcomes[k].r_band;
    }
    return result;
  }

  std::size_t band_count() const { return bands_.size(); }
  const BandHypothesis& band(std::size_t k) const { return bands_.at(k); }
  BandHypothesis& band(std::size_t k) { return bands_.at(k); }

private:
  std::vector<BandHypothesis> bands_;
};

}  // namespace mhaec
