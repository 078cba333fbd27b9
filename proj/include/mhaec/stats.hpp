#pragma once

// Selection/copy statistics aggregated over the low sub-bands, plus the
// exponential smoother that produces the reported trajectory.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "mhaec/hypothesis.hpp"

namespace mhaec {

struct StatsVector {
  double p_m = 0.0;  // main residual had the lowest power
  double p_s = 0.0;  // shadow residual had the lowest power
  double p_d = 0.0;  // microphone signal had the lowest power
  double u_m = 0.0;  // main filter took the shadow's coefficients
  double u_s = 0.0;  // shadow filter took the main's coefficients
  std::int64_t frame_index = 0;
};

// Counts over the supplied band outcomes (the caller passes the low N_S
// bands), normalized to probabilities.
inline StatsVector aggregate(std::span<const BandOutcome> outcomes,
                             std::int64_t frame_index = 0) {
  if (outcomes.empty()) throw std::invalid_argument("aggregate: no bands to aggregate");
  std::size_t c_m = 0, c_s = 0, c_d = 0, n_um = 0, n_us = 0;
  for (const BandOutcome& o : outcomes) {
    switch (o.selected) {
      case Selection::Main: ++c_m; break;
      case Selection::Shadow: ++c_s; break;
      case Selection::Mic: ++c_d; break;
    }
    if (o.copied_into_main) ++n_um;
    if (o.copied_into_shadow) ++n_us;
  }
  const double n = static_cast<double>(outcomes.size());
  StatsVector s;
  s.p_m = static_cast<double>(c_m) / n;
  s.p_s = static_cast<double>(c_s) / n;
  s.p_d = static_cast<double>(c_d) / n;
  s.u_m = static_cast<double>(n_um) / n;
  s.u_s = static_cast<double>(n_us) / n;
  s.frame_index = frame_index;
  return s;
}

// alpha = exp(-t_f / t_c) for a one-pole smoother at frame period t_f.
inline double alpha_from_time_constant(double t_f, double t_c) {
  if (!(t_f > 0.0) || !(t_c > 0.0))
    throw std::invalid_argument("alpha_from_time_constant: times must be positive");
  return std::exp(-t_f / t_c);
}

class StatsSmoother {
public:
  // Seed must put the three selection probabilities on the simplex.
  explicit StatsSmoother(double alpha,
                         const StatsVector& seed = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0})
      : alpha_(alpha), state_(seed) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("StatsSmoother: alpha must lie in (0, 1)");
    const double sum = seed.p_m + seed.p_s + seed.p_d;
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("StatsSmoother: seed selection probabilities must sum to 1");
    for (double v : {seed.p_m, seed.p_s, seed.p_d, seed.u_m, seed.u_s})
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("StatsSmoother: seed elements must lie in [0, 1]");
  }

  // s_hat[n] = alpha * s_hat[n-1] + (1 - alpha) * s[n]
  StatsVector smooth(const StatsVector& raw) {
    const double b = 1.0 - alpha_;
    state_.p_m = alpha_ * state_.p_m + b * raw.p_m;
    state_.p_s = alpha_ * state_.p_s + b * raw.p_s;
    state_.p_d = alpha_ * state_.p_d + b * raw.p_d;
    state_.u_m = alpha_ * state_.u_m + b * raw.u_m;
    state_.u_s = alpha_ * state_.u_s + b * raw.u_s;
    state_.frame_index = raw.frame_index;
    return state_;
  }

  double alpha() const { return alpha_; }
  const StatsVector& state() const { return state_; }

private:
  double alpha_;
  StatsVector state_;
};

}  // namespace mhaec
