#pragma once

// Frame loop tying the pieces together: analyze reference and microphone,
// run the per-band main/shadow pairs, aggregate and smooth statistics,
// optionally synthesize the residual. Strictly sequential, so a fixed input
// and config replay bit-exactly.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "mhaec/config.hpp"
#include "mhaec/filterbank.hpp"
#include "mhaec/hypothesis.hpp"
#include "mhaec/stats.hpp"

namespace mhaec {

struct CancelerResult {
  std::vector<StatsVector> smoothed;  // post-truncation rows
  std::vector<double> residual;       // synthesized output, empty unless requested
  std::size_t frames_processed = 0;
};

inline CancelerResult run_canceler(std::span<const double> reference,
                                   std::span<const double> mic, const RunConfig& cfg,
                                   bool want_residual) {
  cfg.validate();
  if (reference.size() != mic.size())
    throw std::invalid_argument("run_canceler: reference and mic lengths differ");

  FilterbankConfig fb;
  fb.bands = cfg.bands;
  fb.hop = cfg.frame;
  SubbandAnalyzer ref_analyzer(fb);
  SubbandAnalyzer mic_analyzer(fb);
  SubbandSynthesizer synthesizer(fb);
  CancelerBank bank(cfg.bands, cfg.taps, cfg.epsilon, cfg.pnlms);
  StatsSmoother smoother(alpha_from_time_constant(cfg.frame_period(), cfg.t_c));

  const std::size_t n_frames = reference.size() / cfg.frame;
  const std::size_t skip = cfg.truncate_frames();

  CancelerResult result;
  result.frames_processed = n_frames;
  if (n_frames > skip) result.smoothed.reserve(n_frames - skip);
  if (want_residual) result.residual.reserve(n_frames * cfg.frame);

  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::span<const double> ref_frame = reference.subspan(f * cfg.frame, cfg.frame);
    const std::span<const double> mic_frame = mic.subspan(f * cfg.frame, cfg.frame);
    const SubbandFrame x = ref_analyzer.analyze(ref_frame);
    const SubbandFrame d = mic_analyzer.analyze(mic_frame);

    FrameResult fr = bank.step_frame(x, d, cfg.control);
    const StatsVector raw =
        aggregate({fr.outcomes.data(), cfg.stats_bands}, static_cast<std::int64_t>(f));
    const StatsVector smoothed = smoother.smooth(raw);
    if (f >= skip) result.smoothed.push_back(smoothed);

    if (want_residual) {
      const std::vector<double> out = synthesizer.synthesize(fr.residual);
      result.residual.insert(result.residual.end(), out.begin(), out.end());
    }
  }
  return result;
}

}  // namespace mhaec
