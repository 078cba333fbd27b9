// Renders one double-talk scene, runs the canceler and prints the smoothed
// statistics trajectory around the event.

#include <cstdio>

#include "mhaec/pipeline.hpp"
#include "mhaec/simulate.hpp"

int main() {
  mhaec::Scenario sc;
  sc.label = mhaec::EventClass::DoubleTalk;
  sc.duration_s = 10.0;
  sc.snr_db = 0.0;
  sc.seed = 2024;

  const mhaec::RenderedScene scene = mhaec::render_scenario(sc);
  mhaec::RunConfig cfg;
  const mhaec::CancelerResult result =
      mhaec::run_canceler(scene.reference, scene.mic, cfg, /*want_residual=*/false);

  std::printf("%8s %8s %8s %8s %8s %8s\n", "frame", "P_m", "P_s", "P_d", "U_m", "U_s");
  for (std::size_t i = 0; i < result.smoothed.size(); i += 10) {
    const mhaec::StatsVector& s = result.smoothed[i];
    std::printf("%8lld %8.4f %8.4f %8.4f %8.4f %8.4f\n",
                static_cast<long long>(s.frame_index), s.p_m, s.p_s, s.p_d, s.u_m, s.u_s);
  }
  return 0;
}
