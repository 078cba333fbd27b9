#pragma once

// Synthetic scene generator: seeded room impulse responses, a spectrally
// rich reference signal, and microphone renders for the four event classes
// (steady state, double-talk, echo path change, device repositioning).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhaec/csv.hpp"
#include "mhaec/events.hpp"
#include "mhaec/fft.hpp"
#include "mhaec/rng.hpp"
#include "mhaec/wav.hpp"

namespace mhaec {

inline constexpr std::uint32_t kSimSampleRate = 48000;
inline constexpr std::size_t kRirLength = 9600;        // 200 ms
inline constexpr std::size_t kDirectPathLag = 32;
inline constexpr double kDefaultT60 = 0.15;
inline constexpr double kPathCrossfadeSeconds = 0.05;
inline constexpr double kContactBurstSeconds = 0.03;
inline constexpr double kReferencePeak = 0.5011872336272722;  // -6 dBFS
inline constexpr double kSeverityEchoPathChange = 0.3;
inline constexpr double kSeverityRepositioning = 0.7;

// seed-derivation stream tags
inline constexpr std::uint64_t kStreamReference = 1;
inline constexpr std::uint64_t kStreamRir = 2;
inline constexpr std::uint64_t kStreamPerturb = 3;
inline constexpr std::uint64_t kStreamInterferer = 4;
inline constexpr std::uint64_t kStreamBurst = 5;

struct RoomIR {
  std::vector<double> taps;
  double t60 = kDefaultT60;
  std::uint64_t seed = 0;
};

// Exponentially decaying seeded noise tail (60 dB energy decay per T60), a
// unit direct-path spike, unit overall norm.
inline RoomIR gen_rir(std::uint64_t seed, double t60 = kDefaultT60,
                      std::size_t length = kRirLength) {
  if (!(t60 > 0.0)) throw std::invalid_argument("gen_rir: T60 must be positive");
  if (length <= kDirectPathLag) throw std::invalid_argument("gen_rir: length too short");

  RoomIR ir;
  ir.t60 = t60;
  ir.seed = seed;
  ir.taps.resize(length);
  Rng rng(seed);
  const double decay = 3.0 * std::numbers::ln10 / (t60 * kSimSampleRate);
  for (std::size_t l = 0; l < length; ++l)
    ir.taps[l] = rng.gaussian() * std::exp(-decay * static_cast<double>(l));
  ir.taps[kDirectPathLag] = 1.0;

  double norm = 0.0;
  for (double v : ir.taps) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : ir.taps) v /= norm;
  return ir;
}

// Blend toward an independent room: h' = normalize((1-severity) h + severity g).
inline RoomIR perturb_rir(const RoomIR& ir, double severity, std::uint64_t seed) {
  if (!(severity > 0.0 && severity <= 1.0))
    throw std::invalid_argument("perturb_rir: severity must lie in (0, 1]");
  const RoomIR fresh = gen_rir(seed, ir.t60, ir.taps.size());
  RoomIR out;
  out.t60 = ir.t60;
  out.seed = seed;
  out.taps.resize(ir.taps.size());
  double norm = 0.0;
  for (std::size_t l = 0; l < ir.taps.size(); ++l) {
    out.taps[l] = (1.0 - severity) * ir.taps[l] + severity * fresh.taps[l];
    norm += out.taps[l] * out.taps[l];
  }
  norm = std::sqrt(norm);
  for (double& v : out.taps) v /= norm;
  return out;
}

namespace detail {

// Paul Kellett's economy pink filter over seeded gaussian white noise.
inline std::vector<double> pink_noise(std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = rng.gaussian();
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    out[i] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  return out;
}

inline double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

inline double raised_cosine(double u) {  // 0 -> 0, 1 -> 1
  u = std::clamp(u, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
}

}  // namespace detail

// Pink noise with a white floor plus a bed of slowly wandering tones,
// peak-normalized to -6 dBFS. The white floor keeps the per-band power
// spread small enough that all statistics bands converge on similar time
// scales.
inline std::vector<double> gen_reference(double duration_s, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("gen_reference: duration must be positive");
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * kSimSampleRate));

  Rng rng(seed);
  std::vector<double> out = detail::pink_noise(n, rng);
  {
    double acc = 0.0;
    for (double v : out) acc += v * v;
    const double scale = 1.0 / std::sqrt(acc / static_cast<double>(n));
    Rng white(derive_seed(seed, 17));
    for (double& v : out) v = scale * v + 0.45 * white.gaussian();
  }
  const double noise_rms = detail::rms(out);

  constexpr int kTones = 8;
  double phase[kTones], base_hz[kTones], wander_hz[kTones], wander_phase[kTones];
  for (int t = 0; t < kTones; ++t) {
    base_hz[t] = 80.0 * std::pow(4000.0 / 80.0, static_cast<double>(t) / (kTones - 1));
    phase[t] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    wander_hz[t] = rng.uniform(0.05, 0.3);
    wander_phase[t] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  const double bed_level = std::pow(10.0, -12.0 / 20.0);  // tone bed sits -12 dB under the noise
  const double tone_amp = noise_rms * bed_level / std::sqrt(0.5 * kTones);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSimSampleRate;
    double bed = 0.0;
    for (int k = 0; k < kTones; ++k) {
      const double f = base_hz[k] *
                       (1.0 + 0.035 * std::sin(2.0 * std::numbers::pi * wander_hz[k] * t +
                                               wander_phase[k]));
      phase[k] += 2.0 * std::numbers::pi * f / kSimSampleRate;
      bed += std::sin(phase[k]);
    }
    out[i] += tone_amp * bed;
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  const double scale = kReferencePeak / peak;
  for (double& v : out) v *= scale;
  return out;
}

struct Scenario {
  EventClass label = EventClass::SteadyState;
  double duration_s = 12.0;
  double event_start_s = 500.0 * 512.0 / 48000.0;  // about frame 500
  double event_duration_s = 1.0;
  double snr_db = 0.0;     // double-talk echo-to-interferer ratio
  double severity = 0.0;   // 0 picks the class default
  std::uint64_t seed = 0;

  double effective_severity() const {
    if (severity > 0.0) return severity;
    return label == EventClass::Repositioning ? kSeverityRepositioning : kSeverityEchoPathChange;
  }

  void validate() const {
    if (!(duration_s > 0.0)) throw std::invalid_argument("Scenario: duration must be positive");
    if (!(event_start_s >= 0.0 && event_start_s < duration_s))
      throw std::invalid_argument("Scenario: event start outside clip");
    const double tail = event_start_s + event_duration_s + kPathCrossfadeSeconds +
                        kContactBurstSeconds;
    if (label != EventClass::SteadyState && tail > duration_s)
      throw std::invalid_argument("Scenario: event window extends past clip end");
  }
};

struct RenderedScene {
  std::vector<double> reference;
  std::vector<double> mic;
  Scenario scenario;
};

namespace detail {

// Speech-like interferer: formant-filtered noise under a 4 Hz syllabic
// envelope, nonzero exactly inside [start, start+len).
inline void add_interferer(std::vector<double>& mic, const std::vector<double>& echo,
                           std::size_t start, std::size_t len, double snr_db,
                           std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(len);
  for (double& x : v) x = rng.gaussian();

  // three resonators near typical formants, seed-jittered
  const double centers[3] = {rng.uniform(400.0, 650.0), rng.uniform(1200.0, 1800.0),
                             rng.uniform(2300.0, 2900.0)};
  std::vector<double> shaped(len, 0.0);
  for (int f = 0; f < 3; ++f) {
    const double w0 = 2.0 * std::numbers::pi * centers[f] / kSimSampleRate;
    const double r = 0.97;
    const double a1 = -2.0 * r * std::cos(w0);
    const double a2 = r * r;
    const double g = (1.0 - r) * std::sqrt(1.0 + r * r - 2.0 * r * std::cos(2.0 * w0));
    double y1 = 0.0, y2 = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double y = g * v[i] - a1 * y1 - a2 * y2;
      y2 = y1;
      y1 = y;
      shaped[i] += y;
    }
  }

  const double edge = 0.05 * kSimSampleRate;  // 50 ms fade at both ends
  for (std::size_t i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) / kSimSampleRate;
    double env = 0.15 + 0.85 * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * 4.0 * t));
    const double di = static_cast<double>(i);
    if (di < edge) env *= raised_cosine(di / edge);
    const double from_end = static_cast<double>(len - 1 - i);
    if (from_end < edge) env *= raised_cosine(from_end / edge);
    shaped[i] *= env;
  }

  const double p_echo = rms({echo.data() + start, len});
  const double p_int = rms(shaped);
  if (p_int > 0.0) {
    const double gain = p_echo * std::pow(10.0, -snr_db / 20.0) / p_int;
    for (std::size_t i = 0; i < len; ++i) mic[start + i] += gain * shaped[i];
  }
}

// Short lowpassed contact burst at a transition instant. `level` scales the
// burst relative to the local echo RMS; contact noise couples through the
// chassis, so it sits above the acoustic echo.
inline void add_burst(std::vector<double>& mic, const std::vector<double>& echo,
                      std::size_t start, double level, std::uint64_t seed) {
  const std::size_t len = static_cast<std::size_t>(kContactBurstSeconds * kSimSampleRate);
  if (start + len > mic.size()) return;
  Rng rng(seed);
  std::vector<double> burst(len);
  const double a = 1.0 - std::exp(-2.0 * std::numbers::pi * 2000.0 / kSimSampleRate);
  double y = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    y += a * (rng.gaussian() - y);
    const double u = static_cast<double>(i) / static_cast<double>(len - 1);
    burst[i] = y * std::sin(std::numbers::pi * u);  // half-sine envelope
  }
  const std::size_t ctx = std::min<std::size_t>(mic.size() - start,
                                                static_cast<std::size_t>(0.5 * kSimSampleRate));
  const double p_echo = rms({echo.data() + start, ctx});
  const double p_burst = rms(burst);
  if (p_burst == 0.0) return;
  const double gain = level * p_echo / p_burst;
  for (std::size_t i = 0; i < len; ++i) mic[start + i] += gain * burst[i];
}

}  // namespace detail

inline RenderedScene render_scenario(const Scenario& sc) {
  sc.validate();
  RenderedScene scene;
  scene.scenario = sc;
  scene.reference = gen_reference(sc.duration_s, derive_seed(sc.seed, kStreamReference));
  const std::size_t n = scene.reference.size();

  const RoomIR room = gen_rir(derive_seed(sc.seed, kStreamRir));
  std::vector<double> echo = fft_convolve(scene.reference, room.taps);
  echo.resize(n);

  switch (sc.label) {
    case EventClass::SteadyState: {
      scene.mic = echo;
      break;
    }
    case EventClass::DoubleTalk: {
      scene.mic = echo;
      const auto start = static_cast<std::size_t>(sc.event_start_s * kSimSampleRate);
      const auto len = static_cast<std::size_t>(sc.event_duration_s * kSimSampleRate);
      detail::add_interferer(scene.mic, echo, start, std::min(len, n - start), sc.snr_db,
                             derive_seed(sc.seed, kStreamInterferer));
      break;
    }
    case EventClass::EchoPathChange:
    case EventClass::Repositioning: {
      const RoomIR moved =
          perturb_rir(room, sc.effective_severity(), derive_seed(sc.seed, kStreamPerturb));
      std::vector<double> echo2 = fft_convolve(scene.reference, moved.taps);
      echo2.resize(n);

      const double t0 = sc.event_start_s;
      const double t1 = sc.event_start_s + sc.event_duration_s;
      scene.mic.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / kSimSampleRate;
        double c = 0.0;
        if (t >= t0 && t < t0 + kPathCrossfadeSeconds)
          c = detail::raised_cosine((t - t0) / kPathCrossfadeSeconds);
        else if (t >= t0 + kPathCrossfadeSeconds && t < t1)
          c = 1.0;
        else if (t >= t1 && t < t1 + kPathCrossfadeSeconds)
          c = 1.0 - detail::raised_cosine((t - t1) / kPathCrossfadeSeconds);
        scene.mic[i] = (1.0 - c) * echo[i] + c * echo2[i];
      }
      if (sc.label == EventClass::Repositioning) {
        // the grasp is a light contact, placing the device back is the thump
        const auto s0 = static_cast<std::size_t>(t0 * kSimSampleRate);
        const auto s1 = static_cast<std::size_t>(t1 * kSimSampleRate);
        detail::add_burst(scene.mic, echo, s0, 1.0, derive_seed(sc.seed, kStreamBurst));
        detail::add_burst(scene.mic, echo, s1, 3.0, derive_seed(sc.seed, kStreamBurst + 1));
      }
      break;
    }
  }
  return scene;
}

struct DatasetSpec {
  int n_per_class = 25;
  std::uint64_t base_seed = 1;
  double duration_s = 12.0;
  std::vector<EventClass> classes{kAllEventClasses.begin(), kAllEventClasses.end()};
};

// Deterministic scenario list: per-scenario seeds, double-talk SNR uniform in
// [-5, +10] dB, severities jittered +-20 %.
inline std::vector<Scenario> enumerate_dataset(const DatasetSpec& spec) {
  if (spec.n_per_class < 2)
    throw std::invalid_argument("enumerate_dataset: need at least 2 scenarios per class");
  std::vector<Scenario> out;
  for (EventClass cls : spec.classes) {
    for (int i = 0; i < spec.n_per_class; ++i) {
      Scenario sc;
      sc.label = cls;
      sc.duration_s = spec.duration_s;
      sc.seed = derive_seed(spec.base_seed,
                            1000 * (static_cast<std::uint64_t>(cls) + 1) +
                                static_cast<std::uint64_t>(i));
      Rng rng(derive_seed(sc.seed, 99));
      if (cls == EventClass::DoubleTalk) sc.snr_db = rng.uniform(-5.0, 10.0);
      if (cls == EventClass::EchoPathChange)
        sc.severity = kSeverityEchoPathChange * rng.uniform(0.8, 1.2);
      if (cls == EventClass::Repositioning)
        sc.severity = kSeverityRepositioning * rng.uniform(0.8, 1.2);
      sc.validate();
      out.push_back(sc);
    }
  }
  return out;
}

// Renders a dataset to WAV pairs plus a manifest CSV; returns the rows.
inline std::vector<ManifestRow> make_dataset(const std::string& out_dir,
                                             const DatasetSpec& spec) {
  const std::vector<Scenario> scenarios = enumerate_dataset(spec);
  std::vector<ManifestRow> rows;
  rows.reserve(scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& sc = scenarios[i];
    char idx[8];
    std::snprintf(idx, sizeof(idx), "%03zu", i);
    ManifestRow row;
    row.id = std::string(idx) + "_" + std::string(to_string(sc.label));
    row.label = sc.label;
    row.seed = sc.seed;
    row.path_ref = out_dir + "/" + row.id + "_ref.wav";
    row.path_mic = out_dir + "/" + row.id + "_mic.wav";
    row.event_start_s = sc.event_start_s;
    row.event_dur_s = sc.event_duration_s;

    const RenderedScene scene = render_scenario(sc);
    write_wav(row.path_ref, scene.reference, kSimSampleRate);
    write_wav(row.path_mic, scene.mic, kSimSampleRate);
    rows.push_back(row);
  }
  write_manifest_csv(out_dir + "/manifest.csv", rows);
  return rows;
}

}  // namespace mhaec
