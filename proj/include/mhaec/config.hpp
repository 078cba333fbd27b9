#pragma once

// Run configuration with the canonical operating point as defaults. Every
// field of the JSON config file is optional.

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mhaec/adaptive_filter.hpp"
#include "mhaec/hypothesis.hpp"
#include "mhaec/wav.hpp"  // io_error

namespace mhaec {

struct RunConfig {
  std::uint32_t sample_rate = 48000;
  std::size_t frame = 512;        // hop size
  std::size_t bands = 512;        // N_B
  std::size_t stats_bands = 100;  // N_S
  std::size_t taps = 20;          // filter length per band
  double epsilon = 1e-10;
  PnlmsParams pnlms;
  ControlConfig control;
  double t_c = 0.2;        // stats smoothing time constant, seconds
  double truncate_s = 5.0; // convergence period dropped from recorded stats
  std::uint64_t seed = 1;

  double frame_period() const {
    return static_cast<double>(frame) / static_cast<double>(sample_rate);
  }

  std::size_t truncate_frames() const {
    return static_cast<std::size_t>(
        std::ceil(truncate_s * static_cast<double>(sample_rate) / static_cast<double>(frame)));
  }

  void validate() const {
    if (sample_rate == 0) throw std::invalid_argument("config: sample_rate must be positive");
    if (bands != frame)
      throw std::invalid_argument("config: bands must equal frame size");
    if (stats_bands == 0 || stats_bands > bands)
      throw std::invalid_argument("config: stats_bands must lie in [1, bands]");
    if (taps == 0) throw std::invalid_argument("config: taps must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
    if (!(t_c > 0.0)) throw std::invalid_argument("config: t_c must be positive");
    if (!(truncate_s >= 0.0)) throw std::invalid_argument("config: truncate_s must be >= 0");
    control.validate();
  }
};

inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (j.contains("sample_rate")) cfg.sample_rate = j.at("sample_rate").get<std::uint32_t>();
  if (j.contains("frame")) cfg.frame = j.at("frame").get<std::size_t>();
  if (j.contains("bands")) cfg.bands = j.at("bands").get<std::size_t>();
  if (j.contains("stats_bands")) cfg.stats_bands = j.at("stats_bands").get<std::size_t>();
  if (j.contains("taps")) cfg.taps = j.at("taps").get<std::size_t>();
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  if (j.contains("pnlms_rho")) cfg.pnlms.rho = j.at("pnlms_rho").get<double>();
  if (j.contains("pnlms_delta")) cfg.pnlms.delta_p = j.at("pnlms_delta").get<double>();
  if (j.contains("copy_threshold_db"))
    cfg.control.copy_threshold_db = j.at("copy_threshold_db").get<double>();
  if (j.contains("shadow_to_main_holdover"))
    cfg.control.shadow_to_main_holdover = j.at("shadow_to_main_holdover").get<int>();
  if (j.contains("main_to_shadow_holdover"))
    cfg.control.main_to_shadow_holdover = j.at("main_to_shadow_holdover").get<int>();
  if (j.contains("mu_main")) cfg.control.mu_main = j.at("mu_main").get<double>();
  if (j.contains("t_c")) cfg.t_c = j.at("t_c").get<double>();
  if (j.contains("truncate_s")) cfg.truncate_s = j.at("truncate_s").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
  RunConfig cfg;
  try {
    apply_json(cfg, j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace mhaec
