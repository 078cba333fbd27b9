// Command line front end: simulate | aec | features | evaluate.
//
// Exit codes: 0 success, 2 usage error, 3 input/validation error, 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mhaec/config.hpp"
#include "mhaec/csv.hpp"
#include "mhaec/features.hpp"
#include "mhaec/pipeline.hpp"
#include "mhaec/simulate.hpp"
#include "mhaec/wav.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitIo = 4;

// Flag-level overrides of the JSON config; only values the user actually
// passed are applied.
struct ConfigFlags {
  CLI::Option* opt[14] = {};
  std::uint32_t sample_rate = 48000;
  std::size_t frame = 512, bands = 512, stats_bands = 100, taps = 20;
  double epsilon = 1e-10, rho = 0.01, delta_p = 0.01;
  double copy_threshold_db = 10.0, mu_main = 0.5, t_c = 0.2, truncate_s = 5.0;
  int shadow_to_main = 2, main_to_shadow = 5;

  void attach(CLI::App& app) {
    opt[0] = app.add_option("--sample-rate", sample_rate, "expected WAV sample rate");
    opt[1] = app.add_option("--frame", frame, "frame (hop) size in samples");
    opt[2] = app.add_option("--bands", bands, "sub-band count");
    opt[3] = app.add_option("--stats-bands", stats_bands, "bands feeding the statistics");
    opt[4] = app.add_option("--taps", taps, "adaptive filter taps per band");
    opt[5] = app.add_option("--epsilon", epsilon, "update regularization");
    opt[6] = app.add_option("--pnlms-rho", rho, "proportionate floor share");
    opt[7] = app.add_option("--pnlms-delta", delta_p, "proportionate magnitude floor");
    opt[8] = app.add_option("--copy-threshold-db", copy_threshold_db, "copy threshold");
    opt[9] = app.add_option("--shadow-to-main-holdover", shadow_to_main,
                            "frames the shadow must win");
    opt[10] = app.add_option("--main-to-shadow-holdover", main_to_shadow,
                             "frames the main must win");
    opt[11] = app.add_option("--mu-main", mu_main, "main filter step size");
    opt[12] = app.add_option("--t-c", t_c, "stats smoothing time constant, seconds");
    opt[13] = app.add_option("--truncate-s", truncate_s, "convergence period to drop, seconds");
  }

  void apply(mhaec::RunConfig& cfg) const {
    if (opt[0]->count()) cfg.sample_rate = sample_rate;
    if (opt[1]->count()) cfg.frame = frame;
    if (opt[2]->count()) cfg.bands = bands;
    if (opt[3]->count()) cfg.stats_bands = stats_bands;
    if (opt[4]->count()) cfg.taps = taps;
    if (opt[5]->count()) cfg.epsilon = epsilon;
    if (opt[6]->count()) cfg.pnlms.rho = rho;
    if (opt[7]->count()) cfg.pnlms.delta_p = delta_p;
    if (opt[8]->count()) cfg.control.copy_threshold_db = copy_threshold_db;
    if (opt[9]->count()) cfg.control.shadow_to_main_holdover = shadow_to_main;
    if (opt[10]->count()) cfg.control.main_to_shadow_holdover = main_to_shadow;
    if (opt[11]->count()) cfg.control.mu_main = mu_main;
    if (opt[12]->count()) cfg.t_c = t_c;
    if (opt[13]->count()) cfg.truncate_s = truncate_s;
  }
};

mhaec::RunConfig make_config(const std::string& config_path, const ConfigFlags& flags) {
  mhaec::RunConfig cfg;
  if (!config_path.empty()) cfg = mhaec::load_config(config_path);
  flags.apply(cfg);
  cfg.validate();
  return cfg;
}

int cmd_simulate(const mhaec::RunConfig& cfg, const std::string& out_dir, int n_per_class,
                 std::uint64_t seed, bool seed_set, double duration_s,
                 const std::vector<std::string>& class_names) {
  mhaec::DatasetSpec spec;
  spec.n_per_class = n_per_class;
  spec.base_seed = seed_set ? seed : cfg.seed;
  spec.duration_s = duration_s;
  if (!class_names.empty()) {
    spec.classes.clear();
    for (const std::string& name : class_names)
      spec.classes.push_back(mhaec::event_class_from_string(name));
  }
  std::filesystem::create_directories(out_dir);
  mhaec::make_dataset(out_dir, spec);
  std::cout << out_dir << "/manifest.csv\n";
  return 0;
}

void run_one_aec(const mhaec::RunConfig& cfg, const std::string& ref_path,
                 const std::string& mic_path, const std::string& stats_path,
                 const std::string& residual_path) {
  const mhaec::WavData ref = mhaec::read_wav(ref_path);
  const mhaec::WavData mic = mhaec::read_wav(mic_path);
  if (ref.sample_rate != cfg.sample_rate || mic.sample_rate != cfg.sample_rate)
    throw std::invalid_argument("expected " + std::to_string(cfg.sample_rate) +
                                " Hz input, got " + std::to_string(ref.sample_rate) + " / " +
                                std::to_string(mic.sample_rate));
  if (ref.samples.size() != mic.samples.size())
    throw std::invalid_argument("reference and microphone lengths differ (" +
                                std::to_string(ref.samples.size()) + " vs " +
                                std::to_string(mic.samples.size()) + " samples)");

  const bool want_residual = !residual_path.empty();
  const mhaec::CancelerResult result =
      mhaec::run_canceler(ref.samples, mic.samples, cfg, want_residual);
  mhaec::write_stats_csv(stats_path, result.smoothed);
  if (want_residual) mhaec::write_wav(residual_path, result.residual, cfg.sample_rate);
}

int cmd_aec(const mhaec::RunConfig& cfg, const std::string& ref_path,
            const std::string& mic_path, const std::string& stats_path,
            const std::string& residual_path, const std::string& manifest_path,
            const std::string& out_dir, bool write_residuals) {
  if (!manifest_path.empty()) {
    std::filesystem::create_directories(out_dir);
    for (const mhaec::ManifestRow& row : mhaec::read_manifest_csv(manifest_path)) {
      const std::string stats = out_dir + "/" + row.id + "_stats.csv";
      const std::string residual =
          write_residuals ? out_dir + "/" + row.id + "_residual.wav" : std::string{};
      run_one_aec(cfg, row.path_ref, row.path_mic, stats, residual);
    }
    std::cout << out_dir << "\n";
  } else {
    run_one_aec(cfg, ref_path, mic_path, stats_path, residual_path);
    std::cout << stats_path << "\n";
  }
  return 0;
}

int cmd_features(const std::string& manifest_path, const std::string& stats_dir,
                 const std::vector<std::string>& stats_files, const std::string& label_name,
                 const std::string& out_path) {
  std::vector<mhaec::EventRecord> records;
  if (!manifest_path.empty()) {
    for (const mhaec::ManifestRow& row : mhaec::read_manifest_csv(manifest_path)) {
      const std::string stats_path = stats_dir + "/" + row.id + "_stats.csv";
      const std::vector<mhaec::StatsVector> traj = mhaec::read_stats_csv(stats_path);
      mhaec::EventRecord r;
      r.label = row.label;
      r.seed = row.seed;
      r.features = mhaec::extract_features(traj);
      records.push_back(r);
    }
  } else {
    const mhaec::EventClass label = mhaec::event_class_from_string(label_name);
    for (const std::string& path : stats_files) {
      const std::vector<mhaec::StatsVector> traj = mhaec::read_stats_csv(path);
      mhaec::EventRecord r;
      r.label = label;
      r.seed = 0;
      r.features = mhaec::extract_features(traj);
      records.push_back(r);
    }
  }
  mhaec::write_features_csv(out_path, records);
  std::cout << out_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& features_path, int k, const std::string& report_path,
                 const std::string& confusion_path) {
  const std::vector<mhaec::EventRecord> raw = mhaec::read_features_csv(features_path);
  if (raw.empty()) throw std::invalid_argument("no feature records in " + features_path);

  const mhaec::ZScoreParams params = mhaec::zscore_fit(raw);
  std::vector<mhaec::EventRecord> normed = raw;
  for (mhaec::EventRecord& r : normed) r.features = mhaec::zscore_apply(params, r.features);

  const mhaec::LooResult loo = mhaec::evaluate_loo(normed, k);
  const std::string text = mhaec::format_confusion_text(loo);
  std::cout << text;
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) throw mhaec::io_error("cannot open '" + report_path + "' for writing");
    out << text;
  }
  if (!confusion_path.empty()) mhaec::write_confusion_csv(confusion_path, loo);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-band multi-hypothesis echo canceler and acoustic scene features"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; all fields optional");
  ConfigFlags flags;
  flags.attach(app);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Render a labeled synthetic scenario dataset");
  std::string sim_out = "dataset";
  int sim_n = 25;
  std::uint64_t sim_seed = 1;
  double sim_duration = 12.0;
  std::vector<std::string> sim_classes;
  sim->add_option("--out-dir", sim_out, "output directory");
  sim->add_option("--n-per-class", sim_n, "scenarios per event class")
      ->check(CLI::Range(2, 10000));
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "base seed");
  sim->add_option("--duration-s", sim_duration, "clip length in seconds")
      ->check(CLI::Range(8.0, 600.0));
  sim->add_option("--classes", sim_classes, "subset of event classes")
      ->delimiter(',')
      ->check(CLI::IsMember(
          {"SteadyState", "DoubleTalk", "EchoPathChange", "Repositioning"}));

  // aec
  auto* aec = app.add_subcommand("aec", "Cancel echo and export the statistics trajectory");
  std::string aec_ref, aec_mic, aec_stats = "stats.csv", aec_residual;
  std::string aec_manifest, aec_out_dir = "aec_out";
  bool aec_write_residuals = false;
  aec->add_option("--ref", aec_ref, "reference WAV (48 kHz float mono)");
  aec->add_option("--mic", aec_mic, "microphone WAV (48 kHz float mono)");
  aec->add_option("--stats", aec_stats, "output stats CSV");
  aec->add_option("--residual", aec_residual, "output residual WAV (optional)");
  aec->add_option("--manifest", aec_manifest, "process every pair in a dataset manifest");
  aec->add_option("--out-dir", aec_out_dir, "output directory for manifest mode");
  aec->add_flag("--write-residuals", aec_write_residuals,
                "also write residual WAVs in manifest mode");

  // features
  auto* feat = app.add_subcommand("features", "Reduce stats trajectories to feature vectors");
  std::string feat_manifest, feat_stats_dir = "aec_out", feat_out = "features.csv";
  std::string feat_label = "SteadyState";
  std::vector<std::string> feat_files;
  feat->add_option("--manifest", feat_manifest, "dataset manifest (labels and seeds)");
  feat->add_option("--stats-dir", feat_stats_dir, "directory with <id>_stats.csv files");
  feat->add_option("--out", feat_out, "output features CSV");
  feat->add_option("--label", feat_label, "label for bare stats files");
  feat->add_option("stats", feat_files, "stats CSV files (without a manifest)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Leave-one-out classification report");
  std::string eval_features = "features.csv", eval_report, eval_confusion;
  int eval_k = 5;
  eval->add_option("--features", eval_features, "features CSV");
  eval->add_option("--k", eval_k, "neighbors for k-NN")->check(CLI::Range(1, 1000));
  eval->add_option("--report", eval_report, "write the text report here");
  eval->add_option("--confusion", eval_confusion, "write the confusion matrix CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(make_config(config_path, flags), sim_out, sim_n, sim_seed,
                          !sim_seed_opt->empty(), sim_duration, sim_classes);
    if (aec->parsed()) {
      if (aec_manifest.empty() && (aec_ref.empty() || aec_mic.empty())) {
        std::cerr << "aec: provide --ref and --mic, or --manifest\n";
        return kExitUsage;
      }
      return cmd_aec(make_config(config_path, flags), aec_ref, aec_mic, aec_stats,
                     aec_residual, aec_manifest, aec_out_dir, aec_write_residuals);
    }
    if (feat->parsed()) {
      if (feat_manifest.empty() && feat_files.empty()) {
        std::cerr << "features: provide --manifest or stats CSV files\n";
        return kExitUsage;
      }
      return cmd_features(feat_manifest, feat_stats_dir, feat_files, feat_label, feat_out);
    }
    if (eval->parsed()) return cmd_evaluate(eval_features, eval_k, eval_report, eval_confusion);
  } catch (const mhaec::io_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
