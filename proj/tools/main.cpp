#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "birddet/version.hpp"
#include "commands.hpp"

using namespace birddet;

namespace {

// The config file must be applied before CLI11 binds defaults, so explicit
// flags can override it; scan argv by hand for --config first.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  if (const char* env = std::getenv("BIRDDET_CONFIG")) return env;
  return {};
}

void add_spectrogram_flags(CLI::App* cmd, cli::Options& opts) {
  cmd->add_option("--frame-length", opts.spectrogram.frame_length_s,
                  "Analysis frame length in seconds");
  cmd->add_option("--overlap", opts.spectrogram.overlap_fraction, "Frame overlap fraction");
  cmd->add_option("--bin-spacing", opts.spectrogram.min_bin_spacing_hz,
                  "Minimum FFT bin spacing in Hz");
  cmd->add_option("--band-low", opts.spectrogram.band_low_hz, "Band lower edge in Hz");
  cmd->add_option("--band-high", opts.spectrogram.band_high_hz, "Band upper edge in Hz");
}

void add_detection_flags(CLI::App* cmd, cli::Options& opts) {
  cmd->add_option("--window", opts.detection.window_s, "Averaging window in seconds");
  cmd->add_option("--hop", opts.detection.hop_s, "Window step in seconds");
  cmd->add_flag("--log-domain", opts.detection.log_domain,
                "Average log-densities instead of densities");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) +
               " - per-species bird vocalization detection by novelty scoring"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  cli::Options opts;
  std::string config_path = find_config_path(argc, argv);
  try {
    if (!config_path.empty()) cli::apply_config_file(config_path, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::string config_sink;
  app.add_option("--config", config_sink, "JSON config file (or set BIRDDET_CONFIG)");

  // features
  std::filesystem::path feat_input, feat_out = ".";
  auto* features = app.add_subcommand("features", "Extract per-frame spectral features to CSV");
  features->add_option("input", feat_input, "WAV file or directory")->required();
  features->add_option("--out", feat_out, "Output directory");
  features->add_option("--config", config_sink, "JSON config file");
  add_spectrogram_flags(features, opts);

  // train
  std::filesystem::path train_corpus, train_out = "model.json";
  std::string train_species_name;
  auto* train = app.add_subcommand("train", "Fit a species model from a corpus directory");
  train->add_option("corpus", train_corpus, "Directory of training WAVs")->required();
  train->add_option("--species", train_species_name, "Species id (default: directory name)");
  train->add_option("--out", train_out, "Output model file");
  train->add_option("--features", opts.feature_set_text,
                    "Feature subset, e.g. \"5\" or \"1,2,6\"");
  train->add_option("--n-vectors", opts.train.n_vectors, "Training vectors to subsample");
  train->add_option("--restarts", opts.train.n_restarts, "EM restarts per component count");
  train->add_option("--k-min", opts.train.k_min, "Smallest component count");
  train->add_option("--k-max", opts.train.k_max, "Largest component count");
  train->add_option("--seed", opts.seed, "Master random seed");
  train->add_option("--jobs", opts.jobs, "Worker threads");
  train->add_option("--config", config_sink, "JSON config file");
  add_spectrogram_flags(train, opts);

  // score
  cli::ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score a recording against a model");
  score->add_option("recording", score_args.recording, "WAV file")->required();
  score->add_option("model", score_args.model_file, "Model JSON file")->required();
  score->add_option("--out", score_args.out_csv, "Trace CSV path")->required();
  score->add_option("--json", score_args.out_json, "Also write the trace as JSON");
  score->add_option("--svg", score_args.out_svg, "Also render an overlay plot");
  score->add_option("--truth", score_args.truth, "Known interval start:end seconds, for the plot");
  score->add_option("--config", config_sink, "JSON config file");
  add_detection_flags(score, opts);

  // evaluate
  cli::EvaluateArgs eval_args;
  auto* evaluate =
      app.add_subcommand("evaluate", "Run the mixing/SNR repetition protocol and report AUC");
  evaluate->add_option("--models", eval_args.models_dir, "Directory of model JSON files")
      ->required();
  evaluate->add_option("--backgrounds", eval_args.backgrounds_dir,
                       "Background corpus; one subdirectory per condition tag")
      ->required();
  evaluate->add_option("--birds", eval_args.birds_dir,
                       "Bird corpus; one subdirectory per species id")
      ->required();
  evaluate->add_option("--condition", eval_args.conditions,
                       "Condition tag:snr_db, repeatable (e.g. park:+3)")
      ->required();
  evaluate->add_option("--reps", eval_args.reps, "Repetitions per condition");
  evaluate->add_option("--out", eval_args.out_dir, "Output directory")->required();
  evaluate->add_flag("--svg", eval_args.write_svg, "Render the median/IQR plot");
  evaluate->add_option("--seed", opts.seed, "Master random seed");
  evaluate->add_option("--jobs", opts.jobs, "Worker threads");
  evaluate->add_option("--config", config_sink, "JSON config file");
  add_detection_flags(evaluate, opts);

  // report
  std::filesystem::path report_summary, report_out = ".";
  bool report_svg = false;
  auto* report = app.add_subcommand("report", "Re-render tables and plots from a summary JSON");
  report->add_option("summary", report_summary, "summary.json from evaluate")->required();
  report->add_option("--out", report_out, "Output directory");
  report->add_flag("--svg", report_svg, "Render the median/IQR plot");

  CLI11_PARSE(app, argc, argv);

  try {
    if (features->parsed()) return cli::cmd_features(feat_input, feat_out, opts);
    if (train->parsed())
      return cli::cmd_train(train_corpus, train_species_name, train_out, opts);
    if (score->parsed()) return cli::cmd_score(score_args, opts);
    if (evaluate->parsed()) return cli::cmd_evaluate(eval_args, opts);
    if (report->parsed()) return cli::cmd_report(report_summary, report_out, report_svg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
