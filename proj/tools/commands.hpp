#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "birddet/detector.hpp"
#include "birddet/eval_harness.hpp"
#include "birddet/trainer.hpp"

namespace birddet::cli {

// Resolved run configuration: defaults, overlaid by the config file (--config
// flag or BIRDDET_CONFIG), overlaid in turn by explicit command-line flags.
struct Options {
  SpectrogramConfig spectrogram;
  TrainConfig train;
  DetectionConfig detection;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string feature_set_text = "5";
};

// Parse the JSON config file into opts; unknown keys are errors.
void apply_config_file(const std::filesystem::path& path, Options& opts);

int cmd_features(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                 const Options& opts);

int cmd_train(const std::filesystem::path& corpus_dir, const std::string& species,
              const std::filesystem::path& out_model, const Options& opts);

struct ScoreArgs {
  std::filesystem::path recording;
  std::filesystem::path model_file;
  std::filesystem::path out_csv;
  std::filesystem::path out_json;  // optional
  std::filesystem::path out_svg;   // optional
  std::string truth;               // optional "start:end" seconds
};
int cmd_score(const ScoreArgs& args, const Options& opts);

struct EvaluateArgs {
  std::filesystem::path models_dir;
  std::filesystem::path backgrounds_dir;
  std::filesystem::path birds_dir;
  std::vector<std::string> conditions;  // "tag:snr_db"
  int reps = 50;
  std::filesystem::path out_dir;
  bool write_svg = false;
};
int cmd_evaluate(const EvaluateArgs& args, const Options& opts);

int cmd_report(const std::filesystem::path& summary_json, const std::filesystem::path& out_dir,
               bool write_svg);

}  // namespace birddet::cli
