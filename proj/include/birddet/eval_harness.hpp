#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "birddet/audio_io.hpp"
#include "birddet/detector.hpp"
#include "birddet/trainer.hpp"

namespace birddet {

struct MixSpec {
  std::string background_id;
  std::string bird_id;
  double snr_db = 0.0;
  double insert_offset_s = 0.0;
  std::uint64_t seed = 0;
};

// Background with one bird clip added at a seeded random offset, scaled so
// the bird-to-background RMS ratio over the insertion interval hits snr_db.
struct TestSignal {
  AudioClip clip;
  double bird_start_s = 0.0;
  double bird_end_s = 0.0;
  double applied_gain = 1.0;
  MixSpec spec;
};

// The scaled bird addend is snapped to a fixed 2^-40 grid before the add, so
// integer-PCM backgrounds are recoverable bit for bit by subtraction while
// the SNR error stays far below 0.01 dB.
double snap_to_mix_grid(double x);

TestSignal mix_at_snr(const AudioClip& background, const AudioClip& bird, double snr_db,
                      std::uint64_t seed);

double rms(const std::vector<double>& samples, std::size_t begin, std::size_t end);

// One label per detection window: positive when the window overlaps the bird
// interval for strictly more than half the window length.
std::vector<bool> label_windows(const TestSignal& ts, const DetectionConfig& cfg = {});

struct RocResult {
  double auc = 0.0;
  std::vector<std::pair<double, double>> roc_points;  // (FPR, TPR), (0,0) .. (1,1)
  int n_pos = 0;
  int n_neg = 0;
};

// Threshold sweep over descending scores; tied scores form one diagonal
// segment, so the trapezoidal area equals the Mann-Whitney statistic with
// ties counted half.
RocResult roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels);

struct Condition {
  std::string tag;     // background corpus group
  double snr_db = 0.0;

  std::string name() const;  // "park+3dB"
};

struct ConditionResult {
  std::string species_id;
  std::string feature_set;
  Condition condition;
  int selected_k = 0;
  int n_reps = 0;
  int n_redraws = 0;
  double median_auc = 0.0;
  double p25_auc = 0.0;
  double p75_auc = 0.0;
  std::vector<double> aucs;  // per repetition, repetition order
};

struct ExperimentSummary {
  std::vector<ConditionResult> rows;
  int reps = 0;
  std::uint64_t master_seed = 0;
};

using ClipGroups = std::map<std::string, std::vector<AudioClip>>;

// The full repetition protocol: per model x condition x repetition, draw a
// background of the condition's tag and a bird clip of the model's species,
// mix at the condition's SNR, score with the model, label windows, compute
// the AUC; aggregate nearest-rank median and quartiles over repetitions.
// Repetitions hitting degenerate draws (single-class labels, silent
// segments) are redrawn at most five times. Deterministic given master_seed,
// independent of n_jobs.
ExperimentSummary run_experiment(const std::vector<SpeciesModel>& models,
                                 const ClipGroups& backgrounds_by_tag,
                                 const ClipGroups& birds_by_species,
                                 const std::vector<Condition>& conditions, int reps,
                                 std::uint64_t master_seed,
                                 const DetectionConfig& det_cfg = {}, int n_jobs = 1);

}  // namespace birddet
