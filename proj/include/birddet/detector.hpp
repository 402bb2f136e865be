#pragma once

#include <string>
#include <vector>

#include "birddet/audio_io.hpp"
#include "birddet/dsp_features.hpp"
#include "birddet/trainer.hpp"

namespace birddet {

struct DetectionConfig {
  double window_s = 0.5;
  double hop_s = 0.1;
  bool log_domain = false;  // average log-densities instead of densities

  void validate() const;
};

// Time-indexed window scores for one recording against one species model.
struct DetectionTrace {
  std::vector<double> times_s;  // window start times, constant hop
  std::vector<double> scores;   // averaged density per window, >= 0
  double window_s = 0.0;
  double hop_s = 0.0;
  std::string model_id;
};

// Window start times: t = 0, hop, 2*hop, ... while t + window <= duration.
std::vector<double> window_start_times(double duration_s, const DetectionConfig& cfg);

// Full test-side pipeline: spectrogram with no power thresholding, features
// restricted to the model's set, standardized with the training transform,
// per-frame density under the model's mixture, then the arithmetic mean over
// every frame whose start time falls in [t, t + window). Zero-power frames
// contribute density 0.
DetectionTrace score_trace(const AudioClip& clip, const SpeciesModel& model,
                           const DetectionConfig& cfg = {},
                           const SpectrogramConfig& spec_cfg = {});

}  // namespace birddet
