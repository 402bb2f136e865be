#include "birddet/detector.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace birddet {

void DetectionConfig::validate() const {
  if (!(hop_s > 0.0 && hop_s <= window_s))
    throw std::invalid_argument("detection: need 0 < hop <= window");
}

std::vector<double> window_start_times(double duration_s, const DetectionConfig& cfg) {
  cfg.validate();
  if (duration_s < cfg.window_s)
    throw std::invalid_argument("detection: clip shorter than one window");
  auto n = static_cast<std::size_t>(std::floor((duration_s - cfg.window_s) / cfg.hop_s)) + 1;
  std::vector<double> times(n);
  for (std::size_t j = 0; j < n; ++j) times[j] = static_cast<double>(j) * cfg.hop_s;
  return times;
}

DetectionTrace score_trace(const AudioClip& clip, const SpeciesModel& model,
                           const DetectionConfig& cfg, const SpectrogramConfig& spec_cfg) {
  cfg.validate();
  model.feature_set.validate();
  if (model.gmm.dim != static_cast<int>(model.feature_set.size()) ||
      model.standardizer.offset.size() != static_cast<Eigen::Index>(model.feature_set.size()))
    throw std::invalid_argument("score_trace: feature-set/model mismatch");

  std::vector<double> times = window_start_times(clip.duration_seconds(), cfg);

  PmfFrames pmf = spectrogram(clip, spec_cfg);
  const Eigen::Index n_frames = pmf.n_frames();

  std::vector<Eigen::Index> live;
  live.reserve(static_cast<std::size_t>(n_frames));
  for (Eigen::Index i = 0; i < n_frames; ++i) {
    if (!pmf.zero_power[static_cast<std::size_t>(i)]) live.push_back(i);
  }

  // log of the smallest normal double; stands in for log(0) in log-domain mode
  constexpr double kLogFloor = -708.0;
  std::vector<double> frame_score(static_cast<std::size_t>(n_frames),
                                  cfg.log_domain ? kLogFloor : 0.0);
  if (!live.empty()) {
    Eigen::MatrixXd z = apply_standardizer(
        model.standardizer,
        restrict_to_set(frame_feature_matrix(pmf, live), model.feature_set));
    GmmDensity density(model.gmm);
    Eigen::VectorXd log_pdf = density.log_pdf_rows(z);
    for (std::size_t r = 0; r < live.size(); ++r) {
      double lp = log_pdf[static_cast<Eigen::Index>(r)];
      frame_score[static_cast<std::size_t>(live[r])] = cfg.log_domain ? lp : std::exp(lp);
    }
  }

  DetectionTrace trace;
  trace.window_s = cfg.window_s;
  trace.hop_s = cfg.hop_s;
  trace.model_id = model.species_id + "/" + model.feature_set.to_string();
  trace.times_s = times;
  trace.scores.resize(times.size());

  // Frames belong to a window when their start time lies in [t, t + window);
  // both boundaries advance monotonically, so two cursors suffice.
  std::size_t lo = 0, hi = 0;
  auto n = static_cast<std::size_t>(n_frames);
  for (std::size_t j = 0; j < times.size(); ++j) {
    double t = times[j];
    while (lo < n && pmf.frame_start_s(static_cast<Eigen::Index>(lo)) < t) ++lo;
    while (hi < n && pmf.frame_start_s(static_cast<Eigen::Index>(hi)) < t + cfg.window_s) ++hi;
    if (hi <= lo) {
      trace.scores[j] = 0.0;  // no frame starts inside this window
      continue;
    }
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += frame_score[i];
    trace.scores[j] = sum / static_cast<double>(hi - lo);
  }
  return trace;
}

}  // namespace birddet
