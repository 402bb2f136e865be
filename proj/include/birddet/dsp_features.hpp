#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "birddet/audio_io.hpp"

namespace birddet {

struct SpectrogramConfig {
  double frame_length_s = 0.020;
  double overlap_fraction = 0.5;
  double min_bin_spacing_hz = 93.0;
  double band_low_hz = 1000.0;
  double band_high_hz = 10000.0;
};

// Largest power of two N with sample_rate / N >= min_bin_spacing_hz.
int fft_length(int sample_rate, const SpectrogramConfig& cfg = {});

// Band-limited spectrogram frames, each normalized to unit sum. Frames whose
// in-band power is exactly zero are flagged and left all-zero; feature
// extraction skips them.
struct PmfFrames {
  Eigen::MatrixXd frames;          // n_frames x n_bins
  Eigen::VectorXd bin_freqs_hz;    // strictly increasing bin centers
  double frame_hop_s = 0.0;
  Eigen::VectorXd frame_total_power;  // in-band power before normalization
  std::vector<std::uint8_t> zero_power;

  int sample_rate = 0;
  int frame_length_samples = 0;
  int hop_samples = 0;

  Eigen::Index n_frames() const { return frames.rows(); }
  Eigen::Index n_bins() const { return frames.cols(); }
  double frame_start_s(Eigen::Index i) const {
    return static_cast<double>(i * hop_samples) / sample_rate;
  }
};

PmfFrames spectrogram(const AudioClip& clip, const SpectrogramConfig& cfg = {});

// The six per-frame spectral statistics, in catalog order 1..6.
struct FeatureVector {
  double mean_hz = 0.0;
  double std_hz = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw, non-excess
  double mode_hz = 0.0;
  double sfm = 0.0;
  bool degenerate = false;  // std below resolution; skewness/kurtosis forced to 0

  std::array<double, 6> as_array() const {
    return {mean_hz, std_hz, skewness, kurtosis, mode_hz, sfm};
  }
};

inline constexpr std::array<const char*, 6> kFeatureNames = {
    "mean_hz", "std_hz", "skewness", "kurtosis", "mode_hz", "sfm"};

FeatureVector frame_features(const Eigen::VectorXd& frame, const Eigen::VectorXd& bin_freqs);

// Frequency of the pmf maximum refined by a parabola through the peak bin and
// its two neighbors; band-edge peaks return the bin center itself.
double mode_interp(const Eigen::VectorXd& frame, const Eigen::VectorXd& bin_freqs);

// Subset of the six features, 1-based catalog indices, order preserved.
struct FeatureSet {
  std::vector<int> indices;

  std::size_t size() const { return indices.size(); }
  void validate() const;
  std::string to_string() const;   // "[5 2]"
  std::string slug() const;        // "5-2", filename-safe
  static FeatureSet parse(std::string_view text);
};

// The eight catalogued subsets, univariate through the full vector.
const std::vector<FeatureSet>& catalog_feature_sets();

// Per-dimension linear transform to zero mean and unit standard deviation.
struct Standardizer {
  Eigen::VectorXd offset;  // training mean
  Eigen::VectorXd scale;   // training sample standard deviation, > 0
};

// Fits on training rows only. `names` (optional) labels columns in errors.
Standardizer fit_standardizer(const Eigen::MatrixXd& features,
                              const std::vector<std::string>& names = {});
Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::MatrixXd& features);
Eigen::VectorXd apply_standardizer(const Standardizer& s, const Eigen::VectorXd& row);

// Indices of frames whose pre-normalization power reaches the nearest-rank
// 90th percentile; roughly the top decile survives, ties included.
std::vector<Eigen::Index> select_training_frames(const PmfFrames& pmf);

// Feature rows (catalog order, 6 columns) for the given frame indices.
// Zero-power frames must not be passed.
Eigen::MatrixXd frame_feature_matrix(const PmfFrames& pmf,
                                     const std::vector<Eigen::Index>& rows);

// Keep only the columns named by the set, in set order.
Eigen::MatrixXd restrict_to_set(const Eigen::MatrixXd& features6, const FeatureSet& set);

}  // namespace birddet
