#include "birddet/dsp_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "birddet/fft.hpp"
#include "birddet/util.hpp"

namespace birddet {

namespace {

constexpr double kSfmFloor = 1e-12;  // inside the log only
constexpr double kDegenerateStdFraction = 1e-9;

void validate_config(const SpectrogramConfig& cfg) {
  if (!(cfg.frame_length_s > 0.0)) throw std::invalid_argument("spectrogram: frame length must be positive");
  if (!(cfg.overlap_fraction >= 0.0 && cfg.overlap_fraction < 1.0))
    throw std::invalid_argument("spectrogram: overlap fraction must be in [0, 1)");
  if (!(cfg.min_bin_spacing_hz > 0.0))
    throw std::invalid_argument("spectrogram: min bin spacing must be positive");
  if (!(cfg.band_low_hz > 0.0 && cfg.band_low_hz < cfg.band_high_hz))
    throw std::invalid_argument("spectrogram: band bounds must satisfy 0 < low < high");
}

void validate_frame_args(const Eigen::VectorXd& frame, const Eigen::VectorXd& bin_freqs) {
  if (frame.size() != bin_freqs.size())
    throw std::invalid_argument("frame_features: frame and bin sizes differ");
  if (frame.size() < 3) throw std::invalid_argument("frame_features: need at least 3 bins");
  if (std::abs(frame.sum() - 1.0) > 1e-6)
    throw std::invalid_argument("frame_features: frame is not normalized to unit sum");
}

}  // namespace

int fft_length(int sample_rate, const SpectrogramConfig& cfg) {
  validate_config(cfg);
  if (sample_rate <= 0) throw std::invalid_argument("fft_length: sample rate must be positive");
  if (sample_rate / 2.0 < cfg.min_bin_spacing_hz)
    throw std::invalid_argument("fft_length: sample rate too small for the requested bin spacing");
  int n = 2;
  while (sample_rate / (2.0 * n) >= cfg.min_bin_spacing_hz) n *= 2;
  return n;
}

PmfFrames spectrogram(const AudioClip& clip, const SpectrogramConfig& cfg) {
  validate_config(cfg);
  if (clip.sample_rate <= 0) throw std::invalid_argument("spectrogram: invalid sample rate");
  int fs = clip.sample_rate;

  auto frame_len = static_cast<int>(std::lround(cfg.frame_length_s * fs));
  if (frame_len < 2) throw std::invalid_argument("spectrogram: frame length under 2 samples");
  if (clip.samples.size() < static_cast<std::size_t>(frame_len))
    throw std::invalid_argument("spectrogram: clip shorter than one frame");
  auto hop = static_cast<int>(std::lround(frame_len * (1.0 - cfg.overlap_fraction)));
  hop = std::max(hop, 1);

  int n_fft = fft_length(fs, cfg);

  // Bin centers strictly inside the band; Nyquist caps the one-sided range.
  std::vector<int> band_bins;
  for (int k = 0; k <= n_fft / 2; ++k) {
    double f = static_cast<double>(k) * fs / n_fft;
    if (f > cfg.band_low_hz && f < cfg.band_high_hz) band_bins.push_back(k);
  }
  if (band_bins.empty())
    throw std::invalid_argument("spectrogram: no frequency bins inside the band");

  std::vector<double> window(frame_len);
  for (int i = 0; i < frame_len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / frame_len);
  }

  auto n_frames = static_cast<Eigen::Index>(
      (clip.samples.size() - static_cast<std::size_t>(frame_len)) / hop + 1);

  PmfFrames out;
  out.frames.setZero(n_frames, static_cast<Eigen::Index>(band_bins.size()));
  out.bin_freqs_hz.resize(static_cast<Eigen::Index>(band_bins.size()));
  for (std::size_t j = 0; j < band_bins.size(); ++j) {
    out.bin_freqs_hz[static_cast<Eigen::Index>(j)] =
        static_cast<double>(band_bins[j]) * fs / n_fft;
  }
  out.frame_total_power.resize(n_frames);
  out.zero_power.assign(static_cast<std::size_t>(n_frames), 0);
  out.sample_rate = fs;
  out.frame_length_samples = frame_len;
  out.hop_samples = hop;
  out.frame_hop_s = static_cast<double>(hop) / fs;

  std::vector<double> windowed(frame_len);
  std::vector<double> padded(static_cast<std::size_t>(n_fft));
  for (Eigen::Index i = 0; i < n_frames; ++i) {
    std::size_t start = static_cast<std::size_t>(i) * hop;
    for (int j = 0; j < frame_len; ++j) windowed[j] = clip.samples[start + j] * window[j];

    // The 20 ms frame usually exceeds the FFT length; keep the centered N
    // samples so the bin spacing constraint stays intact.
    std::fill(padded.begin(), padded.end(), 0.0);
    if (frame_len >= n_fft) {
      int offset = (frame_len - n_fft) / 2;
      std::copy(windowed.begin() + offset, windowed.begin() + offset + n_fft, padded.begin());
    } else {
      std::copy(windowed.begin(), windowed.end(), padded.begin());
    }

    std::vector<double> power = power_spectrum(padded);
    double total = 0.0;
    for (std::size_t j = 0; j < band_bins.size(); ++j) {
      double p = power[static_cast<std::size_t>(band_bins[j])];
      out.frames(i, static_cast<Eigen::Index>(j)) = p;
      total += p;
    }
    out.frame_total_power[i] = total;
    if (total == 0.0) {
      out.zero_power[static_cast<std::size_t>(i)] = 1;
    } else {
      out.frames.row(i) /= total;
    }
  }
  return out;
}

double mode_interp(const Eigen::VectorXd& frame, const Eigen::VectorXd& bin_freqs) {
  validate_frame_args(frame, bin_freqs);
  Eigen::Index k = 0;
  frame.maxCoeff(&k);  // lowest index on ties
  Eigen::Index last = frame.size() - 1;
  if (k == 0 || k == last) return bin_freqs[k];

  double x1 = bin_freqs[k - 1], x2 = bin_freqs[k], x3 = bin_freqs[k + 1];
  double y1 = frame[k - 1], y2 = frame[k], y3 = frame[k + 1];
  // Equal neighbor values put the vertex midway between them, which on the
  // uniform FFT grid is the center bin itself; answer exactly, no formula.
  if (y1 == y3) return x2;
  double denom = y1 * (x2 - x3) + y2 * (x3 - x1) + y3 * (x1 - x2);
  if (denom == 0.0) return x2;  // flat triple
  double vertex = (y1 * (x2 * x2 - x3 * x3) + y2 * (x3 * x3 - x1 * x1) +
                   y3 * (x1 * x1 - x2 * x2)) /
                  (2.0 * denom);
  return std::clamp(vertex, x1, x3);
}

FeatureVector frame_features(const Eigen::VectorXd& frame, const Eigen::VectorXd& bin_freqs) {
  validate_frame_args(frame, bin_freqs);
  const Eigen::Index n = frame.size();

  FeatureVector fv;
  fv.mean_hz = frame.dot(bin_freqs);

  Eigen::VectorXd centered = bin_freqs.array() - fv.mean_hz;
  double var = frame.dot(centered.cwiseProduct(centered));
  fv.std_hz = std::sqrt(std::max(var, 0.0));

  double band_width = bin_freqs[n - 1] - bin_freqs[0];
  fv.degenerate = fv.std_hz < kDegenerateStdFraction * band_width;
  if (!fv.degenerate) {
    double m3 = 0.0, m4 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = centered[i];
      double d3 = d * d * d;
      m3 += frame[i] * d3;
      m4 += frame[i] * d3 * d;
    }
    double s3 = fv.std_hz * fv.std_hz * fv.std_hz;
    fv.skewness = m3 / s3;
    fv.kurtosis = m4 / (s3 * fv.std_hz);
  }

  fv.mode_hz = mode_interp(frame, bin_freqs);

  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_sum += std::log(std::max(frame[i], kSfmFloor));
  double geometric = std::exp(log_sum / static_cast<double>(n));
  double arithmetic = frame.sum() / static_cast<double>(n);
  fv.sfm = std::min(geometric / arithmetic, 1.0);
  return fv;
}

void FeatureSet::validate() const {
  if (indices.empty()) throw std::invalid_argument("feature set is empty");
  std::array<bool, 6> seen{};
  for (int idx : indices) {
    if (idx < 1 || idx > 6)
      throw std::invalid_argument("feature index out of range 1..6: " + std::to_string(idx));
    if (seen[static_cast<std::size_t>(idx - 1)])
      throw std::invalid_argument("duplicate feature index: " + std::to_string(idx));
    seen[static_cast<std::size_t>(idx - 1)] = true;
  }
}

std::string FeatureSet::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) s += ' ';
    s += std::to_string(indices[i]);
  }
  return s + "]";
}

std::string FeatureSet::slug() const {
  std::string s;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) s += '-';
    s += std::to_string(indices[i]);
  }
  return s;
}

FeatureSet FeatureSet::parse(std::string_view text) {
  FeatureSet fs;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t pos = 0;
    int v = std::stoi(token, &pos);
    if (pos != token.size()) throw std::invalid_argument("bad feature index: " + token);
    fs.indices.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == '[' || c == ']' || c == ',' || c == ' ' || c == '\t' || c == '-') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  fs.validate();
  return fs;
}

const std::vector<FeatureSet>& catalog_feature_sets() {
  static const std::vector<FeatureSet> sets = {
      FeatureSet{{1}},          FeatureSet{{5}},
      FeatureSet{{1, 2}},       FeatureSet{{5, 2}},
      FeatureSet{{1, 2, 6}},    FeatureSet{{5, 2, 6}},
      FeatureSet{{1, 2, 3, 4}}, FeatureSet{{1, 2, 3, 4, 5, 6}},
  };
  return sets;
}

Standardizer fit_standardizer(const Eigen::MatrixXd& features,
                              const std::vector<std::string>& names) {
  const Eigen::Index n = features.rows();
  if (n < 2) throw std::invalid_argument("fit_standardizer: need at least 2 rows");

  Standardizer s;
  s.offset = features.colwise().mean();
  Eigen::MatrixXd centered = features.rowwise() - s.offset.transpose();
  Eigen::VectorXd var = centered.colwise().squaredNorm() / static_cast<double>(n - 1);
  s.scale = var.cwiseSqrt();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
    if (!(s.scale[j] > 0.0) || !std::isfinite(s.scale[j])) {
      std::string name = static_cast<std::size_t>(j) < names.size()
                             ? names[static_cast<std::size_t>(j)]
                             : "column " + std::to_string(j);
      throw std::invalid_argument("fit_standardizer: zero variance in feature " + name);
    }
  }
  return s;
}

Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::MatrixXd& features) {
  if (features.cols() != s.offset.size())
    throw std::invalid_argument("apply_standardizer: dimension mismatch");
  return (features.rowwise() - s.offset.transpose()).array().rowwise() /
         s.scale.transpose().array();
}

Eigen::VectorXd apply_standardizer(const Standardizer& s, const Eigen::VectorXd& row) {
  if (row.size() != s.offset.size())
    throw std::invalid_argument("apply_standardizer: dimension mismatch");
  return (row - s.offset).cwiseQuotient(s.scale);
}

std::vector<Eigen::Index> select_training_frames(const PmfFrames& pmf) {
  const Eigen::Index n = pmf.n_frames();
  if (n < 10) throw std::invalid_argument("select_training_frames: need at least 10 frames");
  std::vector<double> powers(pmf.frame_total_power.data(), pmf.frame_total_power.data() + n);
  double threshold = nearest_rank_percentile(powers, 90.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pmf.frame_total_power[i] >= threshold) keep.push_back(i);
  }
  return keep;
}

Eigen::MatrixXd frame_feature_matrix(const PmfFrames& pmf,
                                     const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), 6);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::Index i = rows[r];
    if (pmf.zero_power[static_cast<std::size_t>(i)])
      throw std::invalid_argument("frame_feature_matrix: zero-power frame " + std::to_string(i));
    FeatureVector fv = frame_features(pmf.frames.row(i).transpose(), pmf.bin_freqs_hz);
    auto arr = fv.as_array();
    for (int c = 0; c < 6; ++c) out(static_cast<Eigen::Index>(r), c) = arr[static_cast<std::size_t>(c)];
  }
  return out;
}

Eigen::MatrixXd restrict_to_set(const Eigen::MatrixXd& features6, const FeatureSet& set) {
  set.validate();
  if (features6.cols() != 6)
    throw std::invalid_argument("restrict_to_set: expected 6 feature columns");
  Eigen::MatrixXd out(features6.rows(), static_cast<Eigen::Index>(set.size()));
  for (std::size_t j = 0; j < set.indices.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = features6.col(set.indices[j] - 1);
  }
  return out;
}

}  // namespace birddet
