#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "birddet/audio_io.hpp"
#include "birddet/dsp_features.hpp"
#include "birddet/gmm.hpp"

namespace birddet {

struct TrainConfig {
  int n_vectors = 6000;   // training vectors subsampled from the pool
  int n_restarts = 10;    // EM restarts per component count
  int k_min = 1;
  int k_max = 15;
  FeatureSet feature_set;
  std::uint64_t seed = 0;
  EmConfig em;            // em.seed is ignored; per-restart seeds are derived
  int n_jobs = 1;

  void validate() const;
};

struct TrainProvenance {
  SpectrogramConfig spectrogram;
  TrainConfig train;
  std::string corpus_digest;
  std::string created_utc;
  std::string tool_version;
  std::string window = "hann";
};

// The persisted per-species artifact: feature standardization fitted on the
// training subsample plus the MDL-selected mixture.
struct SpeciesModel {
  std::string species_id;
  FeatureSet feature_set;
  Standardizer standardizer;
  GmmModel gmm;
  std::map<int, double> mdl_by_k;
  std::map<int, double> best_ll_by_k;
  TrainProvenance provenance;
};

// Per recording: spectrogram, top-decile power frame selection, feature
// extraction, restriction to the feature set; rows pooled in input order.
Eigen::MatrixXd build_training_pool(const std::vector<AudioClip>& recordings,
                                    const SpectrogramConfig& cfg,
                                    const FeatureSet& feature_set);

// Subsample n_vectors rows without replacement, fit the standardizer on the
// subsample, sweep k_min..k_max with n_restarts seeded EM runs each (best
// log-likelihood kept per k), then select k by minimum MDL, smallest k on
// ties. Fully deterministic given (pool, cfg.seed), independent of n_jobs.
SpeciesModel train_species(const Eigen::MatrixXd& pool, const TrainConfig& cfg);

}  // namespace birddet
