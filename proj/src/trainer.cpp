#include "birddet/trainer.hpp"

#include <optional>
#include <stdexcept>

#include "birddet/parallel.hpp"
#include "birddet/rng.hpp"
#include "birddet/version.hpp"

namespace birddet {

void TrainConfig::validate() const {
  if (n_vectors < 1) throw std::invalid_argument("train: n_vectors must be positive");
  if (n_restarts < 1) throw std::invalid_argument("train: n_restarts must be at least 1");
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("train: bad component range");
  feature_set.validate();
}

Eigen::MatrixXd build_training_pool(const std::vector<AudioClip>& recordings,
                                    const SpectrogramConfig& cfg,
                                    const FeatureSet& feature_set) {
  feature_set.validate();
  if (recordings.empty()) throw std::invalid_argument("build_training_pool: no recordings");

  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index total_rows = 0;
  for (const AudioClip& clip : recordings) {
    try {
      PmfFrames pmf = spectrogram(clip, cfg);
      std::vector<Eigen::Index> selected = select_training_frames(pmf);
      std::vector<Eigen::Index> usable;
      for (Eigen::Index i : selected) {
        if (!pmf.zero_power[static_cast<std::size_t>(i)]) usable.push_back(i);
      }
      if (usable.empty()) continue;
      Eigen::MatrixXd rows = restrict_to_set(frame_feature_matrix(pmf, usable), feature_set);
      total_rows += rows.rows();
      blocks.push_back(std::move(rows));
    } catch (const std::exception& e) {
      throw std::runtime_error("build_training_pool: " + clip.source_id + ": " + e.what());
    }
  }
  if (total_rows == 0)
    throw std::runtime_error("build_training_pool: empty pool after frame selection");

  Eigen::MatrixXd pool(total_rows, static_cast<Eigen::Index>(feature_set.size()));
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    pool.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return pool;
}

SpeciesModel train_species(const Eigen::MatrixXd& pool, const TrainConfig& cfg) {
  cfg.validate();
  if (pool.cols() != static_cast<Eigen::Index>(cfg.feature_set.size()))
    throw std::invalid_argument("train_species: pool width does not match the feature set");
  if (pool.rows() < cfg.n_vectors)
    throw std::runtime_error("train_species: pool too small (have " +
                             std::to_string(pool.rows()) + " rows, need " +
                             std::to_string(cfg.n_vectors) + ")");

  // Seed stream: counter 0 draws the subsample, counters 1.. feed the
  // (k, restart) grid, so parallel execution order cannot change results.
  Rng draw(derive_seed(cfg.seed, 0));
  auto picks = draw.sample_without_replacement(static_cast<std::size_t>(pool.rows()),
                                               static_cast<std::size_t>(cfg.n_vectors));
  Eigen::MatrixXd subsample(cfg.n_vectors, pool.cols());
  for (Eigen::Index i = 0; i < subsample.rows(); ++i) {
    subsample.row(i) = pool.row(static_cast<Eigen::Index>(picks[static_cast<std::size_t>(i)]));
  }

  std::vector<std::string> names;
  for (int idx : cfg.feature_set.indices)
    names.emplace_back(kFeatureNames[static_cast<std::size_t>(idx - 1)]);
  Standardizer standardizer = fit_standardizer(subsample, names);
  Eigen::MatrixXd z = apply_standardizer(standardizer, subsample);

  const int n_k = cfg.k_max - cfg.k_min + 1;
  const std::size_t n_tasks = static_cast<std::size_t>(n_k) * cfg.n_restarts;
  std::vector<std::optional<GmmModel>> fits(n_tasks);
  std::vector<std::string> errors(n_tasks);

  parallel_for(n_tasks, cfg.n_jobs, [&](std::size_t t) {
    int k = cfg.k_min + static_cast<int>(t) / cfg.n_restarts;
    EmConfig em = cfg.em;
    em.seed = derive_seed(cfg.seed, 1 + t);
    try {
      fits[t] = em_fit(z, k, em);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  });

  SpeciesModel model;
  model.feature_set = cfg.feature_set;
  model.standardizer = std::move(standardizer);
  model.provenance.train = cfg;
  model.provenance.tool_version = kToolVersion;

  int best_k = 0;
  double best_mdl = std::numeric_limits<double>::infinity();
  std::optional<GmmModel> best_gmm;
  for (int ki = 0; ki < n_k; ++ki) {
    int k = cfg.k_min + ki;
    std::optional<GmmModel> best_for_k;
    std::string last_error;
    for (int r = 0; r < cfg.n_restarts; ++r) {
      std::size_t t = static_cast<std::size_t>(ki) * cfg.n_restarts + r;
      if (!fits[t]) {
        last_error = errors[t];
        continue;
      }
      if (!best_for_k || fits[t]->train_log_likelihood > best_for_k->train_log_likelihood) {
        best_for_k = fits[t];
      }
    }
    if (!best_for_k)
      throw std::runtime_error("train_species: all restarts failed for k=" + std::to_string(k) +
                               ": " + last_error);
    double mdl = mdl_score(*best_for_k, cfg.n_vectors);
    model.mdl_by_k[k] = mdl;
    model.best_ll_by_k[k] = best_for_k->train_log_likelihood;
    if (mdl < best_mdl) {  // strict: ties resolve to the smallest k
      best_mdl = mdl;
      best_k = k;
      best_gmm = std::move(best_for_k);
    }
  }
  (void)best_k;
  model.gmm = std::move(*best_gmm);
  return model;
}

}  // namespace birddet
