#include "birddet/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "birddet/parallel.hpp"
#include "birddet/rng.hpp"
#include "birddet/util.hpp"

namespace birddet {

namespace {

struct DegenerateDraw : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kMaxRedraws = 5;

}  // namespace

double snap_to_mix_grid(double x) {
  return std::ldexp(std::round(std::ldexp(x, 40)), -40);
}

double rms(const std::vector<double>& samples, std::size_t begin, std::size_t end) {
  if (begin >= end || end > samples.size())
    throw std::invalid_argument("rms: bad sample range");
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += samples[i] * samples[i];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

TestSignal mix_at_snr(const AudioClip& background, const AudioClip& bird, double snr_db,
                      std::uint64_t seed) {
  if (background.sample_rate != bird.sample_rate)
    throw std::invalid_argument("mix_at_snr: sample rates differ (" +
                                std::to_string(background.sample_rate) + " vs " +
                                std::to_string(bird.sample_rate) + ")");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("mix_at_snr: non-finite SNR");
  const std::size_t n_bg = background.samples.size();
  const std::size_t n_bird = bird.samples.size();
  if (n_bird > n_bg)
    throw std::invalid_argument("mix_at_snr: bird clip longer than the background");

  Rng rng(seed);
  std::size_t offset = rng.uniform_index(n_bg - n_bird + 1);

  double bird_rms = rms(bird.samples, 0, n_bird);
  if (bird_rms == 0.0) throw DegenerateDraw("mix_at_snr: bird clip is silent");
  double segment_rms = rms(background.samples, offset, offset + n_bird);
  if (segment_rms == 0.0)
    throw DegenerateDraw("mix_at_snr: background segment under the bird is silent");

  double gain = std::pow(10.0, snr_db / 20.0) * segment_rms / bird_rms;

  TestSignal ts;
  ts.clip = background;
  ts.clip.source_id = background.source_id + "+" + bird.source_id;
  for (std::size_t i = 0; i < n_bird; ++i) {
    ts.clip.samples[offset + i] += snap_to_mix_grid(gain * bird.samples[i]);
  }
  int fs = background.sample_rate;
  ts.bird_start_s = static_cast<double>(offset) / fs;
  ts.bird_end_s = static_cast<double>(offset + n_bird) / fs;
  ts.applied_gain = gain;
  ts.spec = MixSpec{background.source_id, bird.source_id, snr_db,
                    ts.bird_start_s, seed};
  return ts;
}

std::vector<bool> label_windows(const TestSignal& ts, const DetectionConfig& cfg) {
  std::vector<double> times = window_start_times(ts.clip.duration_seconds(), cfg);
  std::vector<bool> labels(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    double lo = std::max(times[j], ts.bird_start_s);
    double hi = std::min(times[j] + cfg.window_s, ts.bird_end_s);
    double overlap = std::max(0.0, hi - lo);
    labels[j] = overlap > cfg.window_s / 2.0;  // strict majority; exact half is negative
  }
  return labels;
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("roc_auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::int64_t n_pos = std::count(labels.begin(), labels.end(), true);
  std::int64_t n_neg = static_cast<std::int64_t>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc_auc: single-class input, AUC undefined");
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("roc_auc: non-finite score");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult result;
  result.n_pos = static_cast<int>(n_pos);
  result.n_neg = static_cast<int>(n_neg);
  result.roc_points.emplace_back(0.0, 0.0);

  // Counts stay integral, so the trapezoid sum divides out exactly against
  // the pairwise rank statistic.
  std::int64_t tp = 0, fp = 0;
  double area2 = 0.0;  // twice the area, in count units
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    std::int64_t d_tp = 0, d_fp = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]]) ++d_tp; else ++d_fp;
      ++j;
    }
    area2 += static_cast<double>(d_fp) * static_cast<double>(2 * tp + d_tp);
    tp += d_tp;
    fp += d_fp;
    result.roc_points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                                   static_cast<double>(tp) / static_cast<double>(n_pos));
    i = j;
  }
  result.auc = area2 / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return result;
}

std::string Condition::name() const {
  std::string snr = format_double(snr_db);
  if (snr_db >= 0.0) snr.insert(snr.begin(), '+');
  return tag + snr + "dB";
}

ExperimentSummary run_experiment(const std::vector<SpeciesModel>& models,
                                 const ClipGroups& backgrounds_by_tag,
                                 const ClipGroups& birds_by_species,
                                 const std::vector<Condition>& conditions, int reps,
                                 std::uint64_t master_seed, const DetectionConfig& det_cfg,
                                 int n_jobs) {
  if (models.empty()) throw std::invalid_argument("run_experiment: no models");
  if (conditions.empty()) throw std::invalid_argument("run_experiment: no conditions");
  if (reps < 1) throw std::invalid_argument("run_experiment: reps must be positive");
  for (const SpeciesModel& m : models) {
    auto it = birds_by_species.find(m.species_id);
    if (it == birds_by_species.end() || it->second.empty())
      throw std::runtime_error("run_experiment: no bird clips for species " + m.species_id);
  }
  for (const Condition& c : conditions) {
    auto it = backgrounds_by_tag.find(c.tag);
    if (it == backgrounds_by_tag.end() || it->second.empty())
      throw std::runtime_error("run_experiment: no backgrounds tagged " + c.tag);
  }

  const std::size_t n_cond = conditions.size();
  const std::size_t n_cells = models.size() * n_cond;
  const std::size_t n_tasks = n_cells * static_cast<std::size_t>(reps);

  std::vector<double> task_auc(n_tasks, 0.0);
  std::vector<int> task_redraws(n_tasks, 0);

  parallel_for(n_tasks, n_jobs, [&](std::size_t t) {
    std::size_t cell = t / static_cast<std::size_t>(reps);
    const SpeciesModel& model = models[cell / n_cond];
    const Condition& cond = conditions[cell % n_cond];
    const auto& backgrounds = backgrounds_by_tag.at(cond.tag);
    const auto& birds = birds_by_species.at(model.species_id);

    std::uint64_t task_seed = derive_seed(master_seed, t);
    std::string last_error;
    for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
      std::uint64_t attempt_seed = derive_seed(task_seed, static_cast<std::uint64_t>(attempt));
      Rng rng(attempt_seed);
      const AudioClip& bg = backgrounds[rng.uniform_index(backgrounds.size())];
      const AudioClip& bird = birds[rng.uniform_index(birds.size())];
      if (bird.samples.size() > bg.samples.size()) {
        last_error = bird.source_id + " longer than " + bg.source_id;
        continue;
      }
      TestSignal ts;
      try {
        ts = mix_at_snr(bg, bird, cond.snr_db, rng.next_u64());
      } catch (const DegenerateDraw& e) {
        last_error = e.what();
        continue;
      }
      DetectionTrace trace =
          score_trace(ts.clip, model, det_cfg, model.provenance.spectrogram);
      std::vector<bool> labels = label_windows(ts, det_cfg);
      bool any_pos = std::find(labels.begin(), labels.end(), true) != labels.end();
      bool any_neg = std::find(labels.begin(), labels.end(), false) != labels.end();
      if (!any_pos || !any_neg) {
        last_error = "single-class window labels";
        continue;
      }
      task_auc[t] = roc_auc(trace.scores, labels).auc;
      task_redraws[t] = attempt;
      return;
    }
    throw std::runtime_error("run_experiment: repetition kept degenerating for " +
                             model.species_id + " / " + cond.name() + ": " + last_error);
  });

  ExperimentSummary summary;
  summary.reps = reps;
  summary.master_seed = master_seed;
  summary.rows.reserve(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const SpeciesModel& model = models[cell / n_cond];
    ConditionResult row;
    row.species_id = model.species_id;
    row.feature_set = model.feature_set.to_string();
    row.condition = conditions[cell % n_cond];
    row.selected_k = model.gmm.k;
    row.n_reps = reps;
    row.aucs.assign(task_auc.begin() + static_cast<std::ptrdiff_t>(cell * reps),
                    task_auc.begin() + static_cast<std::ptrdiff_t>((cell + 1) * reps));
    row.n_redraws = std::accumulate(task_redraws.begin() + static_cast<std::ptrdiff_t>(cell * reps),
                                    task_redraws.begin() + static_cast<std::ptrdiff_t>((cell + 1) * reps), 0);
    row.median_auc = nearest_rank_percentile(row.aucs, 50.0);
    row.p25_auc = nearest_rank_percentile(row.aucs, 25.0);
    row.p75_auc = nearest_rank_percentile(row.aucs, 75.0);
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

}  // namespace birddet
