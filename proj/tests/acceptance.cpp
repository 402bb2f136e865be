// Acceptance suite: one line per criterion, nonzero exit if any gated
// criterion fails. Each check pins its tolerance in code; oracles come from
// tests/support and stay independent of the code paths under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "birddet/audio_io.hpp"
#include "birddet/detector.hpp"
#include "birddet/eval_harness.hpp"
#include "birddet/model_io.hpp"
#include "birddet/rng.hpp"
#include "birddet/trainer.hpp"
#include "birddet/util.hpp"
#include "support/oracles.hpp"
#include "support/synth_signals.hpp"
#include "support/temp_dir.hpp"

using namespace birddet;
namespace fs = std::filesystem;

namespace {

constexpr int kJobs = 2;

struct Check {
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void require_close(double got, double want, double rel_tol, const std::string& what) {
    double err = std::abs(got - want);
    if (err > rel_tol * (1.0 + std::abs(want))) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want << " (err " << err << ")";
      failures.push_back(os.str());
    }
  }
};

bool rel_close(double got, double want, double rel_tol) {
  return std::abs(got - want) <= rel_tol * (1.0 + std::abs(want));
}

Eigen::VectorXd random_pmf(int n, Rng& rng) {
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = -std::log(1.0 - rng.uniform());
  return p / p.sum();
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// ---------------------------------------------------------------- P1
void p1_moment_oracle(Check& c) {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 3 + static_cast<int>(rng.uniform_index(126));
    Eigen::VectorXd p = random_pmf(n, rng);
    Eigen::VectorXd f = linspace(1000.0, 10000.0, n);
    FeatureVector fv = frame_features(p, f);
    auto m = oracle::pmf_moments({p.data(), p.data() + n}, {f.data(), f.data() + n});
    c.require(rel_close(fv.mean_hz, m.mean, 1e-12), "mean mismatch");
    c.require(rel_close(fv.std_hz, m.stddev, 1e-12), "std mismatch");
    c.require(rel_close(fv.skewness, m.skewness, 1e-12), "skewness mismatch");
    c.require(rel_close(fv.kurtosis, m.kurtosis, 1e-12), "kurtosis mismatch");
    if (!c.failures.empty()) return;
  }
}

// ---------------------------------------------------------------- P2
void p2_sfm_bounds(Check& c) {
  Rng rng(43);
  int n = 64;
  Eigen::VectorXd f = linspace(1000.0, 10000.0, n);
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(n, 1.0 / n);
  c.require(std::abs(frame_features(flat, f).sfm - 1.0) <= 1e-12, "flat pmf SFM != 1");

  // nested concentration: halve the uniform support each step
  double prev = 2.0;
  for (int support = n; support >= 1; support /= 2) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < support; ++i) p[i] = 1.0 / support;
    double sfm = frame_features(p, f).sfm;
    c.require(sfm < prev, "SFM not strictly decreasing under concentration");
    prev = sfm;
  }
  // a second nested family: mix the flat pmf toward a point mass
  prev = 2.0;
  for (double lambda : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    Eigen::VectorXd p = (1.0 - lambda) * flat;
    p[n / 2] += lambda;
    double sfm = frame_features(p, f).sfm;
    c.require(sfm < prev, "SFM not strictly decreasing toward a point mass");
    prev = sfm;
  }

  for (int trial = 0; trial < 1000; ++trial) {
    int bins = 3 + static_cast<int>(rng.uniform_index(126));
    double sfm = frame_features(random_pmf(bins, rng), linspace(1000.0, 10000.0, bins)).sfm;
    c.require(sfm >= 0.0 && sfm <= 1.0, "SFM out of [0,1]");
  }
}

// ---------------------------------------------------------------- P3
void p3_mode_interpolation(Check& c) {
  Rng rng(44);
  int n = 32;
  Eigen::VectorXd f = linspace(1000.0, 10000.0, n);
  for (int trial = 0; trial < 500; ++trial) {
    double vertex = rng.uniform(f[2], f[n - 3]);
    double a = -rng.uniform(1e-10, 1e-9);
    double cc = rng.uniform(1.0, 2.0);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) {
      double d = f[i] - vertex;
      p[i] = cc + a * d * d;
    }
    p /= p.sum();
    double got = mode_interp(p, f);
    c.require(std::abs(got - vertex) <= 1e-9 * std::abs(vertex),
              "parabola vertex off by more than 1e-9 relative");
    if (!c.failures.empty()) return;
  }

  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 0.5 / (n - 3));
  p[10] = 0.3;
  p[9] = 0.1;
  p[11] = 0.1;
  p /= p.sum();
  c.require(mode_interp(p, f) == f[10], "symmetric neighbors must return the bin center");
}

// ---------------------------------------------------------------- P4
void p4_em_monotonic(Check& c) {
  const int dims[] = {1, 2, 6};
  const int ks[] = {1, 3, 8};
  int fits_done = 0;
  for (int d : dims) {
    for (int k : ks) {
      int per_combo = (d == 1 && k == 1) ? 12 : 11;  // 9*11 + 1 = 100
      for (int rep = 0; rep < per_combo; ++rep) {
        ++fits_done;
        Rng rng(derive_seed(4000, static_cast<std::uint64_t>(fits_done)));
        // k moderately separated components, none degenerately tight
        Eigen::MatrixXd centers(k, d);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < d; ++j) centers(i, j) = rng.uniform(-4.0, 4.0);
        Eigen::MatrixXd x(1200, d);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          int comp = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(k)));
          double sigma = 0.7 + 0.06 * comp;
          for (int j = 0; j < d; ++j) x(i, j) = centers(comp, j) + sigma * rng.normal();
        }
        Eigen::MatrixXd z = apply_standardizer(fit_standardizer(x), x);

        EmConfig cfg;
        cfg.seed = derive_seed(4100, static_cast<std::uint64_t>(fits_done));
        GmmModel m = em_fit(z, k, cfg);
        for (std::size_t i = 1; i < m.ll_history.size(); ++i) {
          c.require(m.ll_history[i] >= m.ll_history[i - 1] - 1e-8,
                    "log-likelihood decreased beyond 1e-8");
        }
        if (k == 1) {
          Eigen::VectorXd mean = z.colwise().mean();
          Eigen::MatrixXd cc2 = z.rowwise() - mean.transpose();
          Eigen::MatrixXd cov =
              (cc2.transpose() * cc2) / static_cast<double>(z.rows()) +
              cfg.cov_floor * Eigen::MatrixXd::Identity(d, d);
          for (int j = 0; j < d; ++j)
            c.require(rel_close(m.means(0, j), mean[j], 1e-9), "k=1 mean is not the MLE");
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              c.require(rel_close(m.covariances[0](a, b), cov(a, b), 1e-9),
                        "k=1 covariance is not the MLE plus floor");
        }
        if (!c.failures.empty()) return;
      }
    }
  }
  c.require(fits_done == 100, "expected exactly 100 fits");
}

// ---------------------------------------------------------------- P5
void p5_pdf_normalization(Check& c) {
  Rng rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    int k = 1 + static_cast<int>(rng.uniform_index(5));
    GmmModel m;
    m.k = k;
    m.dim = 1;
    m.weights.resize(k);
    m.means.resize(k, 1);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < k; ++i) {
      m.weights[i] = rng.uniform(0.2, 1.0);
      double mu = rng.uniform(-5.0, 5.0);
      double sigma = rng.uniform(0.2, 2.0);
      m.means(i, 0) = mu;
      m.covariances.push_back(Eigen::MatrixXd::Constant(1, 1, sigma * sigma));
      lo = std::min(lo, mu - 12.0 * sigma);
      hi = std::max(hi, mu + 12.0 * sigma);
    }
    m.weights /= m.weights.sum();
    GmmDensity density(m);
    double integral = oracle::simpson(
        [&](double x) { return density.pdf(Eigen::VectorXd::Constant(1, x)); }, lo, hi, 40000);
    c.require(std::abs(integral - 1.0) <= 1e-6, "pdf quadrature off target: " +
                                                    format_double(integral));
  }
}

// ---------------------------------------------------------------- P6
void p6_mdl_selection(Check& c) {
  TrainConfig cfg;
  cfg.n_vectors = 6000;
  cfg.n_restarts = 10;
  cfg.k_min = 1;
  cfg.k_max = 15;
  cfg.feature_set = FeatureSet::parse("5");
  cfg.n_jobs = kJobs;

  {
    Rng rng(46);
    Eigen::MatrixXd pool(6000, 1);
    for (Eigen::Index i = 0; i < pool.rows(); ++i) pool(i, 0) = 3.0 + 1.5 * rng.normal();
    cfg.seed = 61;
    SpeciesModel m = train_species(pool, cfg);
    c.require(m.gmm.k == 1, "unimodal data selected k=" + std::to_string(m.gmm.k));
    c.require(m.mdl_by_k.size() == 15, "expected 15 MDL entries");
  }
  {
    Rng rng(47);
    Eigen::MatrixXd pool(6000, 1);
    const double centers[] = {-8.0, 0.0, 8.0};
    for (Eigen::Index i = 0; i < pool.rows(); ++i) {
      double u = rng.uniform();
      int comp = u < 0.3 ? 0 : (u < 0.7 ? 1 : 2);
      pool(i, 0) = centers[comp] + rng.normal();
    }
    cfg.seed = 62;
    SpeciesModel m = train_species(pool, cfg);
    c.require(m.gmm.k == 3, "trimodal data selected k=" + std::to_string(m.gmm.k));
  }
}

// ---------------------------------------------------------------- P7
void p7_auc_oracle(Check& c) {
  Rng rng(48);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 5 + rng.uniform_index(196);
    std::vector<double> scores(n);
    std::vector<bool> labels(n);
    int mode = trial % 3;  // continuous, coarse ties, constant-heavy ties
    for (std::size_t i = 0; i < n; ++i) {
      if (mode == 0) scores[i] = rng.uniform();
      else if (mode == 1) scores[i] = static_cast<double>(rng.uniform_index(6));
      else scores[i] = static_cast<double>(rng.uniform_index(2));
      labels[i] = rng.uniform() < 0.35;
    }
    auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
    if (n_pos == 0 || n_pos == n) continue;
    double got = roc_auc(scores, labels).auc;
    double want = oracle::pairwise_auc(scores, labels);
    c.require(std::abs(got - want) <= 1e-12, "AUC differs from the pairwise oracle");
    if (!c.failures.empty()) return;
  }
}

// ---------------------------------------------------------------- P8
void p8_snr_fidelity(Check& c) {
  for (int trial = 0; trial < 100; ++trial) {
    auto s = static_cast<std::uint64_t>(trial);
    double snr_db = (trial % 3 - 1) * 3.0;
    AudioClip bg =
        trial % 2 == 0
            ? testsignals::on_pcm16_grid(testsignals::pink_noise(2.0, 16000, 0.4, 500 + s))
            : testsignals::on_pcm16_grid(
                  testsignals::speech_shaped_noise(2.0, 16000, 0.4, 500 + s));
    AudioClip bird = testsignals::on_pcm16_grid(testsignals::chirp_clip(
        0.3 + 0.01 * (trial % 40), 16000, 3000.0, 6000.0, 0.5, 700 + s, 0.0, 0.15, 0.05));
    TestSignal ts = mix_at_snr(bg, bird, snr_db, 900 + s);

    auto offset = static_cast<std::size_t>(
        std::llround(ts.bird_start_s * ts.clip.sample_rate));
    std::vector<double> addend(bird.samples.size());
    for (std::size_t i = 0; i < addend.size(); ++i)
      addend[i] = ts.clip.samples[offset + i] - bg.samples[offset + i];
    double measured = 20.0 * std::log10(rms(addend, 0, addend.size()) /
                                        rms(bg.samples, offset, offset + addend.size()));
    c.require(std::abs(measured - snr_db) <= 0.01,
              "re-measured SNR off by " + format_double(measured - snr_db) + " dB");

    bool exact = true;
    for (std::size_t i = 0; i < bird.samples.size() && exact; ++i) {
      double recovered =
          ts.clip.samples[offset + i] - snap_to_mix_grid(ts.applied_gain * bird.samples[i]);
      exact = recovered == bg.samples[offset + i];
    }
    c.require(exact, "background not recoverable bit-exactly");
    if (!c.failures.empty()) return;
  }
}

// ---------------------------------------------------------------- P9
SpeciesModel probe_model() {
  SpeciesModel m;
  m.species_id = "probe";
  m.feature_set = FeatureSet::parse("5");
  m.standardizer.offset = Eigen::VectorXd::Constant(1, 4500.0);
  m.standardizer.scale = Eigen::VectorXd::Constant(1, 900.0);
  m.gmm.k = 1;
  m.gmm.dim = 1;
  m.gmm.weights = Eigen::VectorXd::Ones(1);
  m.gmm.means = Eigen::MatrixXd::Zero(1, 1);
  m.gmm.covariances = {Eigen::MatrixXd::Identity(1, 1)};
  return m;
}

void p9_trace_geometry(Check& c) {
  Rng rng(49);
  SpeciesModel model = probe_model();
  DetectionConfig det;
  for (int trial = 0; trial < 50; ++trial) {
    double duration = rng.uniform(0.6, 8.0);
    AudioClip clip = testsignals::chirp_clip(duration, 16000, 3000.0, 6000.0, 0.5,
                                             1200 + static_cast<std::uint64_t>(trial));
    DetectionTrace trace = score_trace(clip, model);
    auto expected_len =
        static_cast<std::size_t>(std::floor((clip.duration_seconds() - det.window_s) /
                                            det.hop_s)) + 1;
    c.require(trace.scores.size() == expected_len, "trace length formula violated");

    // independent per-frame densities, then a naive moving average
    PmfFrames pmf = spectrogram(clip, SpectrogramConfig{});
    GmmDensity density(model.gmm);
    std::vector<double> pdfs(static_cast<std::size_t>(pmf.n_frames()), 0.0);
    for (Eigen::Index i = 0; i < pmf.n_frames(); ++i) {
      if (pmf.zero_power[static_cast<std::size_t>(i)]) continue;
      FeatureVector fv = frame_features(pmf.frames.row(i).transpose(), pmf.bin_freqs_hz);
      Eigen::VectorXd x(1);
      x << fv.mode_hz;
      pdfs[static_cast<std::size_t>(i)] =
          density.pdf(apply_standardizer(model.standardizer, x));
    }
    auto naive = oracle::naive_window_means(
        pdfs, [&](std::size_t i) { return pmf.frame_start_s(static_cast<Eigen::Index>(i)); },
        trace.times_s, det.window_s);
    for (std::size_t j = 0; j < naive.size(); ++j)
      c.require(rel_close(trace.scores[j], naive[j], 1e-12),
                "window mean differs from the naive oracle");

    // labels against the brute-force overlap oracle
    TestSignal ts;
    ts.clip = clip;
    double len = rng.uniform(0.1, std::max(0.11, duration - 0.2));
    ts.bird_start_s = rng.uniform(0.0, duration - len);
    ts.bird_end_s = ts.bird_start_s + len;
    auto labels = label_windows(ts, det);
    auto want = oracle::overlap_labels(trace.times_s, det.window_s, ts.bird_start_s,
                                       ts.bird_end_s);
    c.require(labels.size() == want.size(), "label vector length mismatch");
    for (std::size_t j = 0; j < labels.size(); ++j)
      c.require(labels[j] == want[j], "label differs from the overlap oracle");
    if (!c.failures.empty()) return;
  }
}

// ---------------------------------------------------------------- P10
void p10_end_to_end(Check& c) {
  std::vector<AudioClip> corpus;
  for (int i = 0; i < 160; ++i)
    corpus.push_back(testsignals::chirp_clip(4.0, 22050, 3000.0, 6000.0, 0.5,
                                             2000 + static_cast<std::uint64_t>(i)));

  SpectrogramConfig spec_cfg;
  FeatureSet mode_only = FeatureSet::parse("5");
  Eigen::MatrixXd pool = build_training_pool(corpus, spec_cfg, mode_only);
  c.require(pool.rows() >= 6000, "synthetic pool too small: " + std::to_string(pool.rows()));
  if (!c.failures.empty()) return;

  TrainConfig cfg;
  cfg.n_vectors = 6000;
  cfg.n_restarts = 10;
  cfg.k_min = 1;
  cfg.k_max = 15;
  cfg.feature_set = mode_only;
  cfg.seed = 71;
  cfg.n_jobs = kJobs;
  SpeciesModel model = train_species(pool, cfg);
  model.species_id = "synthchirper";

  ClipGroups backgrounds, birds;
  for (std::uint64_t i = 0; i < 2; ++i)
    backgrounds["noise"].push_back(testsignals::pink_noise(8.0, 22050, 0.35, 3000 + i));
  for (std::uint64_t i = 0; i < 4; ++i)
    backgrounds["noise"].push_back(
        testsignals::speech_shaped_noise(8.0, 22050, 0.35, 3100 + i));
  // dense sweeps: every 500 ms window inside the call contains vocalization
  for (std::uint64_t i = 0; i < 10; ++i)
    birds["synthchirper"].push_back(
        testsignals::chirp_clip(3.0, 22050, 3000.0, 6000.0, 0.5, 3200 + i, 1e-3, 0.35, 0.05));

  ExperimentSummary summary =
      run_experiment({model}, backgrounds, birds, {{"noise", 3.0}, {"noise", -3.0}}, 20, 72,
                     DetectionConfig{}, kJobs);
  double median_hi = 0.0, median_lo = 0.0;
  for (const auto& row : summary.rows) {
    if (row.condition.snr_db > 0) median_hi = row.median_auc;
    else median_lo = row.median_auc;
  }
  c.require(median_hi >= 0.95, "median AUC at +3 dB is " + format_double(median_hi));
  c.require(median_lo < median_hi,
            "no degradation: +3 dB " + format_double(median_hi) + " vs -3 dB " +
                format_double(median_lo));
}

// ---------------------------------------------------------------- P11
int run_cli(const std::string& args) {
  std::string cmd = std::string(BIRDDET_BIN) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void p11_cli_determinism(Check& c) {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  testsupport::TempDir dir("birddet_acceptance");

  fs::create_directories(dir / "corpus");
  for (int i = 0; i < 12; ++i)
    write_wav(dir.path() / "corpus" / ("c" + std::to_string(i) + ".wav"),
              testsignals::chirp_clip(2.0, 16000, 3000.0, 6000.0, 0.5,
                                      5000 + static_cast<std::uint64_t>(i)));
  fs::create_directories(dir / "bg" / "noise");
  fs::create_directories(dir / "birds" / "chirper");
  for (std::uint64_t i = 0; i < 3; ++i) {
    write_wav(dir.path() / "bg" / "noise" / ("p" + std::to_string(i) + ".wav"),
              testsignals::pink_noise(4.0, 16000, 0.3, 5100 + i));
    write_wav(dir.path() / "birds" / "chirper" / ("b" + std::to_string(i) + ".wav"),
              testsignals::chirp_clip(0.9, 16000, 3000.0, 6000.0, 0.5, 5200 + i));
  }

  const std::string train_flags =
      " --species chirper --features 5 --n-vectors 200 --restarts 2 --k-min 1 --k-max 2"
      " --seed 7 --jobs 2";
  fs::create_directories(dir / "m1");
  fs::create_directories(dir / "m2");
  c.require(run_cli("train " + (dir / "corpus").string() + " --out " +
                    (dir.path() / "m1" / "chirper.json").string() + train_flags) == 0,
            "first train run failed");
  c.require(run_cli("train " + (dir / "corpus").string() + " --out " +
                    (dir.path() / "m2" / "chirper.json").string() + train_flags) == 0,
            "second train run failed");
  if (!c.failures.empty()) return;
  c.require(read_file(dir.path() / "m1" / "chirper.json") ==
                read_file(dir.path() / "m2" / "chirper.json"),
            "train outputs differ between identical runs");

  const std::string eval_flags = " --backgrounds " + (dir / "bg").string() + " --birds " +
                                 (dir / "birds").string() +
                                 " --condition noise:+3 --reps 2 --seed 11 --jobs 2";
  c.require(run_cli("evaluate --models " + (dir / "m1").string() + eval_flags + " --out " +
                    (dir / "e1").string()) == 0,
            "first evaluate run failed");
  c.require(run_cli("evaluate --models " + (dir / "m1").string() + eval_flags + " --out " +
                    (dir / "e2").string()) == 0,
            "second evaluate run failed");
  if (!c.failures.empty()) return;
  for (const char* name : {"summary.json", "summary.csv", "table2.csv"}) {
    c.require(read_file(dir.path() / "e1" / name) == read_file(dir.path() / "e2" / name),
              std::string("evaluate output differs between identical runs: ") + name);
  }
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<void(Check&)> fn;
  double budget_s;  // 0 = no runtime requirement
};

}  // namespace

int main(int argc, char** argv) {
  const char* only = argc > 1 ? argv[1] : nullptr;  // run a single criterion by id
  const std::vector<Criterion> criteria = {
      {"P1", "frame moments match direct summation (1000 pmfs, 1e-12)", p1_moment_oracle, 5.0},
      {"P2", "SFM: flat=1, strictly decreasing under concentration, in [0,1]", p2_sfm_bounds, 0.0},
      {"P3", "mode interpolation recovers parabola vertices (1e-9)", p3_mode_interpolation, 0.0},
      {"P4", "EM log-likelihood monotone over 100 fits; k=1 equals the MLE", p4_em_monotonic, 0.0},
      {"P5", "1-d mixture densities integrate to 1 +/- 1e-6", p5_pdf_normalization, 0.0},
      {"P6", "MDL picks k=1 on unimodal and k=3 on trimodal data", p6_mdl_selection, 180.0},
      {"P7", "trapezoidal AUC equals the pairwise oracle (500 sets)", p7_auc_oracle, 0.0},
      {"P8", "mix SNR within 0.01 dB; background recoverable bit-exactly", p8_snr_fidelity, 0.0},
      {"P9", "trace geometry, window means and labels match oracles", p9_trace_geometry, 0.0},
      {"P10", "synthetic end-to-end: median AUC >= 0.95 at +3 dB, lower at -3 dB",
       p10_end_to_end, 300.0},
      {"P11", "train/evaluate reruns are byte-identical, jobs > 1 included",
       p11_cli_determinism, 0.0},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    if (only != nullptr && std::string(only) != criterion.id) continue;
    Check check;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criterion.fn(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criterion.budget_s > 0.0 && elapsed > criterion.budget_s) {
      std::ostringstream os;
      os << "runtime " << elapsed << " s exceeds budget " << criterion.budget_s << " s";
      check.failures.push_back(os.str());
    }
    bool ok = check.failures.empty();
    if (!ok) ++failed;
    std::printf("%-4s %-68s %s (%.2fs)\n", criterion.id, criterion.title,
                ok ? "PASS" : "FAIL", elapsed);
    for (const auto& f : check.failures) std::printf("     - %s\n", f.c_str());
  }

  std::printf(
      "P12  reference corpus protocol ........ DOCUMENTED (not CI-gated; see README, "
      "\"Reference protocol\")\n");
  std::printf("%d/11 gated criteria passed\n", 11 - failed);
  return failed == 0 ? 0 : 1;
}
