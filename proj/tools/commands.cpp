#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "birddet/model_io.hpp"
#include "birddet/util.hpp"
#include "birddet/version.hpp"
#include "svg.hpp"

namespace birddet::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::vector<fs::path> list_wavs(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

std::vector<fs::path> list_subdirs(const fs::path& dir) {
  std::vector<fs::path> dirs;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return dirs;
}

Condition parse_condition(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw std::runtime_error("condition must be tag:snr_db, got '" + text + "'");
  Condition c;
  c.tag = text.substr(0, colon);
  std::size_t used = 0;
  c.snr_db = std::stod(text.substr(colon + 1), &used);
  if (used != text.size() - colon - 1)
    throw std::runtime_error("bad SNR in condition '" + text + "'");
  return c;
}

ordered_json spectrogram_json(const SpectrogramConfig& c) {
  return ordered_json{{"frame_length_s", c.frame_length_s},
                      {"overlap_fraction", c.overlap_fraction},
                      {"min_bin_spacing_hz", c.min_bin_spacing_hz},
                      {"band_low_hz", c.band_low_hz},
                      {"band_high_hz", c.band_high_hz}};
}

ordered_json detection_json(const DetectionConfig& c) {
  return ordered_json{{"window_s", c.window_s},
                      {"hop_s", c.hop_s},
                      {"log_domain", c.log_domain}};
}

double json_num(const nlohmann::json& j) { return j.get<double>(); }

void read_into(const nlohmann::json& obj, const char* key, double& out) {
  if (obj.contains(key)) out = json_num(obj.at(key));
}
void read_into(const nlohmann::json& obj, const char* key, int& out) {
  if (obj.contains(key)) out = obj.at(key).get<int>();
}
void read_into(const nlohmann::json& obj, const char* key, bool& out) {
  if (obj.contains(key)) out = obj.at(key).get<bool>();
}

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw std::runtime_error("config: unknown key '" + key + "' in " + where);
  }
}

}  // namespace

void apply_config_file(const fs::path& path, Options& opts) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config " + path.string() + ": " + e.what());
  }
  check_keys(j, {"spectrogram", "train", "detection", "seed", "jobs"}, "top level");

  if (j.contains("spectrogram")) {
    const auto& s = j.at("spectrogram");
    check_keys(s, {"frame_length_s", "overlap_fraction", "min_bin_spacing_hz",
                   "band_low_hz", "band_high_hz"}, "spectrogram");
    read_into(s, "frame_length_s", opts.spectrogram.frame_length_s);
    read_into(s, "overlap_fraction", opts.spectrogram.overlap_fraction);
    read_into(s, "min_bin_spacing_hz", opts.spectrogram.min_bin_spacing_hz);
    read_into(s, "band_low_hz", opts.spectrogram.band_low_hz);
    read_into(s, "band_high_hz", opts.spectrogram.band_high_hz);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    check_keys(t, {"n_vectors", "n_restarts", "k_min", "k_max", "feature_set", "em"}, "train");
    read_into(t, "n_vectors", opts.train.n_vectors);
    read_into(t, "n_restarts", opts.train.n_restarts);
    read_into(t, "k_min", opts.train.k_min);
    read_into(t, "k_max", opts.train.k_max);
    if (t.contains("feature_set")) opts.feature_set_text = t.at("feature_set").get<std::string>();
    if (t.contains("em")) {
      const auto& em = t.at("em");
      check_keys(em, {"max_iters", "rel_tol", "cov_floor"}, "train.em");
      read_into(em, "max_iters", opts.train.em.max_iters);
      read_into(em, "rel_tol", opts.train.em.rel_tol);
      read_into(em, "cov_floor", opts.train.em.cov_floor);
    }
  }
  if (j.contains("detection")) {
    const auto& d = j.at("detection");
    check_keys(d, {"window_s", "hop_s", "log_domain"}, "detection");
    read_into(d, "window_s", opts.detection.window_s);
    read_into(d, "hop_s", opts.detection.hop_s);
    read_into(d, "log_domain", opts.detection.log_domain);
  }
  if (j.contains("seed")) opts.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("jobs")) opts.jobs = j.at("jobs").get<int>();
}

int cmd_features(const fs::path& input, const fs::path& out_dir, const Options& opts) {
  std::vector<fs::path> files;
  if (fs::is_directory(input)) {
    files = list_wavs(input);
  } else if (fs::exists(input)) {
    files.push_back(input);
  }
  if (files.empty()) throw std::runtime_error("no input files in " + input.string());
  fs::create_directories(out_dir);

  for (const fs::path& file : files) {
    try {
      AudioClip clip = load_audio(file);
      PmfFrames pmf = spectrogram(clip, opts.spectrogram);

      std::string csv;
      csv += "time_s,mean_hz,std_hz,skewness,kurtosis,mode_hz,sfm,degenerate\n";
      for (Eigen::Index i = 0; i < pmf.n_frames(); ++i) {
        if (pmf.zero_power[static_cast<std::size_t>(i)]) continue;
        FeatureVector fv = frame_features(pmf.frames.row(i).transpose(), pmf.bin_freqs_hz);
        csv += format_double(pmf.frame_start_s(i));
        for (double v : fv.as_array()) csv += "," + format_double(v);
        csv += fv.degenerate ? ",1\n" : ",0\n";
      }
      fs::path out = out_dir / (file.stem().string() + ".features.csv");
      atomic_write_file(out, csv);
      std::cout << out.string() << ": " << pmf.n_frames() << " frames\n";
    } catch (const std::exception& e) {
      throw std::runtime_error(file.string() + ": " + e.what());
    }
  }
  return 0;
}

int cmd_train(const fs::path& corpus_dir, const std::string& species,
              const fs::path& out_model, const Options& opts) {
  std::vector<fs::path> files = list_wavs(corpus_dir);
  if (files.empty()) throw std::runtime_error("no input files in " + corpus_dir.string());

  TrainConfig cfg = opts.train;
  cfg.feature_set = FeatureSet::parse(opts.feature_set_text);
  cfg.seed = opts.seed;
  cfg.n_jobs = opts.jobs;

  std::vector<AudioClip> clips;
  clips.reserve(files.size());
  for (const fs::path& f : files) clips.push_back(load_audio(f));

  Eigen::MatrixXd pool = build_training_pool(clips, opts.spectrogram, cfg.feature_set);
  SpeciesModel model = train_species(pool, cfg);
  model.species_id = species.empty() ? corpus_dir.filename().string() : species;
  model.provenance.spectrogram = opts.spectrogram;
  model.provenance.corpus_digest = digest_files(files);
  model.provenance.created_utc = provenance_timestamp();

  if (out_model.has_parent_path()) fs::create_directories(out_model.parent_path());
  save_model(out_model, model);

  // per-k training report, CSV and JSON
  std::string csv = "k,best_log_likelihood,mdl,selected\n";
  ordered_json by_k = ordered_json::array();
  for (const auto& [k, mdl] : model.mdl_by_k) {
    bool selected = k == model.gmm.k;
    csv += std::to_string(k) + "," + format_double(model.best_ll_by_k.at(k)) + "," +
           format_double(mdl) + (selected ? ",1\n" : ",0\n");
    by_k.push_back(ordered_json{{"k", k},
                                {"best_log_likelihood", model.best_ll_by_k.at(k)},
                                {"mdl", mdl},
                                {"selected", selected}});
  }
  fs::path report_base = out_model;
  report_base.replace_extension();
  atomic_write_file(report_base.string() + ".report.csv", csv);
  ordered_json report{{"schema_version", 1},
                      {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                      {"species_id", model.species_id},
                      {"feature_set", model.feature_set.to_string()},
                      {"pool_rows", pool.rows()},
                      {"selected_k", model.gmm.k},
                      {"seed", cfg.seed},
                      {"corpus_digest", model.provenance.corpus_digest},
                      {"by_k", std::move(by_k)}};
  atomic_write_file(report_base.string() + ".report.json", report.dump(2) + "\n");

  std::cout << out_model.string() << ": species=" << model.species_id
            << " features=" << model.feature_set.to_string() << " k=" << model.gmm.k
            << " pool=" << pool.rows() << " rows\n";
  return 0;
}

namespace {

void write_score_svg(const fs::path& path, const AudioClip& clip, const DetectionTrace& trace,
                     double truth_start, double truth_end, bool have_truth) {
  const double width = 900, height = 300, pad = 40;
  svg::Canvas canvas(width, height);
  double duration = clip.duration_seconds();
  auto x_of = [&](double t) { return pad + (width - 2 * pad) * t / duration; };

  // waveform: per-pixel min/max envelope
  double mid = height * 0.5, half = height * 0.30;
  double peak = 1e-12;
  for (double s : clip.samples) peak = std::max(peak, std::abs(s));
  int columns = static_cast<int>(width - 2 * pad);
  for (int px = 0; px < columns; ++px) {
    std::size_t a = clip.samples.size() * static_cast<std::size_t>(px) / columns;
    std::size_t b = clip.samples.size() * static_cast<std::size_t>(px + 1) / columns;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = a; i < b; ++i) {
      lo = std::min(lo, clip.samples[i]);
      hi = std::max(hi, clip.samples[i]);
    }
    canvas.line(pad + px, mid - half * hi / peak, pad + px, mid - half * lo / peak,
                "#b0b0b0", 1.0);
  }

  // score trace scaled to its own maximum
  double top = 1e-300;
  for (double s : trace.scores) top = std::max(top, s);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t j = 0; j < trace.times_s.size(); ++j) {
    double t = trace.times_s[j] + trace.window_s / 2.0;
    pts.emplace_back(x_of(t), height - pad - (height - 2 * pad) * (trace.scores[j] / top));
  }
  canvas.polyline(pts, "black", 1.5);

  if (have_truth) {
    canvas.line(x_of(truth_start), pad, x_of(truth_start), height - pad, "black", 1.0, "6,4");
    canvas.line(x_of(truth_end), pad, x_of(truth_end), height - pad, "black", 1.0, "6,4");
  }
  canvas.line(pad, height - pad, width - pad, height - pad, "black", 1.0);
  canvas.text(pad, height - pad + 16, "0 s");
  canvas.text(width - pad, height - pad + 16, format_double(duration) + " s", 11.0, "end");
  canvas.text(pad, pad - 10, trace.model_id + "  (window mean density, peak-normalized)");
  atomic_write_file(path, canvas.finish());
}

}  // namespace

int cmd_score(const ScoreArgs& args, const Options& opts) {
  SpeciesModel model = load_model(args.model_file);
  AudioClip clip = load_audio(args.recording);

  // feature extraction must mirror training; the model file is authoritative
  DetectionTrace trace = score_trace(clip, model, opts.detection, model.provenance.spectrogram);

  std::string csv;
  csv += "# schema=1 tool=" + std::string(kToolName) + "/" + kToolVersion + "\n";
  csv += "# model=" + args.model_file.filename().string() + " species=" + model.species_id +
         " features=" + model.feature_set.to_string() + "\n";
  csv += "# window_s=" + format_double(trace.window_s) + " hop_s=" + format_double(trace.hop_s) +
         (opts.detection.log_domain ? " domain=log\n" : " domain=linear\n");
  csv += "time_s,score\n";
  for (std::size_t j = 0; j < trace.times_s.size(); ++j)
    csv += format_double(trace.times_s[j]) + "," + format_double(trace.scores[j]) + "\n";
  if (args.out_csv.has_parent_path()) fs::create_directories(args.out_csv.parent_path());
  atomic_write_file(args.out_csv, csv);

  if (!args.out_json.empty()) {
    ordered_json j{{"schema_version", 1},
                   {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                   {"recording", args.recording.filename().string()},
                   {"model", args.model_file.filename().string()},
                   {"model_id", trace.model_id},
                   {"detection", detection_json(opts.detection)},
                   {"spectrogram", spectrogram_json(model.provenance.spectrogram)},
                   {"times_s", trace.times_s},
                   {"scores", trace.scores}};
    atomic_write_file(args.out_json, j.dump(2) + "\n");
  }

  if (!args.out_svg.empty()) {
    double truth_start = 0.0, truth_end = 0.0;
    bool have_truth = false;
    if (!args.truth.empty()) {
      auto colon = args.truth.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("--truth must be start:end seconds");
      truth_start = std::stod(args.truth.substr(0, colon));
      truth_end = std::stod(args.truth.substr(colon + 1));
      have_truth = true;
    }
    write_score_svg(args.out_svg, clip, trace, truth_start, truth_end, have_truth);
  }

  std::cout << args.out_csv.string() << ": " << trace.scores.size() << " windows\n";
  return 0;
}

namespace {

// feature-set column order: univariate sets first, then wider ones
std::vector<std::string> sorted_feature_sets(const std::vector<ConditionResult>& rows) {
  std::set<std::string> seen;
  std::vector<std::pair<std::vector<int>, std::string>> sets;
  for (const auto& r : rows) {
    if (seen.insert(r.feature_set).second)
      sets.emplace_back(FeatureSet::parse(r.feature_set).indices, r.feature_set);
  }
  std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (auto& [_, text] : sets) out.push_back(text);
  return out;
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Grid CSV: one median-AUC row and one selected-k row per species, columns
// are feature sets, cells join the conditions with '-'.
std::string table_grid_csv(const std::vector<ConditionResult>& rows,
                           const std::vector<Condition>& conditions) {
  std::vector<std::string> set_order = sorted_feature_sets(rows);
  std::set<std::string> species_set;
  for (const auto& r : rows) species_set.insert(r.species_id);

  std::map<std::string, const ConditionResult*> cell;
  for (const auto& r : rows)
    cell[r.species_id + "|" + r.feature_set + "|" + r.condition.name()] = &r;

  std::string csv = "species,metric";
  for (const auto& s : set_order) csv += ",\"" + s + "\"";
  csv += "\n";
  for (const auto& species : species_set) {
    std::string auc_row = species + ",median_auc";
    std::string k_row = species + ",selected_k";
    for (const auto& set_text : set_order) {
      std::string aucs, ks;
      for (const auto& cond : conditions) {
        auto it = cell.find(species + "|" + set_text + "|" + cond.name());
        if (!aucs.empty()) {
          aucs += '-';
          ks += '-';
        }
        if (it == cell.end()) {
          aucs += "na";
          ks += "na";
        } else {
          aucs += two_decimals(it->second->median_auc);
          ks += std::to_string(it->second->selected_k);
        }
      }
      auc_row += "," + aucs;
      k_row += "," + ks;
    }
    csv += auc_row + "\n" + k_row + "\n";
  }
  return csv;
}

std::string summary_long_csv(const std::vector<ConditionResult>& rows) {
  std::string csv =
      "species,feature_set,condition_tag,snr_db,selected_k,n_reps,n_redraws,"
      "median_auc,p25_auc,p75_auc\n";
  for (const auto& r : rows) {
    csv += r.species_id + ",\"" + r.feature_set + "\"," + r.condition.tag + "," +
           format_double(r.condition.snr_db) + "," + std::to_string(r.selected_k) + "," +
           std::to_string(r.n_reps) + "," + std::to_string(r.n_redraws) + "," +
           format_double(r.median_auc) + "," + format_double(r.p25_auc) + "," +
           format_double(r.p75_auc) + "\n";
  }
  return csv;
}

void write_summary_svg(const fs::path& path, const std::vector<ConditionResult>& rows,
                       const std::vector<Condition>& conditions) {
  static const std::vector<std::string> palette{"#000000", "#808080", "#c0c0c0",
                                                "#4040c0", "#c04040"};
  std::vector<std::string> set_order = sorted_feature_sets(rows);
  std::vector<std::string> species;
  {
    std::set<std::string> s;
    for (const auto& r : rows) s.insert(r.species_id);
    species.assign(s.begin(), s.end());
  }

  const double panel_h = 180, pad = 45;
  const double slot = std::max(34.0, 140.0 / std::max<std::size_t>(species.size(), 1));
  const double panel_w = pad * 2 + slot * static_cast<double>(species.size());
  const double width = std::max(panel_w, 420.0);
  const double height = (panel_h + 30) * static_cast<double>(set_order.size()) + 40;
  svg::Canvas canvas(width, height);

  std::map<std::string, const ConditionResult*> cell;
  for (const auto& r : rows)
    cell[r.species_id + "|" + r.feature_set + "|" + r.condition.name()] = &r;

  double panel_top = 20;
  for (const auto& set_text : set_order) {
    double y0 = panel_top, y1 = panel_top + panel_h;
    auto y_of = [&](double auc) { return y1 - (y1 - y0 - 14) * auc; };
    canvas.text(pad, y0 + 4, "features " + set_text, 12.0);
    canvas.line(pad, y_of(0.0), width - pad / 2, y_of(0.0), "#404040", 1.0);
    for (double grid : {0.5, 0.9, 1.0}) {
      canvas.line(pad, y_of(grid), width - pad / 2, y_of(grid), "#d8d8d8", 0.7);
      canvas.text(pad - 4, y_of(grid) + 4, two_decimals(grid), 9.0, "end");
    }
    for (std::size_t si = 0; si < species.size(); ++si) {
      double x_center = pad + slot * (static_cast<double>(si) + 0.5);
      canvas.text(x_center, y1 + 12, std::to_string(si + 1), 9.0, "middle");
      for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
        auto it = cell.find(species[si] + "|" + set_text + "|" + conditions[ci].name());
        if (it == cell.end()) continue;
        const ConditionResult& r = *it->second;
        double x = x_center + (static_cast<double>(ci) -
                               (static_cast<double>(conditions.size()) - 1) / 2.0) * 7.0;
        const std::string& color = palette[ci % palette.size()];
        canvas.line(x, y_of(r.p25_auc), x, y_of(r.p75_auc), color, 2.0);
        canvas.circle(x, y_of(r.median_auc), 2.6, color);
      }
    }
    panel_top += panel_h + 30;
  }
  // legend: species index then condition swatches
  double ly = height - 12;
  std::string legend;
  for (std::size_t si = 0; si < species.size(); ++si)
    legend += std::to_string(si + 1) + "=" + species[si] + "  ";
  canvas.text(pad, ly, legend, 9.0);
  double lx = width - pad;
  for (std::size_t ci = conditions.size(); ci-- > 0;) {
    canvas.text(lx, ly, conditions[ci].name(), 9.0, "end");
    lx -= 9.0 * static_cast<double>(conditions[ci].name().size()) * 0.62 + 14;
    canvas.circle(lx + 6, ly - 3, 3.0, palette[ci % palette.size()]);
    lx -= 14;
  }
  atomic_write_file(path, canvas.finish());
}

ordered_json summary_to_json(const ExperimentSummary& summary,
                             const std::vector<Condition>& conditions,
                             const DetectionConfig& det_cfg, const ordered_json& corpus) {
  ordered_json conds = ordered_json::array();
  for (const auto& c : conditions)
    conds.push_back(ordered_json{{"tag", c.tag}, {"snr_db", c.snr_db}});
  ordered_json results = ordered_json::array();
  for (const auto& r : summary.rows) {
    results.push_back(ordered_json{{"species_id", r.species_id},
                                   {"feature_set", r.feature_set},
                                   {"condition_tag", r.condition.tag},
                                   {"snr_db", r.condition.snr_db},
                                   {"selected_k", r.selected_k},
                                   {"n_reps", r.n_reps},
                                   {"n_redraws", r.n_redraws},
                                   {"median_auc", r.median_auc},
                                   {"p25_auc", r.p25_auc},
                                   {"p75_auc", r.p75_auc},
                                   {"aucs", r.aucs}});
  }
  return ordered_json{{"schema_version", 1},
                      {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                      {"created_utc", provenance_timestamp()},
                      {"master_seed", summary.master_seed},
                      {"reps", summary.reps},
                      {"detection", detection_json(det_cfg)},
                      {"conditions", std::move(conds)},
                      {"corpus", corpus},
                      {"results", std::move(results)}};
}

struct SummaryFile {
  std::vector<ConditionResult> rows;
  std::vector<Condition> conditions;
};

SummaryFile summary_from_json(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("summary " + path.string() + ": " + e.what());
  }
  if (j.at("schema_version").get<int>() != 1)
    throw std::runtime_error("summary " + path.string() + ": unknown schema version");
  SummaryFile out;
  for (const auto& c : j.at("conditions"))
    out.conditions.push_back({c.at("tag").get<std::string>(), c.at("snr_db").get<double>()});
  for (const auto& r : j.at("results")) {
    ConditionResult row;
    row.species_id = r.at("species_id").get<std::string>();
    row.feature_set = r.at("feature_set").get<std::string>();
    row.condition = {r.at("condition_tag").get<std::string>(), r.at("snr_db").get<double>()};
    row.selected_k = r.at("selected_k").get<int>();
    row.n_reps = r.at("n_reps").get<int>();
    row.n_redraws = r.at("n_redraws").get<int>();
    row.median_auc = r.at("median_auc").get<double>();
    row.p25_auc = r.at("p25_auc").get<double>();
    row.p75_auc = r.at("p75_auc").get<double>();
    row.aucs = r.at("aucs").get<std::vector<double>>();
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args, const Options& opts) {
  if (args.conditions.empty()) throw std::runtime_error("no --condition given");
  std::vector<Condition> conditions;
  for (const auto& text : args.conditions) conditions.push_back(parse_condition(text));

  std::vector<SpeciesModel> models;
  std::vector<fs::path> model_files;
  for (const auto& entry : fs::directory_iterator(args.models_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename().string().ends_with(".report.json")) continue;
    model_files.push_back(entry.path());
  }
  std::sort(model_files.begin(), model_files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  for (const auto& f : model_files) models.push_back(load_model(f));
  if (models.empty())
    throw std::runtime_error("no model files in " + args.models_dir.string());

  ClipGroups backgrounds, birds;
  std::vector<fs::path> all_bg_files, all_bird_files;
  for (const fs::path& dir : list_subdirs(args.backgrounds_dir)) {
    auto files = list_wavs(dir);
    for (const auto& f : files) {
      backgrounds[dir.filename().string()].push_back(load_audio(f));
      all_bg_files.push_back(f);
    }
  }
  for (const fs::path& dir : list_subdirs(args.birds_dir)) {
    auto files = list_wavs(dir);
    for (const auto& f : files) {
      birds[dir.filename().string()].push_back(load_audio(f));
      all_bird_files.push_back(f);
    }
  }

  ExperimentSummary summary =
      run_experiment(models, backgrounds, birds, conditions, args.reps, opts.seed,
                     opts.detection, opts.jobs);

  ordered_json model_names = ordered_json::array();
  for (const auto& f : model_files) model_names.push_back(f.filename().string());
  ordered_json corpus{{"models", std::move(model_names)},
                      {"backgrounds_digest", digest_files(all_bg_files)},
                      {"birds_digest", digest_files(all_bird_files)}};

  fs::create_directories(args.out_dir);
  atomic_write_file(args.out_dir / "summary.json",
                    summary_to_json(summary, conditions, opts.detection, corpus).dump(2) + "\n");
  atomic_write_file(args.out_dir / "summary.csv", summary_long_csv(summary.rows));
  atomic_write_file(args.out_dir / "table2.csv", table_grid_csv(summary.rows, conditions));
  if (args.write_svg) write_summary_svg(args.out_dir / "summary.svg", summary.rows, conditions);

  for (const auto& r : summary.rows) {
    std::cout << r.species_id << " " << r.feature_set << " " << r.condition.name()
              << ": median AUC " << two_decimals(r.median_auc) << " [" << two_decimals(r.p25_auc)
              << ", " << two_decimals(r.p75_auc) << "] k=" << r.selected_k << "\n";
  }
  return 0;
}

int cmd_report(const fs::path& summary_json, const fs::path& out_dir, bool write_svg) {
  SummaryFile s = summary_from_json(summary_json);
  fs::create_directories(out_dir);
  atomic_write_file(out_dir / "table2.csv", table_grid_csv(s.rows, s.conditions));
  if (write_svg) write_summary_svg(out_dir / "summary.svg", s.rows, s.conditions);
  std::cout << table_grid_csv(s.rows, s.conditions);
  return 0;
}

}  // namespace birddet::cli
