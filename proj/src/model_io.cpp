#include "birddet/model_io.hpp"

#include <cmath>
#include <stdexcept>

#include "birddet/util.hpp"

namespace birddet {

namespace {

using nlohmann::ordered_json;

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const ordered_json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = arr.at(i).get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.at(0).size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows.at(i);
    if (row.size() != static_cast<std::size_t>(m.cols()))
      throw std::runtime_error("model file: ragged matrix");
    for (std::size_t j = 0; j < row.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.at(j).get<double>();
  }
  return m;
}

ordered_json spectrogram_to_json(const SpectrogramConfig& c) {
  return ordered_json{{"frame_length_s", c.frame_length_s},
                      {"overlap_fraction", c.overlap_fraction},
                      {"min_bin_spacing_hz", c.min_bin_spacing_hz},
                      {"band_low_hz", c.band_low_hz},
                      {"band_high_hz", c.band_high_hz}};
}

SpectrogramConfig spectrogram_from_json(const ordered_json& j) {
  SpectrogramConfig c;
  c.frame_length_s = j.at("frame_length_s").get<double>();
  c.overlap_fraction = j.at("overlap_fraction").get<double>();
  c.min_bin_spacing_hz = j.at("min_bin_spacing_hz").get<double>();
  c.band_low_hz = j.at("band_low_hz").get<double>();
  c.band_high_hz = j.at("band_high_hz").get<double>();
  return c;
}

}  // namespace

ordered_json model_to_json(const SpeciesModel& model) {
  ordered_json j;
  j["schema_version"] = kModelSchemaVersion;
  j["species_id"] = model.species_id;
  j["feature_set"] = model.feature_set.indices;
  j["standardizer"] = {{"offset", vector_to_json(model.standardizer.offset)},
                       {"scale", vector_to_json(model.standardizer.scale)}};

  ordered_json covs = ordered_json::array();
  for (const auto& c : model.gmm.covariances) covs.push_back(matrix_to_json(c));
  j["gmm"] = {{"k", model.gmm.k},
              {"dim", model.gmm.dim},
              {"weights", vector_to_json(model.gmm.weights)},
              {"means", matrix_to_json(model.gmm.means)},
              {"covariances", std::move(covs)},
              {"train_log_likelihood", model.gmm.train_log_likelihood},
              {"ll_history", model.gmm.ll_history}};

  ordered_json mdl = ordered_json::object();
  for (const auto& [k, score] : model.mdl_by_k) mdl[std::to_string(k)] = score;
  j["mdl_by_k"] = std::move(mdl);
  ordered_json best_ll = ordered_json::object();
  for (const auto& [k, ll] : model.best_ll_by_k) best_ll[std::to_string(k)] = ll;
  j["best_ll_by_k"] = std::move(best_ll);

  const TrainProvenance& p = model.provenance;
  j["provenance"] = {
      {"tool_version", p.tool_version},
      {"created_utc", p.created_utc},
      {"corpus_digest", p.corpus_digest},
      {"window", p.window},
      {"spectrogram", spectrogram_to_json(p.spectrogram)},
      {"train",
       {{"n_vectors", p.train.n_vectors},
        {"n_restarts", p.train.n_restarts},
        {"k_min", p.train.k_min},
        {"k_max", p.train.k_max},
        {"feature_set", p.train.feature_set.indices},
        {"seed", p.train.seed},
        {"em",
         {{"max_iters", p.train.em.max_iters},
          {"rel_tol", p.train.em.rel_tol},
          {"cov_floor", p.train.em.cov_floor}}}}},
  };
  return j;
}

SpeciesModel model_from_json(const ordered_json& j) {
  int version = j.at("schema_version").get<int>();
  if (version != kModelSchemaVersion)
    throw std::runtime_error("model file: unknown schema version " + std::to_string(version));

  SpeciesModel m;
  m.species_id = j.at("species_id").get<std::string>();
  m.feature_set.indices = j.at("feature_set").get<std::vector<int>>();
  m.standardizer.offset = vector_from_json(j.at("standardizer").at("offset"));
  m.standardizer.scale = vector_from_json(j.at("standardizer").at("scale"));

  const auto& g = j.at("gmm");
  m.gmm.k = g.at("k").get<int>();
  m.gmm.dim = g.at("dim").get<int>();
  m.gmm.weights = vector_from_json(g.at("weights"));
  m.gmm.means = matrix_from_json(g.at("means"));
  for (const auto& c : g.at("covariances")) m.gmm.covariances.push_back(matrix_from_json(c));
  m.gmm.train_log_likelihood = g.at("train_log_likelihood").get<double>();
  m.gmm.ll_history = g.at("ll_history").get<std::vector<double>>();

  for (const auto& [key, value] : j.at("mdl_by_k").items())
    m.mdl_by_k[std::stoi(key)] = value.get<double>();
  for (const auto& [key, value] : j.at("best_ll_by_k").items())
    m.best_ll_by_k[std::stoi(key)] = value.get<double>();

  const auto& p = j.at("provenance");
  m.provenance.tool_version = p.at("tool_version").get<std::string>();
  m.provenance.created_utc = p.at("created_utc").get<std::string>();
  m.provenance.corpus_digest = p.at("corpus_digest").get<std::string>();
  m.provenance.window = p.at("window").get<std::string>();
  m.provenance.spectrogram = spectrogram_from_json(p.at("spectrogram"));
  const auto& t = p.at("train");
  m.provenance.train.n_vectors = t.at("n_vectors").get<int>();
  m.provenance.train.n_restarts = t.at("n_restarts").get<int>();
  m.provenance.train.k_min = t.at("k_min").get<int>();
  m.provenance.train.k_max = t.at("k_max").get<int>();
  m.provenance.train.feature_set.indices = t.at("feature_set").get<std::vector<int>>();
  m.provenance.train.seed = t.at("seed").get<std::uint64_t>();
  m.provenance.train.em.max_iters = t.at("em").at("max_iters").get<int>();
  m.provenance.train.em.rel_tol = t.at("em").at("rel_tol").get<double>();
  m.provenance.train.em.cov_floor = t.at("em").at("cov_floor").get<double>();

  validate_model(m);
  return m;
}

void save_model(const std::filesystem::path& path, const SpeciesModel& model) {
  validate_model(model);
  atomic_write_file(path, model_to_json(model).dump(2) + "\n");
}

SpeciesModel load_model(const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("model file " + path.string() + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("model file " + path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("model file " + path.string() + ": " + e.what());
  }
}

void validate_model(const SpeciesModel& model) {
  model.feature_set.validate();
  const GmmModel& g = model.gmm;
  auto d = static_cast<Eigen::Index>(model.feature_set.size());
  if (g.dim != d) throw std::runtime_error("model: GMM dimension differs from the feature set");
  if (model.standardizer.offset.size() != d || model.standardizer.scale.size() != d)
    throw std::runtime_error("model: standardizer dimension differs from the feature set");
  if (!(model.standardizer.scale.array() > 0.0).all())
    throw std::runtime_error("model: standardizer scale must be positive");
  if (g.k < 1 || g.weights.size() != g.k || g.means.rows() != g.k || g.means.cols() != d ||
      g.covariances.size() != static_cast<std::size_t>(g.k))
    throw std::runtime_error("model: inconsistent GMM shapes");
  if (std::abs(g.weights.sum() - 1.0) > 1e-12 || g.weights.minCoeff() < 0.0)
    throw std::runtime_error("model: weights must be nonnegative and sum to 1");
  for (const auto& cov : g.covariances) {
    if (cov.rows() != d || cov.cols() != d)
      throw std::runtime_error("model: covariance shape mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("model: covariance is not positive definite");
  }
  if (model.mdl_by_k.empty()) throw std::runtime_error("model: missing MDL scores");
  int arg_min = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [k, score] : model.mdl_by_k) {  // std::map iterates k ascending
    if (score < best) {
      best = score;
      arg_min = k;
    }
  }
  if (arg_min != g.k)
    throw std::runtime_error("model: selected k is not the MDL minimum");
}

}  // namespace birddet
