#include "birddet/gmm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "birddet/rng.hpp"

namespace birddet {

namespace {

constexpr double kWeightCollapse = 1e-8;
constexpr int kMaxAttempts = 4;  // initial fit plus three reseeded restarts

double half_log_2pi(int dim) {
  return 0.5 * dim * std::log(2.0 * std::numbers::pi);
}

// log N(x_i; mean, cov) for every row of x, via the lower Cholesky factor.
Eigen::VectorXd log_mvnormal_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                                  const Eigen::LLT<Eigen::MatrixXd>& llt) {
  Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::MatrixXd solved =
      llt.matrixL().solve(centered.transpose());  // L y = (x - mu)^T
  Eigen::VectorXd quad = solved.colwise().squaredNorm();
  double log_det_l = llt.matrixLLT().diagonal().array().log().sum();
  double log_norm = -half_log_2pi(static_cast<int>(x.cols())) - log_det_l;
  return (-0.5 * quad.array() + log_norm).matrix();
}

struct EmAttemptFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GmmModel em_attempt(const Eigen::MatrixXd& data, int k, const EmConfig& cfg,
                    std::uint64_t seed) {
  const Eigen::Index n = data.rows();
  const int dim = static_cast<int>(data.cols());

  Rng rng(seed);
  GmmModel model;
  model.k = k;
  model.dim = dim;
  model.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  model.means.resize(k, dim);
  auto picks = rng.sample_without_replacement(static_cast<std::size_t>(n),
                                              static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    model.means.row(c) = data.row(static_cast<Eigen::Index>(picks[static_cast<std::size_t>(c)]));
  }

  Eigen::VectorXd global_mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - global_mean.transpose();
  Eigen::MatrixXd global_cov =
      (centered.transpose() * centered) / static_cast<double>(n) +
      cfg.cov_floor * Eigen::MatrixXd::Identity(dim, dim);
  model.covariances.assign(static_cast<std::size_t>(k), global_cov);

  Eigen::MatrixXd log_resp(n, k);
  double prev_ll = -std::numeric_limits<double>::infinity();

  // One extra pass after max_iters so the returned log-likelihood always
  // corresponds to the returned parameters.
  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    // E step
    for (int c = 0; c < k; ++c) {
      Eigen::LLT<Eigen::MatrixXd> llt(model.covariances[static_cast<std::size_t>(c)]);
      if (llt.info() != Eigen::Success)
        throw EmAttemptFailed("covariance lost positive definiteness");
      log_resp.col(c) = log_mvnormal_rows(data, model.means.row(c).transpose(), llt).array() +
                        std::log(model.weights[c]);
    }
    Eigen::VectorXd row_max = log_resp.rowwise().maxCoeff();
    Eigen::VectorXd lse =
        ((log_resp.colwise() - row_max).array().exp().rowwise().sum().log() +
         row_max.array())
            .matrix();
    double ll = lse.sum();
    if (!std::isfinite(ll)) throw EmAttemptFailed("non-finite log-likelihood");
    model.ll_history.push_back(ll);
    model.train_log_likelihood = ll;

    double denom = std::max(std::abs(prev_ll), 1e-12);
    if (iter == cfg.max_iters || (iter > 0 && (ll - prev_ll) / denom < cfg.rel_tol)) break;
    prev_ll = ll;

    Eigen::MatrixXd resp = (log_resp.colwise() - lse).array().exp();

    // M step
    Eigen::VectorXd counts = resp.colwise().sum();
    if ((counts.array() / static_cast<double>(n) < kWeightCollapse).any())
      throw EmAttemptFailed("component collapsed");
    model.weights = counts / static_cast<double>(n);
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXd r = resp.col(c);
      Eigen::VectorXd mu = (data.transpose() * r) / counts[c];
      Eigen::MatrixXd cc = data.rowwise() - mu.transpose();
      Eigen::MatrixXd cov =
          (cc.transpose() * (cc.array().colwise() * r.array()).matrix()) / counts[c] +
          cfg.cov_floor * Eigen::MatrixXd::Identity(dim, dim);
      model.means.row(c) = mu;
      model.covariances[static_cast<std::size_t>(c)] = cov;
    }
  }
  return model;
}

}  // namespace

GmmDensity::GmmDensity(const GmmModel& model) : dim_(model.dim) {
  if (model.k <= 0 || model.dim <= 0) throw std::invalid_argument("GmmDensity: empty model");
  if (model.weights.size() != model.k || model.means.rows() != model.k ||
      model.means.cols() != model.dim ||
      model.covariances.size() != static_cast<std::size_t>(model.k))
    throw std::invalid_argument("GmmDensity: inconsistent model shape");
  components_.reserve(static_cast<std::size_t>(model.k));
  for (int c = 0; c < model.k; ++c) {
    const Eigen::MatrixXd& cov = model.covariances[static_cast<std::size_t>(c)];
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("GmmDensity: covariance " + std::to_string(c) +
                                  " is not positive definite");
    Component comp;
    comp.mean = model.means.row(c).transpose();
    comp.chol_lower = llt.matrixL();
    comp.log_weight = std::log(model.weights[c]);
    comp.log_norm = -half_log_2pi(model.dim) - comp.chol_lower.diagonal().array().log().sum();
    components_.push_back(std::move(comp));
  }
}

double GmmDensity::log_pdf(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("GmmDensity: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("GmmDensity: non-finite input");
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd terms(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const Component& comp = components_[c];
    Eigen::VectorXd solved =
        comp.chol_lower.triangularView<Eigen::Lower>().solve(x - comp.mean);
    double term = comp.log_weight + comp.log_norm - 0.5 * solved.squaredNorm();
    terms[static_cast<Eigen::Index>(c)] = term;
    best = std::max(best, term);
  }
  return best + std::log((terms.array() - best).exp().sum());
}

Eigen::VectorXd GmmDensity::log_pdf_rows(const Eigen::MatrixXd& x) const {
  if (x.cols() != dim_) throw std::invalid_argument("GmmDensity: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("GmmDensity: non-finite input");
  Eigen::MatrixXd terms(x.rows(), static_cast<Eigen::Index>(components_.size()));
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const Component& comp = components_[c];
    Eigen::MatrixXd centered = x.rowwise() - comp.mean.transpose();
    Eigen::MatrixXd solved =
        comp.chol_lower.triangularView<Eigen::Lower>().solve(centered.transpose());
    terms.col(static_cast<Eigen::Index>(c)) =
        (-0.5 * solved.colwise().squaredNorm().array() + comp.log_weight + comp.log_norm)
            .matrix();
  }
  Eigen::VectorXd row_max = terms.rowwise().maxCoeff();
  return ((terms.colwise() - row_max).array().exp().rowwise().sum().log() +
          row_max.array())
      .matrix();
}

GmmModel em_fit(const Eigen::MatrixXd& data, int k, const EmConfig& cfg) {
  if (k < 1) throw std::invalid_argument("em_fit: k must be at least 1");
  if (!data.allFinite()) throw std::invalid_argument("em_fit: non-finite data");
  const Eigen::Index n = data.rows();
  const auto dim = static_cast<int>(data.cols());
  if (dim < 1) throw std::invalid_argument("em_fit: data has no columns");
  if (n <= static_cast<Eigen::Index>(k) * dim)
    throw std::invalid_argument("em_fit: need more than k*d = " + std::to_string(k * dim) +
                                " rows, have " + std::to_string(n));
  if (cfg.max_iters < 1 || !(cfg.rel_tol > 0.0) || !(cfg.cov_floor > 0.0))
    throw std::invalid_argument("em_fit: invalid EM configuration");

  std::string last_error;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    try {
      return em_attempt(data, k, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(attempt)));
    } catch (const EmAttemptFailed& e) {
      last_error = e.what();
    }
  }
  throw std::runtime_error("em_fit: all attempts failed for k=" + std::to_string(k) + ": " +
                           last_error);
}

int gmm_free_parameters(int k, int dim) {
  return (k - 1) + k * dim + k * dim * (dim + 1) / 2;
}

double mdl_score(const GmmModel& model, std::int64_t n_train) {
  if (n_train <= 1) throw std::invalid_argument("mdl_score: need n > 1");
  double penalty = 0.5 * gmm_free_parameters(model.k, model.dim) *
                   std::log(static_cast<double>(n_train));
  return -model.train_log_likelihood + penalty;
}

}  // namespace birddet
