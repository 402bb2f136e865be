#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

namespace birddet {

struct EmConfig {
  int max_iters = 500;
  double rel_tol = 1e-7;     // stop when the relative log-likelihood gain falls below this
  double cov_floor = 1e-6;   // ridge added to covariance diagonals, standardized units
  std::uint64_t seed = 0;
};

// Full-covariance Gaussian mixture. Parameters are in standardized-feature
// units throughout the pipeline. Immutable once fitted; share freely.
struct GmmModel {
  int k = 0;
  int dim = 0;
  Eigen::VectorXd weights;                    // k, nonnegative, sums to 1
  Eigen::MatrixXd means;                      // k x dim
  std::vector<Eigen::MatrixXd> covariances;   // k SPD dim x dim matrices
  double train_log_likelihood = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ll_history;             // per-iteration log-likelihood
};

// Density evaluator with precomputed Cholesky factors; build once, query many.
class GmmDensity {
 public:
  explicit GmmDensity(const GmmModel& model);

  double log_pdf(const Eigen::VectorXd& x) const;
  double pdf(const Eigen::VectorXd& x) const { return std::exp(log_pdf(x)); }

  // One log-density per row of x.
  Eigen::VectorXd log_pdf_rows(const Eigen::MatrixXd& x) const;

 private:
  struct Component {
    Eigen::VectorXd mean;
    Eigen::MatrixXd chol_lower;
    double log_weight = 0.0;
    double log_norm = 0.0;  // -dim/2 log(2 pi) - log det L
  };
  std::vector<Component> components_;
  int dim_ = 0;
};

// Standard EM fit. Initialization: means drawn as k distinct data rows with
// the seeded generator, covariances set to the global data covariance,
// uniform weights. Every M-step adds cov_floor to the covariance diagonals.
// A collapsed component (weight under 1e-8) triggers an internal reseeded
// restart, at most three, before giving up.
GmmModel em_fit(const Eigen::MatrixXd& data, int k, const EmConfig& cfg);

// Free parameter count: (k-1) mixing weights + k*d means + k*d(d+1)/2
// covariance entries.
int gmm_free_parameters(int k, int dim);

// Two-part description length, lower is better: -LL + (P/2) ln(n).
double mdl_score(const GmmModel& model, std::int64_t n_train);

}  // namespace birddet
