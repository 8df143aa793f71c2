#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entailloop/features.hpp"

namespace entailloop {

// ---------------------------------------------------------------------------
// Regularized logistic loss, templated on the Eigen expression types so the
// same code serves double, long double and autodiff scalars.
//
// Parameters are packed as theta = [w; b] with b last. The objective is
//   sum_i softplus(z_i) - y_i z_i + (lambda / 2) ||w||^2,   z = X w + b,
// and the bias is not penalized.

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  return (z > Scalar(0) ? z : Scalar(0)) + log1p(exp(-(z > Scalar(0) ? z : -z)));
}

template <typename DerivedTheta, typename DerivedX, typename DerivedY>
typename DerivedX::Scalar logistic_objective(const Eigen::MatrixBase<DerivedTheta>& theta,
                                             const Eigen::MatrixBase<DerivedX>& X,
                                             const Eigen::MatrixBase<DerivedY>& y,
                                             typename DerivedX::Scalar lambda) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index d = X.cols();
  const auto w = theta.head(d);
  const Scalar b = theta(d);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = (X * w).array() + b;
  Scalar total(0);
  for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z(i)) - y(i) * z(i);
  return total + Scalar(0.5) * lambda * w.squaredNorm();
}

template <typename DerivedTheta, typename DerivedX, typename DerivedY>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> logistic_gradient(
    const Eigen::MatrixBase<DerivedTheta>& theta, const Eigen::MatrixBase<DerivedX>& X,
    const Eigen::MatrixBase<DerivedY>& y, typename DerivedX::Scalar lambda) {
  using Scalar = typename DerivedX::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index d = X.cols();
  const Vector z = (X * theta.head(d)).array() + theta(d);
  const Vector residual = z.unaryExpr([](Scalar v) { return sigmoid(v); }) - y;
  Vector grad(d + 1);
  grad.head(d) = X.transpose() * residual + lambda * theta.head(d);
  grad(d) = residual.sum();
  return grad;
}

template <typename DerivedTheta, typename DerivedX>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, Eigen::Dynamic> logistic_hessian(
    const Eigen::MatrixBase<DerivedTheta>& theta, const Eigen::MatrixBase<DerivedX>& X,
    typename DerivedX::Scalar lambda) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Matrix design(n, d + 1);
  design.leftCols(d) = X;
  design.col(d).setOnes();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = design * theta;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weight(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar p = sigmoid(z(i));
    weight(i) = p * (Scalar(1) - p);
  }
  Matrix hessian = design.transpose() * weight.asDiagonal() * design;
  hessian.topLeftCorner(d, d).diagonal().array() += lambda;
  return hessian;
}

// ---------------------------------------------------------------------------

struct TrainOptions {
  double ridge_lambda = 1e-8;
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  double decision_threshold = 0.5;
  std::uint64_t seed = 0;  // reserved; the trainer is deterministic

  void validate() const;
};

/// Logistic model over standardized features.
///
/// Features are standardized with the training mean and population standard
/// deviation. Zero-variance features get std 1 and a weight fixed at 0.
struct LinearModel {
  std::vector<std::string> schema;
  Eigen::VectorXd weights;
  double bias = 0.0;
  double ridge_lambda = 0.0;
  Eigen::VectorXd feature_means;
  Eigen::VectorXd feature_stds;

  template <typename Derived>
  Eigen::MatrixXd standardize(const Eigen::MatrixBase<Derived>& X) const {
    return (X.rowwise() - feature_means.transpose()).array().rowwise() / feature_stds.transpose().array();
  }

  /// theta = [weights; bias] in standardized coordinates.
  Eigen::VectorXd parameters() const;
};

struct TrainTrace {
  std::vector<double> objective;  // value before the first step and after each step
  int iterations = 0;
  bool converged = false;
  double gradient_inf_norm = 0.0;
};

struct TrainResult {
  LinearModel model;
  TrainTrace trace;
};

/// Damped Newton iterations with Armijo backtracking; the objective never
/// increases between iterations. Stops when the gradient infinity-norm falls
/// below the tolerance or after max_iterations. `labels` are 0/1.
/// `row_ids` (optional) name offending rows in error messages.
TrainResult train_with_trace(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                             const TrainOptions& options, std::vector<std::string> schema = {},
                             const std::vector<std::string>* row_ids = nullptr);

LinearModel train(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                  const TrainOptions& options = {}, std::vector<std::string> schema = {});

LinearModel train(const FeatureTable& table, const TrainOptions& options = {});

/// Probability of Entail, strictly inside (0, 1).
double predict_proba(const LinearModel& model, const FeatureVector& x);

/// Row-wise probabilities for raw (unstandardized) features in schema order.
Eigen::VectorXd predict_proba(const LinearModel& model, const Eigen::MatrixXd& features);

Eigen::VectorXd predict_proba(const LinearModel& model, const FeatureTable& table);

/// Clamps sigmoid output into the open unit interval.
double clamp_probability(double p);

struct EvalResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f_score(double precision, double recall);

EvalResult eval_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

/// Predicted Entail iff prob >= threshold. `gold` entries are true for Entail.
EvalResult evaluate(const std::vector<double>& probs, const std::vector<bool>& gold, double threshold = 0.5);
EvalResult evaluate(const Eigen::VectorXd& probs, const std::vector<bool>& gold, double threshold = 0.5);

/// Evaluation of hard predictions.
EvalResult evaluate_predictions(const std::vector<bool>& predicted, const std::vector<bool>& gold);

std::vector<bool> gold_vector(const FeatureTable& table);

/// Two-sided paired approximate randomization on F-score.
///
/// Each shuffle swaps the two systems' predictions on every pair with
/// probability 1/2; p = (#{|dF_shuffled| >= |dF_observed|} + 1) / (n_shuffles + 1).
/// When n_shuffles >= 2^n the 2^n swap patterns are enumerated exactly and
/// p = #{patterns with |dF| >= |dF_observed|} / 2^n.
double significance_test(const std::vector<bool>& preds_a, const std::vector<bool>& preds_b,
                         const std::vector<bool>& gold, std::size_t n_shuffles = 10000,
                         std::uint64_t seed = 0);

/// JSON {schema, weights, bias, ridge_lambda, means, stds}.
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace entailloop
