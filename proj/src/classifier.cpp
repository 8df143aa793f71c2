#include "entailloop/classifier.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "entailloop/error.hpp"
#include "entailloop/rng.hpp"

namespace entailloop {

void TrainOptions::validate() const {
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) throw ConfigError("ridge_lambda must be >= 0");
  if (!(gradient_tolerance > 0.0)) throw ConfigError("gradient_tolerance must be > 0");
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw ConfigError("decision_threshold must be in (0,1)");
  }
}

Eigen::VectorXd LinearModel::parameters() const {
  Eigen::VectorXd theta(weights.size() + 1);
  theta << weights, bias;
  return theta;
}

namespace {

Eigen::VectorXd solve_newton(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& grad) {
  const double scale = std::max(1.0, hessian.diagonal().cwiseAbs().maxCoeff());
  Eigen::MatrixXd damped = hessian;
  for (double mu = 0.0; mu < 1e6 * scale; mu = (mu == 0.0 ? 1e-12 * scale : mu * 100.0)) {
    if (mu > 0.0) damped = hessian + mu * Eigen::MatrixXd::Identity(hessian.rows(), hessian.cols());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (step.allFinite() && grad.dot(step) < 0.0) return step;
  }
  return -grad;
}

}  // namespace

TrainResult train_with_trace(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                             const TrainOptions& options, std::vector<std::string> schema,
                             const std::vector<std::string>* row_ids) {
  options.validate();
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (schema.empty()) {
    for (Eigen::Index j = 0; j < d; ++j) schema.push_back("f" + std::to_string(j));
  }
  if (static_cast<Eigen::Index>(schema.size()) != d) throw DataError("schema size does not match feature columns");
  if (labels.size() != n) throw DataError("label count does not match feature rows");

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!features.row(i).allFinite()) {
      const std::string who = row_ids ? "pair " + (*row_ids)[static_cast<std::size_t>(i)] : "row " + std::to_string(i);
      throw DataError("non-finite feature value in " + who);
    }
    if (labels(i) != 0.0 && labels(i) != 1.0) throw DataError("labels must be 0 or 1");
  }
  const double positives = labels.sum();
  if (n == 0 || positives == 0.0 || positives == static_cast<double>(n)) {
    throw DataError("degenerate training set: need at least one example of each class");
  }

  LinearModel model;
  model.schema = std::move(schema);
  model.ridge_lambda = options.ridge_lambda;
  model.feature_means = features.colwise().mean().transpose();
  model.feature_stds =
      ((features.rowwise() - model.feature_means.transpose()).array().square().colwise().mean()).sqrt().transpose();

  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double tol = 1e-12 * std::max(1.0, std::abs(model.feature_means(j)));
    if (model.feature_stds(j) > tol) {
      active.push_back(j);
    } else {
      model.feature_stds(j) = 1.0;
    }
  }
  const auto da = static_cast<Eigen::Index>(active.size());
  const Eigen::MatrixXd standardized = model.standardize(features);
  Eigen::MatrixXd X(n, da);
  for (Eigen::Index k = 0; k < da; ++k) X.col(k) = standardized.col(active[static_cast<std::size_t>(k)]);

  const double lambda = options.ridge_lambda;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(da + 1);
  double f = logistic_objective(theta, X, labels, lambda);

  TrainTrace trace;
  trace.objective.push_back(f);
  Eigen::VectorXd grad = logistic_gradient(theta, X, labels, lambda);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;
    const Eigen::VectorXd step = solve_newton(logistic_hessian(theta, X, lambda), grad);
    const double slope = grad.dot(step);
    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const Eigen::VectorXd candidate = theta + t * step;
      const double fc = logistic_objective(candidate, X, labels, lambda);
      if (std::isfinite(fc) && (fc <= f + 1e-4 * t * slope || (halving == 0 && fc <= f))) {
        theta = candidate;
        f = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    trace.objective.push_back(f);
    ++trace.iterations;
    grad = logistic_gradient(theta, X, labels, lambda);
  }
  trace.gradient_inf_norm = grad.lpNorm<Eigen::Infinity>();
  trace.converged = trace.gradient_inf_norm < options.gradient_tolerance;

  model.weights = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < da; ++k) model.weights(active[static_cast<std::size_t>(k)]) = theta(k);
  model.bias = theta(da);
  return {std::move(model), std::move(trace)};
}

LinearModel train(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, const TrainOptions& options,
                  std::vector<std::string> schema) {
  return train_with_trace(features, labels, options, std::move(schema)).model;
}

LinearModel train(const FeatureTable& table, const TrainOptions& options) {
  return train_with_trace(table.values, table.targets(), options, table.names, &table.pair_ids).model;
}

double clamp_probability(double p) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(p, lo, hi);
}

double predict_proba(const LinearModel& model, const FeatureVector& x) {
  if (x.names != model.schema) {
    const std::set<std::string> have(x.names.begin(), x.names.end());
    const std::set<std::string> want(model.schema.begin(), model.schema.end());
    std::string missing;
    std::string extra;
    for (const auto& s : want) {
      if (!have.count(s)) missing += (missing.empty() ? "" : ",") + s;
    }
    for (const auto& s : have) {
      if (!want.count(s)) extra += (extra.empty() ? "" : ",") + s;
    }
    throw DataError("schema mismatch for pair " + x.pair_id + ": missing [" + missing + "] extra [" + extra +
                    "]" + (missing.empty() && extra.empty() ? " (order differs)" : ""));
  }
  if (x.values.size() != static_cast<Eigen::Index>(model.schema.size())) {
    throw DataError("feature vector length does not match schema");
  }
  const double z =
      ((x.values - model.feature_means).array() / model.feature_stds.array()).matrix().dot(model.weights) + model.bias;
  return clamp_probability(sigmoid(z));
}

Eigen::VectorXd predict_proba(const LinearModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != static_cast<Eigen::Index>(model.schema.size())) {
    throw DataError("feature matrix has " + std::to_string(features.cols()) + " columns, model expects " +
                    std::to_string(model.schema.size()));
  }
  const Eigen::VectorXd z = (model.standardize(features) * model.weights).array() + model.bias;
  return z.unaryExpr([](double v) { return clamp_probability(sigmoid(v)); });
}

Eigen::VectorXd predict_proba(const LinearModel& model, const FeatureTable& table) {
  if (table.names != model.schema) {
    FeatureVector probe{table.names, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.names.size())), "<table>"};
    predict_proba(model, probe);  // throws with the schema diff
  }
  return predict_proba(model, table.values);
}

double f_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

EvalResult eval_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  EvalResult r{tp, fp, fn, tn, 0.0, 0.0, 0.0};
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = f_score(r.precision, r.recall);
  return r;
}

EvalResult evaluate_predictions(const std::vector<bool>& predicted, const std::vector<bool>& gold) {
  if (predicted.size() != gold.size()) {
    throw DataError("evaluate: " + std::to_string(predicted.size()) + " predictions for " +
                    std::to_string(gold.size()) + " gold labels");
  }
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i]) {
      gold[i] ? ++tp : ++fp;
    } else {
      gold[i] ? ++fn : ++tn;
    }
  }
  return eval_from_counts(tp, fp, fn, tn);
}

EvalResult evaluate(const std::vector<double>& probs, const std::vector<bool>& gold, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must be in (0,1)");
  std::vector<bool> predicted(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) predicted[i] = probs[i] >= threshold;
  return evaluate_predictions(predicted, gold);
}

EvalResult evaluate(const Eigen::VectorXd& probs, const std::vector<bool>& gold, double threshold) {
  return evaluate(std::vector<double>(probs.data(), probs.data() + probs.size()), gold, threshold);
}

std::vector<bool> gold_vector(const FeatureTable& table) {
  if (!table.labeled()) throw DataError("gold labels requested for an unlabeled table");
  std::vector<bool> gold(table.labels.size());
  for (std::size_t i = 0; i < gold.size(); ++i) gold[i] = table.labels[i] == Label::Entail;
  return gold;
}

namespace {

double f_of(std::size_t tp, std::size_t fp, std::size_t fn) {
  return eval_from_counts(tp, fp, fn, 0).f1;
}

}  // namespace

double significance_test(const std::vector<bool>& preds_a, const std::vector<bool>& preds_b,
                         const std::vector<bool>& gold, std::size_t n_shuffles, std::uint64_t seed) {
  const std::size_t n = gold.size();
  if (n == 0) throw DataError("significance_test: empty input");
  if (preds_a.size() != n || preds_b.size() != n) throw DataError("significance_test: misaligned inputs");
  if (n_shuffles == 0) throw ConfigError("significance_test: n_shuffles must be >= 1");

  // Pairs where the systems agree contribute identically to both sides.
  std::size_t base_tp = 0, base_fp = 0, base_fn = 0;
  struct Diff {
    bool gold;
    bool a;
  };
  std::vector<Diff> diffs;
  for (std::size_t i = 0; i < n; ++i) {
    if (preds_a[i] == preds_b[i]) {
      if (preds_a[i]) {
        gold[i] ? ++base_tp : ++base_fp;
      } else if (gold[i]) {
        ++base_fn;
      }
    } else {
      diffs.push_back({gold[i], preds_a[i]});
    }
  }

  auto delta = [&](auto&& swapped) {
    std::size_t tp[2] = {base_tp, base_tp}, fp[2] = {base_fp, base_fp}, fn[2] = {base_fn, base_fn};
    for (std::size_t k = 0; k < diffs.size(); ++k) {
      // Side 0 receives system a's prediction unless swapped.
      const bool a_pred = diffs[k].a;
      const int positive_side = (a_pred != swapped(k)) ? 0 : 1;
      if (diffs[k].gold) {
        ++tp[positive_side];
        ++fn[1 - positive_side];
      } else {
        ++fp[positive_side];
      }
    }
    return std::abs(f_of(tp[0], fp[0], fn[0]) - f_of(tp[1], fp[1], fn[1]));
  };

  const double observed = delta([](std::size_t) { return false; });
  constexpr double kSlack = 1e-12;

  if (n < 63 && n_shuffles >= (std::size_t{1} << n)) {
    // Swapping an agreeing pair changes nothing, so each pattern over the
    // differing pairs stands for 2^(n - |diffs|) full patterns.
    const std::uint64_t patterns = std::uint64_t{1} << diffs.size();
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      if (delta([mask](std::size_t k) { return ((mask >> k) & 1U) != 0; }) >= observed - kSlack) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(patterns);
  }

  Rng rng(seed);
  std::size_t hits = 0;
  std::vector<bool> swap(diffs.size());
  for (std::size_t s = 0; s < n_shuffles; ++s) {
    for (std::size_t k = 0; k < diffs.size(); ++k) swap[k] = (rng.next() >> 63) != 0;
    if (delta([&swap](std::size_t k) { return static_cast<bool>(swap[k]); }) >= observed - kSlack) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(n_shuffles + 1);
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["schema"] = model.schema;
  doc["weights"] = std::vector<double>(model.weights.data(), model.weights.data() + model.weights.size());
  doc["bias"] = model.bias;
  doc["ridge_lambda"] = model.ridge_lambda;
  doc["means"] =
      std::vector<double>(model.feature_means.data(), model.feature_means.data() + model.feature_means.size());
  doc["stds"] = std::vector<double>(model.feature_stds.data(), model.feature_stds.data() + model.feature_stds.size());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  LinearModel model;
  try {
    const auto doc = nlohmann::json::parse(in);
    model.schema = doc.at("schema").get<std::vector<std::string>>();
    const auto to_vec = [](const std::vector<double>& v) {
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    model.weights = to_vec(doc.at("weights").get<std::vector<double>>());
    model.bias = doc.at("bias").get<double>();
    model.ridge_lambda = doc.at("ridge_lambda").get<double>();
    model.feature_means = to_vec(doc.at("means").get<std::vector<double>>());
    model.feature_stds = to_vec(doc.at("stds").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  const auto d = static_cast<Eigen::Index>(model.schema.size());
  if (model.weights.size() != d || model.feature_means.size() != d || model.feature_stds.size() != d) {
    throw DataError(path.string() + ": inconsistent model dimensions");
  }
  if ((model.feature_stds.array() <= 0.0).any()) throw DataError(path.string() + ": stds must be positive");
  return model;
}

}  // namespace entailloop
