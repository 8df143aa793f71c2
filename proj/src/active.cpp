#include "entailloop/active.hpp"

#include <algorithm>
#include <cmath>

#include "entailloop/csv.hpp"
#include "entailloop/error.hpp"
#include "entailloop/parallel.hpp"

namespace entailloop {

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::Uncertainty ? "uncertainty" : "random";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "uncertainty") return Strategy::Uncertainty;
  if (text == "random") return Strategy::Random;
  throw ConfigError("unknown strategy '" + std::string(text) + "'");
}

void ActiveConfig::validate() const {
  if (n_runs < 1) throw ConfigError("n_runs must be >= 1");
  if (step < 1) throw ConfigError("step must be >= 1");
  if (retrain_every < 1) throw ConfigError("retrain_every must be >= 1");
  if (budget && *budget < 1) throw ConfigError("budget must be >= 1");
  train_options.validate();
}

std::size_t uncertainty_select(const std::vector<double>& probs, const std::vector<std::string>& ids) {
  if (probs.empty()) throw DataError("uncertainty_select: empty pool");
  if (ids.size() != probs.size()) throw DataError("uncertainty_select: ids and probabilities differ in length");
  double best = std::abs(probs[0] - 0.5);
  for (double p : probs) best = std::min(best, std::abs(p - 0.5));
  std::size_t pick = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (std::abs(probs[i] - 0.5) <= best + kUncertaintyTieTolerance && (pick == probs.size() || ids[i] < ids[pick])) {
      pick = i;
    }
  }
  return pick;
}

std::size_t uncertainty_select(const LinearModel& model, const FeatureTable& pool) {
  const Eigen::VectorXd p = predict_proba(model, pool);
  return uncertainty_select(std::vector<double>(p.data(), p.data() + p.size()), pool.pair_ids);
}

std::size_t random_select(std::size_t pool_size, Rng& rng) {
  if (pool_size == 0) throw DataError("random_select: empty pool");
  return static_cast<std::size_t>(rng.uniform_index(pool_size));
}

namespace {

RunHistory run_once(const FeatureTable& pool, const FeatureTable& eval, const ActiveConfig& config, std::size_t r) {
  const auto n = static_cast<std::size_t>(pool.rows());
  const std::size_t budget = std::min(config.budget.value_or(n), n);
  const std::vector<bool> eval_gold = gold_vector(eval);
  const double threshold = config.train_options.decision_threshold;

  RunHistory run;
  run.run = r;
  run.seed = config.seed ^ static_cast<std::uint64_t>(r);
  run.pool_size = n;
  for (auto l : pool.labels) ++(l == Label::Entail ? run.pool_positives : run.pool_negatives);

  Rng rng(run.seed);
  std::vector<Eigen::Index> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = static_cast<Eigen::Index>(i);
  std::size_t pos = 0;
  std::size_t neg = 0;
  auto acquire = [&](std::size_t slot) {
    const Eigen::Index row = remaining[slot];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(slot));
    run.acquired.push_back(row);
    ++(pool.labels[static_cast<std::size_t>(row)] == Label::Entail ? pos : neg);
  };

  std::optional<LinearModel> model;
  Eigen::VectorXd pool_probs;
  std::size_t since_retrain = 0;
  auto record = [&] {
    EvalResult e;
    if (model) {
      e = evaluate(predict_proba(*model, eval), eval_gold, threshold);
    } else {
      e = evaluate_predictions(std::vector<bool>(eval_gold.size(), pos > 0), eval_gold);
    }
    CurvePoint pt;
    pt.n_labeled = run.acquired.size();
    pt.precision = e.precision;
    pt.recall = e.recall;
    pt.f1 = e.f1;
    pt.pos_consumed = run.pool_positives ? static_cast<double>(pos) / static_cast<double>(run.pool_positives) : 0.0;
    pt.neg_consumed = run.pool_negatives ? static_cast<double>(neg) / static_cast<double>(run.pool_negatives) : 0.0;
    run.points.push_back(pt);
  };

  acquire(random_select(remaining.size(), rng));
  record();
  while (run.acquired.size() < budget) {
    const std::size_t take = std::min(config.step, budget - run.acquired.size());
    for (std::size_t t = 0; t < take; ++t) {
      if (config.strategy == Strategy::Uncertainty && model) {
        std::vector<double> probs(remaining.size());
        std::vector<std::string> ids(remaining.size());
        for (std::size_t i = 0; i < remaining.size(); ++i) {
          probs[i] = pool_probs(remaining[i]);
          ids[i] = pool.pair_ids[static_cast<std::size_t>(remaining[i])];
        }
        acquire(uncertainty_select(probs, ids));
      } else {
        acquire(random_select(remaining.size(), rng));
      }
    }
    if (pos > 0 && neg > 0) {
      ++since_retrain;
      if (!model || since_retrain >= config.retrain_every || run.acquired.size() == budget) {
        model = train(pool.subset(run.acquired), config.train_options);
        pool_probs = predict_proba(*model, pool.values);
        since_retrain = 0;
      }
    }
    record();
  }
  return run;
}

}  // namespace

LearningCurve simulate(const FeatureTable& pool, const FeatureTable& eval, const ActiveConfig& config) {
  config.validate();
  if (pool.rows() == 0) throw DataError("active: empty pool");
  if (!pool.labeled() || !eval.labeled()) throw DataError("active: pool and eval set must be labeled");
  if (pool.names != eval.names) throw DataError("active: pool and eval schemas differ");
  const bool has_pos = std::count(pool.labels.begin(), pool.labels.end(), Label::Entail) > 0;
  const bool has_neg = std::count(pool.labels.begin(), pool.labels.end(), Label::NonEntail) > 0;
  if (!has_pos || !has_neg) throw DataError("active: pool must contain both classes");

  LearningCurve curve;
  curve.strategy = config.strategy;
  curve.runs.resize(config.n_runs);
  parallel_for(config.n_runs, [&](std::size_t r) { curve.runs[r] = run_once(pool, eval, config, r); });

  const std::size_t steps = curve.runs.front().points.size();
  const auto runs = static_cast<double>(config.n_runs);
  for (std::size_t s = 0; s < steps; ++s) {
    CurvePoint mean;
    mean.n_labeled = curve.runs.front().points[s].n_labeled;
    for (const auto& run : curve.runs) {
      const auto& p = run.points[s];
      mean.precision += p.precision;
      mean.recall += p.recall;
      mean.f1 += p.f1;
      mean.pos_consumed += p.pos_consumed;
      mean.neg_consumed += p.neg_consumed;
    }
    mean.precision /= runs;
    mean.recall /= runs;
    mean.f1 /= runs;
    mean.pos_consumed /= runs;
    mean.neg_consumed /= runs;
    curve.points.push_back(mean);
  }
  return curve;
}

namespace {

std::vector<ConsumptionPoint> consumption_from(const std::vector<CurvePoint>& points, std::size_t pool_size) {
  std::vector<ConsumptionPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    out.push_back({static_cast<double>(p.n_labeled) / static_cast<double>(pool_size), p.pos_consumed,
                   p.neg_consumed});
  }
  return out;
}

}  // namespace

std::vector<ConsumptionPoint> consumption_curve(const RunHistory& run) {
  if (run.points.empty()) throw DataError("consumption_curve: empty history");
  return consumption_from(run.points, run.pool_size);
}

std::vector<ConsumptionPoint> consumption_curve(const LearningCurve& curve) {
  if (curve.runs.empty() || curve.points.empty()) throw DataError("consumption_curve: empty curve");
  return consumption_from(curve.points, curve.runs.front().pool_size);
}

double consumption_area(const std::vector<ConsumptionPoint>& curve) {
  double area = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  for (const auto& p : curve) {
    area += 0.5 * (p.frac_added - x0) * (p.pos_consumed + y0);
    x0 = p.frac_added;
    y0 = p.pos_consumed;
  }
  return area;
}

std::optional<std::size_t> labels_to_reach(const std::vector<CurvePoint>& points, double target) {
  for (const auto& p : points) {
    if (p.f1 >= target - 1e-12) return p.n_labeled;
  }
  return std::nullopt;
}

EvalResult full_data_baseline(const FeatureTable& pool, const FeatureTable& eval, const TrainOptions& options) {
  const LinearModel model = train(pool, options);
  return evaluate(predict_proba(model, eval), gold_vector(eval), options.decision_threshold);
}

namespace {

std::vector<std::string> point_fields(const CurvePoint& p) {
  return {std::to_string(p.n_labeled), format_double(p.precision), format_double(p.recall), format_double(p.f1),
          format_double(p.pos_consumed), format_double(p.neg_consumed)};
}

}  // namespace

void write_curve_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& path) {
  CsvWriter csv(path, "active-curve",
                {"strategy", "n_labeled", "precision", "recall", "f1", "pos_consumed", "neg_consumed"});
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      auto row = point_fields(p);
      row.insert(row.begin(), std::string(to_string(c.strategy)));
      csv.row(row);
    }
  }
}

void write_runs_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& path) {
  CsvWriter csv(path, "active-runs",
                {"run", "strategy", "n_labeled", "precision", "recall", "f1", "pos_consumed", "neg_consumed"});
  for (const auto& c : curves) {
    for (const auto& run : c.runs) {
      for (const auto& p : run.points) {
        auto row = point_fields(p);
        row.insert(row.begin(), std::string(to_string(c.strategy)));
        row.insert(row.begin(), std::to_string(run.run));
        csv.row(row);
      }
    }
  }
}

void write_consumption_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& path) {
  CsvWriter csv(path, "active-consumption", {"strategy", "frac_added", "pos_consumed", "neg_consumed"});
  for (const auto& c : curves) {
    for (const auto& p : consumption_curve(c)) {
      csv.row({std::string(to_string(c.strategy)), format_double(p.frac_added), format_double(p.pos_consumed),
               format_double(p.neg_consumed)});
    }
  }
}

}  // namespace entailloop
