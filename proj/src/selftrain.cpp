#include "entailloop/selftrain.hpp"

#include <cmath>
#include <sstream>

#include "entailloop/csv.hpp"
#include "entailloop/error.hpp"
#include "entailloop/parallel.hpp"

namespace entailloop {

void SelfTrainConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must be in (0,1), got " + format_double(tau));
  train_options.validate();
}

SelfTrainResult self_train(const FeatureTable& labeled, const FeatureTable& pool, const FeatureTable& dev,
                           const SelfTrainConfig& config) {
  config.validate();
  if (!labeled.labeled()) throw DataError("self_train: labeled set has unlabeled rows");
  if (!dev.labeled()) throw DataError("self_train: dev set has unlabeled rows");
  if (pool.names != labeled.names || dev.names != labeled.names) throw DataError("self_train: schema mismatch");

  const std::vector<bool> dev_gold = gold_vector(dev);
  const double threshold = config.train_options.decision_threshold;
  auto dev_eval = [&](const LinearModel& m) { return evaluate(predict_proba(m, dev), dev_gold, threshold); };

  SelfTrainResult result;
  result.model = train(labeled, config.train_options);
  if (pool.rows() == 0) return result;

  FeatureTable current = labeled;
  std::vector<Eigen::Index> remaining(static_cast<std::size_t>(pool.rows()));
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = static_cast<Eigen::Index>(i);

  result.history.push_back({0, 0, static_cast<std::size_t>(current.rows()), remaining.size(),
                            dev_eval(result.model)});

  for (std::size_t iteration = 1; !remaining.empty(); ++iteration) {
    if (config.max_iterations && iteration > *config.max_iterations) break;
    const FeatureTable rest = pool.subset(remaining);
    const Eigen::VectorXd probs = predict_proba(result.model, rest);

    std::vector<Eigen::Index> chosen;
    std::vector<Eigen::Index> kept;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      (probs(static_cast<Eigen::Index>(i)) > config.tau ? chosen : kept).push_back(remaining[i]);
    }
    if (chosen.empty()) break;

    FeatureTable added = pool.subset(chosen);
    added.labels.assign(chosen.size(), Label::Entail);
    current.append(added);
    for (const auto& id : added.pair_ids) result.added_ids.push_back(id);
    remaining = std::move(kept);

    result.model = train(current, config.train_options);
    result.history.push_back({iteration, chosen.size(), static_cast<std::size_t>(current.rows()), remaining.size(),
                              dev_eval(result.model)});
  }
  return result;
}

SelfTrainResult self_train(const Dataset& labeled, const Dataset& pool, const Dataset& dev,
                           const SelfTrainConfig& config, const FeatureConfig& features) {
  return self_train(extract_dataset(labeled, features), extract_dataset(pool, features),
                    extract_dataset(dev, features), config);
}

std::vector<double> default_tau_grid() { return parse_grid("0.1:0.9:0.1"); }

namespace {

double round12(double v) { return std::round(v * 1e12) / 1e12; }

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad grid value '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("bad grid value '" + s + "'");
  return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
  const std::string text(spec);
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("grid must be lo:hi:step, got '" + text + "'");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || hi < lo) throw ConfigError("grid needs step > 0 and hi >= lo");
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long long i = 0; i < n; ++i) grid.push_back(round12(lo + static_cast<double>(i) * step));
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) grid.push_back(parse_number(p));
  }
  if (grid.empty()) throw ConfigError("empty tau grid");
  for (double t : grid) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("grid value " + format_double(t) + " outside (0,1)");
  }
  return grid;
}

SweepResult threshold_sweep(const FeatureTable& labeled, const FeatureTable& pool, const FeatureTable& dev,
                            const std::vector<double>& grid, const SelfTrainConfig& base) {
  if (grid.empty()) throw ConfigError("empty tau grid");
  for (double t : grid) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("grid value " + format_double(t) + " outside (0,1)");
  }
  SweepResult sweep;
  sweep.rows.resize(grid.size());
  sweep.runs.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    SelfTrainConfig cfg = base;
    cfg.tau = grid[i];
    sweep.runs[i] = self_train(labeled, pool, dev, cfg);
    const auto& run = sweep.runs[i];
    SweepRow& row = sweep.rows[i];
    row.tau = grid[i];
    row.added_total = run.added_total();
    row.first_round_added = run.history.size() > 1 ? run.history[1].added : 0;
    row.dev = run.history.empty() ? evaluate(predict_proba(run.model, dev), gold_vector(dev),
                                             cfg.train_options.decision_threshold)
                                  : run.history.back().dev;
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& best = sweep.rows[sweep.best_index];
    const auto& row = sweep.rows[i];
    if (row.dev.f1 > best.dev.f1 || (row.dev.f1 == best.dev.f1 && row.tau < best.tau)) sweep.best_index = i;
  }
  sweep.best_tau = sweep.rows[sweep.best_index].tau;
  return sweep;
}

void write_history_csv(const std::vector<SelfTrainRecord>& history, const std::filesystem::path& path) {
  CsvWriter csv(path, "selftrain-history",
                {"iteration", "added", "labeled_size", "pool_size", "dev_p", "dev_r", "dev_f1"});
  for (const auto& r : history) {
    csv.row({std::to_string(r.iteration), std::to_string(r.added), std::to_string(r.labeled_size),
             std::to_string(r.pool_size), format_double(r.dev.precision), format_double(r.dev.recall),
             format_double(r.dev.f1)});
  }
}

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path) {
  CsvWriter csv(path, "selftrain-sweep", {"tau", "added_total", "dev_p", "dev_r", "dev_f1"});
  for (const auto& r : sweep.rows) {
    csv.row({format_double(r.tau), std::to_string(r.added_total), format_double(r.dev.precision),
             format_double(r.dev.recall), format_double(r.dev.f1)});
  }
}

}  // namespace entailloop
