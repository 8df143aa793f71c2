#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entailloop/classifier.hpp"
#include "entailloop/features.hpp"

namespace entailloop {

struct SelfTrainConfig {
  double tau = 0.5;
  /// Augmentation rounds; unset runs until no pool pair clears tau.
  std::optional<std::size_t> max_iterations;
  TrainOptions train_options;

  void validate() const;
};

/// Row 0 is the baseline model (nothing added yet).
struct SelfTrainRecord {
  std::size_t iteration = 0;
  std::size_t added = 0;
  std::size_t labeled_size = 0;
  std::size_t pool_size = 0;
  EvalResult dev;
};

struct SelfTrainResult {
  LinearModel model;
  std::vector<SelfTrainRecord> history;
  /// Pool pair ids absorbed as Entail, in the order they were added.
  std::vector<std::string> added_ids;

  std::size_t added_total() const { return added_ids.size(); }
};

/// Train, move every pool row with probability > tau into the labeled set as
/// Entail, retrain; repeat until nothing clears tau, the pool is exhausted or
/// max_iterations rounds have run. Rows below tau stay in the pool and are
/// rescored each round. An empty pool returns the baseline model and an
/// empty history.
SelfTrainResult self_train(const FeatureTable& labeled, const FeatureTable& pool, const FeatureTable& dev,
                           const SelfTrainConfig& config);

SelfTrainResult self_train(const Dataset& labeled, const Dataset& pool, const Dataset& dev,
                           const SelfTrainConfig& config, const FeatureConfig& features = {});

struct SweepRow {
  double tau = 0.0;
  std::size_t added_total = 0;
  std::size_t first_round_added = 0;
  EvalResult dev;  // final model on dev
};

struct SweepResult {
  double best_tau = 0.0;
  std::size_t best_index = 0;
  std::vector<SweepRow> rows;
  std::vector<SelfTrainResult> runs;  // parallel to rows
};

/// 0.1, 0.2, ..., 0.9
std::vector<double> default_tau_grid();

/// "lo:hi:step" (inclusive) or a comma-separated list. Values are rounded to
/// 12 decimals so 0.1:0.9:0.1 yields exactly nine clean entries.
std::vector<double> parse_grid(std::string_view spec);

/// One self_train per tau from the same starting state; grid points run
/// concurrently. best_tau maximizes final dev F1, ties to the smaller tau.
/// `base` supplies max_iterations and train_options; its tau is ignored.
SweepResult threshold_sweep(const FeatureTable& labeled, const FeatureTable& pool, const FeatureTable& dev,
                            const std::vector<double>& grid, const SelfTrainConfig& base = {});

void write_history_csv(const std::vector<SelfTrainRecord>& history, const std::filesystem::path& path);
void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path);

}  // namespace entailloop
