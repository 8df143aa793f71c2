#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entailloop/active.hpp"
#include "entailloop/classifier.hpp"
#include "entailloop/corpus.hpp"
#include "entailloop/features.hpp"
#include "entailloop/imbalance.hpp"
#include "entailloop/retrieval.hpp"
#include "entailloop/selftrain.hpp"

namespace entailloop {

/// Every knob of a full experiment. Stage seeds are derived from `seed`
/// with derive_seed(seed, <stage>), so the config carries one seed only.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "entailloop-out";

  SynthConfig synth;  // synth.seed is ignored; see stage_seed()
  SplitFractions split;
  FeatureConfig features;
  std::optional<std::filesystem::path> stemmer_rules;
  TrainOptions train;
  std::vector<double> tau_grid = default_tau_grid();
  std::optional<std::size_t> selftrain_max_iterations;
  ActiveConfig active;  // strategy and seed are ignored; both strategies run
  std::vector<Strategy> strategies{Strategy::Uncertainty, Strategy::Random};
  SmoteConfig smote;  // n_synthetic and seed are set per comparison point
  RetrievalConfig retrieval;
  std::vector<std::size_t> retrieval_n{5, 10, 15, 20};
  std::size_t significance_shuffles = 10000;

  std::uint64_t stage_seed(std::string_view stage, std::uint64_t replicate = 0) const {
    return derive_seed(seed, stage, replicate);
  }
  /// Validates every block; throws ConfigError.
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are a ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The synthetic corpus, its split and the unlabeled pool exactly as the
/// pipeline builds them.
struct ExperimentData {
  Dataset corpus;
  DatasetSplit split;
  Dataset pool;
};
ExperimentData build_data(const ExperimentConfig& config);

struct SystemResult {
  std::string system;
  std::string split;
  EvalResult eval;
};

struct RunReport {
  nlohmann::ordered_json config;
  std::vector<std::pair<std::string, ClassDistribution>> distributions;
  std::vector<SystemResult> results;
  std::vector<std::pair<std::string, double>> significance;
  double best_tau = 0.0;
  /// Files written, relative to the output directory, sorted.
  std::vector<std::string> manifest;
  std::vector<std::pair<std::string, double>> stage_seconds;

  /// Timing lives under "timing"; every other field is deterministic.
  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

/// Keeps the key order of the document, so parse with ordered_json.
RunReport report_from_json(const nlohmann::ordered_json& doc);

/// synth -> split -> featurize -> ENT baseline -> self-training sweep ->
/// active learning -> SMOTE comparison -> resampling -> retrieval baseline,
/// writing every CSV plus report.json and report.txt under output_dir.
/// A failing stage rethrows with the stage name prefixed.
RunReport run_paper_pipeline(const ExperimentConfig& config);

}  // namespace entailloop
