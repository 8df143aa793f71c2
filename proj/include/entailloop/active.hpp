#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entailloop/classifier.hpp"
#include "entailloop/features.hpp"
#include "entailloop/rng.hpp"

namespace entailloop {

enum class Strategy { Uncertainty, Random };

std::string_view to_string(Strategy strategy);
/// "uncertainty" | "random"
Strategy parse_strategy(std::string_view text);

struct ActiveConfig {
  Strategy strategy = Strategy::Uncertainty;
  std::size_t n_runs = 10;
  std::size_t step = 1;
  /// Total labeled instances at the end of a run, the seed instance included.
  /// Unset means the whole pool.
  std::optional<std::size_t> budget;
  std::size_t retrain_every = 1;
  std::uint64_t seed = 42;
  TrainOptions train_options;

  void validate() const;
};

struct CurvePoint {
  std::size_t n_labeled = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double pos_consumed = 0.0;
  double neg_consumed = 0.0;
};

struct RunHistory {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::size_t pool_size = 0;
  std::size_t pool_positives = 0;
  std::size_t pool_negatives = 0;
  std::vector<Eigen::Index> acquired;  // pool rows in acquisition order, seed first
  std::vector<CurvePoint> points;      // one per step, the seed step included
};

struct LearningCurve {
  Strategy strategy = Strategy::Uncertainty;
  std::vector<CurvePoint> points;  // pointwise mean over runs
  std::vector<RunHistory> runs;
};

/// Distances |p - 0.5| within this of the minimum count as ties.
inline constexpr double kUncertaintyTieTolerance = 1e-12;

/// Index of the probability nearest 0.5; ties go to the lexicographically
/// smallest id.
std::size_t uncertainty_select(const std::vector<double>& probs, const std::vector<std::string>& ids);
std::size_t uncertainty_select(const LinearModel& model, const FeatureTable& pool);

/// Uniform index into a pool of `pool_size`.
std::size_t random_select(std::size_t pool_size, Rng& rng);

/// Runs config.n_runs independent simulations (run r seeded with seed ^ r)
/// over `pool`, evaluating on `eval` after every acquisition step. The first
/// labeled instance is drawn at random; until both classes have been seen,
/// acquisitions are random and evaluation uses the constant predictor for
/// the single observed class.
LearningCurve simulate(const FeatureTable& pool, const FeatureTable& eval, const ActiveConfig& config);

struct ConsumptionPoint {
  double frac_added = 0.0;
  double pos_consumed = 0.0;
  double neg_consumed = 0.0;
};

std::vector<ConsumptionPoint> consumption_curve(const RunHistory& run);
std::vector<ConsumptionPoint> consumption_curve(const LearningCurve& curve);

/// Trapezoid area under pos_consumed against frac_added, starting at (0, 0).
double consumption_area(const std::vector<ConsumptionPoint>& curve);

/// Smallest n_labeled whose F1 reaches `target` (within 1e-12), if any.
std::optional<std::size_t> labels_to_reach(const std::vector<CurvePoint>& points, double target);

/// Dev F of a model trained on the whole pool.
EvalResult full_data_baseline(const FeatureTable& pool, const FeatureTable& eval, const TrainOptions& options = {});

/// "strategy,n_labeled,precision,recall,f1,pos_consumed,neg_consumed"
void write_curve_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& path);
/// Same columns with a leading run column, one row per run and step.
void write_runs_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& path);
/// "strategy,frac_added,pos_consumed,neg_consumed" from the averaged curves.
void write_consumption_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& path);

}  // namespace entailloop
