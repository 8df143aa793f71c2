#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entailloop/features.hpp"

namespace entailloop {

/// A resampled training set. `source_rows[i]` is the input row that output
/// row i copies.
struct Resampled {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
  std::vector<Eigen::Index> source_rows;
};

/// Removes majority rows uniformly without replacement until both classes
/// have the minority count. Surviving rows keep their input order.
Resampled downsample(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, std::uint64_t seed);

/// Appends minority rows drawn uniformly with replacement until both classes
/// have the majority count.
Resampled upsample(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels, std::uint64_t seed);

FeatureTable downsample(const FeatureTable& table, std::uint64_t seed);
FeatureTable upsample(const FeatureTable& table, std::uint64_t seed);

/// Indices of the k rows nearest to row `query` (Euclidean, the query row
/// excluded), nearest first, ties by lower index. Distances are measured
/// after dividing each column by `scale` when it is non-empty.
std::vector<Eigen::Index> knn(const Eigen::MatrixXd& points, Eigen::Index query, Eigen::Index k,
                              const Eigen::VectorXd& scale = Eigen::VectorXd());

struct SmoteConfig {
  Eigen::Index k = 5;
  std::size_t n_synthetic = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticInstance {
  Eigen::VectorXd values;
  std::string source_id;
  std::string neighbor_id;
  Eigen::Index source_row = 0;
  Eigen::Index neighbor_row = 0;
  double lambda = 0.0;
};

/// SMOTE over minority rows. Sources are taken round-robin (row s mod m),
/// the neighbor uniformly among the source's k nearest minority rows, and
/// lambda uniformly from [0, 1]; values = source + lambda * (neighbor - source).
/// k is clamped to m - 1. `scale` feeds the neighbor search (see knn).
std::vector<SyntheticInstance> smote(const Eigen::MatrixXd& minority, const std::vector<std::string>& ids,
                                     const SmoteConfig& config, const Eigen::VectorXd& scale = Eigen::VectorXd());

/// Training table plus synthetic rows labeled with `label`; synthetic ids are
/// "smote:<index>".
FeatureTable with_synthetic(const FeatureTable& table, const std::vector<SyntheticInstance>& synthetic,
                            Label label = Label::Entail);

/// Feature CSV schema plus source_id, neighbor_id and lambda columns.
void write_synthetic_csv(const std::vector<std::string>& names, const std::vector<SyntheticInstance>& synthetic,
                         const std::filesystem::path& path);

}  // namespace entailloop
