#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "entailloop/corpus.hpp"
#include "entailloop/matchers.hpp"

namespace entailloop {

/// Full feature schema in emission order.
inline constexpr std::array<std::string_view, 8> kFeatureNames{
    "exact_agg",   "all_agg",             "skip_bigram", "coverage",
    "sentence_size", "capitalization_frac", "has_punct",   "list_marker"};

struct FeatureConfig {
  std::array<bool, kFeatureNames.size()> enabled{true, true, true, true, true, true, true, true};
  MatcherConfig matchers;
  /// Null selects Stemmer::default_stemmer().
  std::shared_ptr<const Stemmer> stemmer;

  /// Enabled names in fixed order; depends only on the config.
  std::vector<std::string> schema() const;
  void validate() const;
  const Stemmer& active_stemmer() const;
};

struct FeatureVector {
  std::vector<std::string> names;
  Eigen::VectorXd values;
  std::string pair_id;
};

/// Row-major view of a featurized dataset: one row per pair, columns in
/// schema order. `labels` is empty for unlabeled data.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::string> pair_ids;
  Eigen::MatrixXd values;
  std::vector<Label> labels;

  Eigen::Index rows() const { return values.rows(); }
  bool labeled() const { return labels.size() == pair_ids.size(); }
  /// 1.0 for Entail, 0.0 for NonEntail.
  Eigen::VectorXd targets() const;
  FeatureVector row(Eigen::Index i) const;
  /// Rows at `indices`, in that order.
  FeatureTable subset(const std::vector<Eigen::Index>& indices) const;
  /// Appends all rows of `other` (schemas must match).
  void append(const FeatureTable& other);
};

/// Word (non-punctuation) positions of a token list.
std::vector<std::size_t> term_positions(const std::vector<Token>& tokens);

/// Ordered hypothesis term pairs (i<j) whose matches can be placed in the
/// same order in the text, divided by C(|terms|, 2); 0 when fewer than two
/// hypothesis terms.
double skip_bigram_feature(const std::vector<TermMatch>& matches, const std::vector<Token>& hyp_tokens);

/// matched hypothesis terms / (unmatched hypothesis terms + 1).
double coverage_feature(const std::vector<TermMatch>& matches, const std::vector<Token>& hyp_tokens);

/// True if the text opens with an enumerator such as "2." , "b)" or "- ".
bool has_list_marker(std::string_view text);

FeatureVector extract(const Pair& pair, const FeatureConfig& config = {});

/// One row per pair in dataset order. Labels are copied when every pair is
/// labeled.
FeatureTable extract_dataset(const Dataset& dataset, const FeatureConfig& config = {});

/// CSV "pair_id,label,<feature names...>"; the label cell is empty for
/// unlabeled rows.
void write_feature_csv(const FeatureTable& table, const std::filesystem::path& path);

}  // namespace entailloop
